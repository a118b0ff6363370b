// Copyright 2025 The ssdrt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SSDRT_VERSION_HPP_
#define SSDRT_VERSION_HPP_

namespace ssdrt {

// git-describe style version string embedded in every JSON run record.
// Bump by hand on release; run records must stay byte-stable between runs of
// the same build, so no __DATE__ or commit probing here.
inline constexpr const char* kVersion = "v0.1.0";

}  // namespace ssdrt

#endif  // SSDRT_VERSION_HPP_
