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

#ifndef SSDRT_ERROR_HPP_
#define SSDRT_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace ssdrt {

// Domain error carrying the module it came from and the offending field or
// parameter. The CLI maps any Error to exit code 1 and prints module/field.
class Error : public std::runtime_error {
 public:
  Error(std::string module, std::string field, const std::string& message)
      : std::runtime_error(module + ": " + field + ": " + message),
        module_(std::move(module)),
        field_(std::move(field)) {}

  const std::string& module() const { return module_; }
  const std::string& field() const { return field_; }

 private:
  std::string module_;
  std::string field_;
};

}  // namespace ssdrt

#endif  // SSDRT_ERROR_HPP_
