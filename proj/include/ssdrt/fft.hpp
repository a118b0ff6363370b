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

#ifndef SSDRT_FFT_HPP_
#define SSDRT_FFT_HPP_

#include <complex>
#include <vector>

namespace ssdrt {

// In-place radix-2 DIT FFT. x.size() must be a power of two.
// inverse=true applies the conjugate transform and the 1/N scale, so
// fft(fft(x), inverse=true) == x up to rounding.
void fft(std::vector<std::complex<double>>& x, bool inverse);

// Periodic Hann window w[n] = 0.5 * (1 - cos(2*pi*n/size)), n in [0, size).
// Periodic (denominator size, not size-1) so the 50%-overlap COLA sum is
// exactly 1 at every sample.
std::vector<double> hann_window(int size);

}  // namespace ssdrt

#endif  // SSDRT_FFT_HPP_
