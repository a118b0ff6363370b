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

#include "ssdrt/fft.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include <doctest.h>

#include "ssdrt/error.hpp"
#include "ssdrt/rng.hpp"

using namespace ssdrt;
using cplx = std::complex<double>;

namespace {

// Quadratic-time reference transform.
std::vector<cplx> naive_dft(const std::vector<cplx>& x, bool inverse) {
  const size_t n = x.size();
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<cplx> out(n);
  for (size_t k = 0; k < n; ++k) {
    cplx acc(0.0, 0.0);
    for (size_t t = 0; t < n; ++t) {
      double ang = sign * 2.0 * M_PI * double(k * t % n) / double(n);
      acc += x[t] * cplx(std::cos(ang), std::sin(ang));
    }
    out[k] = inverse ? acc / double(n) : acc;
  }
  return out;
}

std::vector<cplx> random_signal(size_t n, uint64_t seed) {
  Rng r(seed);
  std::vector<cplx> x(n);
  for (auto& v : x) v = cplx(r.uniform(-1.0, 1.0), r.uniform(-1.0, 1.0));
  return x;
}

}  // namespace

TEST_SUITE_BEGIN("fft");

TEST_CASE("matches the naive DFT on random signals") {
  for (size_t n : {1u, 2u, 4u, 8u, 64u, 256u}) {
    std::vector<cplx> x = random_signal(n, 100 + n);
    std::vector<cplx> want = naive_dft(x, false);
    std::vector<cplx> got = x;
    fft(got, false);
    for (size_t i = 0; i < n; ++i)
      CHECK(std::abs(got[i] - want[i]) < 1e-9 * double(n));
  }
}

TEST_CASE("inverse matches the naive inverse DFT") {
  std::vector<cplx> x = random_signal(128, 7);
  std::vector<cplx> want = naive_dft(x, true);
  std::vector<cplx> got = x;
  fft(got, true);
  for (size_t i = 0; i < x.size(); ++i)
    CHECK(std::abs(got[i] - want[i]) < 1e-10);
}

TEST_CASE("forward then inverse is the identity") {
  std::vector<cplx> x = random_signal(512, 9);
  std::vector<cplx> y = x;
  fft(y, false);
  fft(y, true);
  for (size_t i = 0; i < x.size(); ++i) CHECK(std::abs(y[i] - x[i]) < 1e-12);
}

TEST_CASE("pure tone concentrates in one bin") {
  const size_t n = 64;
  std::vector<cplx> x(n);
  for (size_t t = 0; t < n; ++t) {
    double ang = 2.0 * M_PI * 5.0 * double(t) / double(n);
    x[t] = cplx(std::cos(ang), std::sin(ang));
  }
  fft(x, false);
  for (size_t k = 0; k < n; ++k) {
    if (k == 5)
      CHECK(std::abs(x[k] - cplx(double(n), 0.0)) < 1e-9);
    else
      CHECK(std::abs(x[k]) < 1e-9);
  }
}

TEST_CASE("non-power-of-two size is rejected") {
  std::vector<cplx> x(12);
  CHECK_THROWS_AS(fft(x, false), Error);
  std::vector<cplx> e;
  CHECK_THROWS_AS(fft(e, false), Error);
}

TEST_CASE("periodic hann window endpoints and midpoint") {
  std::vector<double> w = hann_window(8);
  REQUIRE(w.size() == 8);
  CHECK(w[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(w[4] == doctest::Approx(1.0).epsilon(1e-12));
  // Periodic form: w[n] = 0.5 - 0.5 cos(2 pi n / N), no symmetric endpoint.
  CHECK(w[1] == doctest::Approx(0.5 - 0.5 * std::cos(M_PI / 4.0)));
}

TEST_SUITE_END();
