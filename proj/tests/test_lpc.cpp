// tests/test_lpc.cpp

// Copyright 2026  The seval authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <Eigen/Dense>

#include "seval/lpc.hpp"
#include "test_util.hpp"

using namespace seval;
using namespace seval::testing;

namespace {

// AR process driven by seeded unit-variance noise, burn-in discarded.
Vec make_ar_process(const std::vector<double>& ar, Index n, std::uint64_t seed) {
  Xoshiro256StarStar rng(seed);
  const Index burn = 512;
  Vec x = Vec::Zero(n + burn);
  for (Index i = 0; i < n + burn; ++i) {
    double v = rng.next_gaussian();
    for (std::size_t k = 0; k < ar.size(); ++k)
      if (i > static_cast<Index>(k)) v += ar[k] * x[i - 1 - static_cast<Index>(k)];
    x[i] = v;
  }
  return x.tail(n);
}

}  // namespace

TEST_SUITE("lpc") {

TEST_CASE("known AR(2) process is recovered") {
  const Vec x = make_ar_process({1.5, -0.7}, 4096, 42);
  const LpcResult r = lpc_coefficients(x, 2);
  REQUIRE(r.coeffs.size() == 3);
  CHECK(r.coeffs[0] == 1.0);
  CHECK(std::abs(r.coeffs[1] - (-1.5)) < 0.05);
  CHECK(std::abs(r.coeffs[2] - 0.7) < 0.05);
  CHECK(r.error_power >= 0.0);
}

TEST_CASE("all-zero frame is DegenerateFrame") {
  try {
    lpc_coefficients(Vec::Zero(256), 8);
    FAIL("expected DegenerateFrame");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateFrame);
  }
}

TEST_CASE("white noise offers at most ~1 dB of prediction gain") {
  const Waveform noise = make_white_noise(9, 16000, 0.3, 0.5);
  const Vec r = autocorrelation(noise.samples, 10);
  const LpcResult lpc = levinson_durbin(r, 10);
  const double gain_db = 10.0 * std::log10(r[0] / lpc.error_power);
  CHECK(gain_db >= 0.0);
  CHECK(gain_db <= 1.0);
}

TEST_CASE("Levinson-Durbin matches the direct normal-equation solve") {
  for (const std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const Vec x = make_ar_process({0.9, -0.5, 0.2}, 2048, seed);
    for (const int order : {4, 8, 12}) {
      const Vec r = autocorrelation(x, order);
      const LpcResult fast = levinson_durbin(r, order);

      Eigen::MatrixXd toeplitz(order, order);
      Eigen::VectorXd rhs(order);
      for (int i = 0; i < order; ++i) {
        rhs[i] = -r[i + 1];
        for (int j = 0; j < order; ++j) toeplitz(i, j) = r[std::abs(i - j)];
      }
      const Eigen::VectorXd direct = toeplitz.fullPivLu().solve(rhs);
      for (int i = 0; i < order; ++i)
        CHECK(std::abs(fast.coeffs[i + 1] - direct[i]) < 1e-8);
    }
  }
}

TEST_CASE("a single resonator shows up in the LPC root angles") {
  const Waveform vowel = make_resonator_vowel(16000, 0.5, 800.0, 2200.0);
  // 25 ms frame from the middle
  const Vec frame = vowel.samples.segment(4000, 400);
  const LpcResult lpc = lpc_coefficients(frame, 12);
  const std::vector<Resonance> res = lpc_resonances(lpc.coeffs, 16000);
  REQUIRE(!res.empty());
  bool near_800 = false, near_2200 = false;
  for (const Resonance& r : res) {
    if (std::abs(r.frequency_hz - 800.0) < 80.0) near_800 = true;
    if (std::abs(r.frequency_hz - 2200.0) < 120.0) near_2200 = true;
  }
  CHECK(near_800);
  CHECK(near_2200);
}

TEST_CASE("order must be below the frame length") {
  CHECK_THROWS_AS(lpc_coefficients(Vec::Ones(8), 8), Error);
  CHECK_THROWS_AS(lpc_coefficients(Vec::Ones(8), 0), Error);
}

}  // TEST_SUITE
