// tests/test_losses.cpp

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

#include "seval/losses.hpp"
#include "test_util.hpp"

using namespace seval;
using namespace seval::testing;

namespace {

CplxMat random_grid(Index rows, Index cols, std::uint64_t seed, double scale) {
  Xoshiro256StarStar rng(seed);
  CplxMat m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r)
      m(r, c) = {scale * rng.next_gaussian(), scale * rng.next_gaussian()};
  return m;
}

ComplexSpectrogram as_spec(CplxMat bins) {
  ComplexSpectrogram s;
  s.bins = std::move(bins);
  s.sample_rate_hz = 16000;
  s.signal_length = 0;
  return s;
}

TapMatrix random_tap(Index frames, std::uint64_t seed) {
  Xoshiro256StarStar rng(seed);
  TapMatrix m;
  m.values = Mat(frames, kNumTapParams);
  m.valid = BoolMat::Constant(frames, kNumTapParams, true);
  for (Index t = 0; t < frames; ++t)
    for (int p = 0; p < kNumTapParams; ++p)
      m.values(t, p) = rng.uniform(-5.0, 5.0);
  return m;
}

CirmMask random_compressed_mask(Index rows, Index cols, std::uint64_t seed) {
  Xoshiro256StarStar rng(seed);
  CirmMask m;
  m.values.resize(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r)
      m.values(r, c) = {rng.uniform(-9.0, 9.0), rng.uniform(-9.0, 9.0)};
  m.compressed = true;
  return m;
}

}  // namespace

TEST_SUITE("losses") {

TEST_CASE("l1 loss basics") {
  const Waveform y = make_speech_like(1, 16000, 0.3);
  CHECK(l1_loss(y, y) == 0.0);

  Waveform off(y.samples + 0.1, 16000);
  CHECK(l1_loss(y, off) == doctest::Approx(0.1).epsilon(1e-12));

  const Waveform z = make_white_noise(2, 16000, 0.3, 0.2);
  double brute = 0.0;
  for (Index i = 0; i < y.size(); ++i)
    brute += std::abs(y.samples[i] - z.samples[i]);
  brute /= static_cast<double>(y.size());
  CHECK(std::abs(l1_loss(y, z) - brute) < 1e-12);

  CHECK_THROWS_AS(l1_loss(y, make_tone(100.0, 16000, 0.1)), Error);
}

TEST_CASE("mrstft loss identities") {
  const Waveform y = make_speech_like(3, 16000, 0.6);
  CHECK(mrstft_loss(y, y) == 0.0);

  const Waveform neg(-y.samples, 16000);
  CHECK(mrstft_loss(y, neg) == 0.0);  // magnitudes are sign-blind
  CHECK(l1_loss(y, neg) > 0.0);
}

TEST_CASE("mrstft equals the per-resolution sum computed independently") {
  const Waveform y = make_speech_like(4, 16000, 0.6);
  const Waveform h(0.5 * y.samples, 16000);

  double expected = 0.0;
  for (const MrStftResolution& r : default_mrstft_resolutions()) {
    StftConfig cfg;
    cfg.fft_size = r.fft_size;
    cfg.hop = r.hop;
    cfg.win_length = r.win_length;
    const Mat my = magnitude(stft(y, cfg));
    const Mat mh = magnitude(stft(h, cfg));
    const double sc =
        std::sqrt((my - mh).square().sum()) / std::sqrt(my.square().sum());
    const double lm = ((my + 1e-7).log() - (mh + 1e-7).log()).abs().mean();
    expected += sc + lm;
  }
  CHECK(mrstft_loss(y, h) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("demucs loss weight algebra") {
  const Waveform y = make_speech_like(5, 16000, 0.5);
  const Waveform h = add_noise_at_snr(y, 6, 15.0);

  LossWeights zero;
  zero.lambda1 = 0.0;
  zero.lambda2 = 0.0;
  const LossBreakdown base = demucs_loss(y, h, zero);
  CHECK(base.total == base.l1);
  CHECK(base.l1 == l1_loss(y, h));

  LossWeights stft_only = zero;
  stft_only.lambda2 = 1.0;
  const LossBreakdown with_stft = demucs_loss(y, h, stft_only);
  CHECK(with_stft.total - base.total ==
        doctest::Approx(mrstft_loss(y, h)).epsilon(1e-9));

  // the reported best configuration is accepted and combined linearly
  LossWeights best;
  best.lambda1 = 0.75;
  best.lambda2 = 0.5;
  const LossBreakdown b = demucs_loss(y, h, best);
  CHECK(b.total ==
        doctest::Approx(b.l1 + 0.75 * b.tap + 0.5 * b.stft).epsilon(1e-12));
  CHECK(b.l1 >= 0.0);
  CHECK(b.tap >= 0.0);
  CHECK(b.stft >= 0.0);
}

TEST_CASE("cirm identity and null masks") {
  const ComplexSpectrogram y = as_spec(random_grid(64, 12, 7, 1.0));
  CirmMask identity = cirm_from_specs(y, y);
  for (Index c = 0; c < identity.values.cols(); ++c)
    for (Index r = 0; r < identity.values.rows(); ++r)
      if (std::norm(y.bins(r, c)) >= kCirmEnergyFloor) {
        CHECK(std::abs(identity.values(r, c).real() - 1.0) < 1e-12);
        CHECK(std::abs(identity.values(r, c).imag()) < 1e-12);
      }

  ComplexSpectrogram zero = y;
  zero.bins.setZero();
  const CirmMask null_mask = cirm_from_specs(y, zero);
  CHECK(null_mask.values.abs().maxCoeff() == 0.0);
}

TEST_CASE("ideal mask reconstructs the clean spectrogram") {
  const ComplexSpectrogram y = as_spec(random_grid(257, 50, 8, 1.0));
  const ComplexSpectrogram s = as_spec(random_grid(257, 50, 9, 0.7));
  const CirmMask m = cirm_from_specs(y, s);
  const ComplexSpectrogram rebuilt = apply_cirm(y, m);
  for (Index c = 0; c < y.bins.cols(); ++c)
    for (Index r = 0; r < y.bins.rows(); ++r) {
      if (std::norm(y.bins(r, c)) < kCirmEnergyFloor) continue;
      const double err = std::abs(rebuilt.bins(r, c) - s.bins(r, c));
      CHECK(err <= 1e-6 * std::abs(s.bins(r, c)) + 1e-12);
    }

  // mask semantics of apply
  CirmMask ones = m;
  ones.values.setConstant({1.0, 0.0});
  const ComplexSpectrogram same = apply_cirm(y, ones);
  CHECK((same.bins - y.bins).abs().maxCoeff() == 0.0);
}

TEST_CASE("cirm compression is tanh-shaped, bounded, and invertible") {
  CirmMask m;
  m.values.resize(1, 5);
  m.values(0, 0) = {0.0, 0.0};
  m.values(0, 1) = {1000.0, -1000.0};
  m.values(0, 2) = {50.0, -50.0};
  m.values(0, 3) = {0.3, -2.7};
  m.values(0, 4) = {9.9, -9.9};
  const CirmMask c = compress_cirm(m);

  CHECK(c.values(0, 0).real() == 0.0);       // odd function fixes 0
  CHECK(c.values(0, 1).real() >= 9.99);      // saturates toward K = 10
  CHECK(c.values(0, 1).imag() <= -9.99);
  CHECK(c.values.real().abs().maxCoeff() < 10.0);
  CHECK(c.values.imag().abs().maxCoeff() < 10.0);

  const CirmMask back = decompress_cirm(c);
  for (Index i = 0; i < 5; ++i) {
    if (std::abs(m.values(0, i).real()) <= 50.0)
      CHECK(std::abs(back.values(0, i).real() - m.values(0, i).real()) < 1e-9);
    if (std::abs(m.values(0, i).imag()) <= 50.0)
      CHECK(std::abs(back.values(0, i).imag() - m.values(0, i).imag()) < 1e-9);
  }

  CHECK_THROWS_AS(compress_cirm(c), Error);       // AlreadyCompressed
  CHECK_THROWS_AS(decompress_cirm(m), Error);     // UncompressedInput

  CirmMask at_k = c;
  at_k.values(0, 0) = {10.0, 0.0};
  try {
    decompress_cirm(at_k);
    FAIL("expected OutOfDomain");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kOutOfDomain);
  }
}

TEST_CASE("cirm loss is a joint MSE over mask components") {
  const CirmMask a = random_compressed_mask(6, 4, 10);
  CHECK(cirm_loss(a, a) == 0.0);

  CirmMask shifted = a;
  for (Index c = 0; c < shifted.values.cols(); ++c)
    for (Index r = 0; r < shifted.values.rows(); ++r)
      shifted.values(r, c) += 0.5;  // +0.5 on real parts only
  CHECK(cirm_loss(a, shifted) == doctest::Approx(0.125).epsilon(1e-12));

  const CirmMask b = random_compressed_mask(6, 4, 11);
  double brute = 0.0;
  for (Index c = 0; c < a.values.cols(); ++c)
    for (Index r = 0; r < a.values.rows(); ++r) {
      const std::complex<double> d = a.values(r, c) - b.values(r, c);
      brute += d.real() * d.real() + d.imag() * d.imag();
    }
  brute /= 2.0 * static_cast<double>(a.values.size());
  CHECK(std::abs(cirm_loss(a, b) - brute) < 1e-12);

  CirmMask raw = a;
  raw.compressed = false;
  CHECK_THROWS_AS(cirm_loss(raw, b), Error);
}

TEST_CASE("tap loss follows the MAE formula") {
  const TapMatrix a = random_tap(7, 12);
  CHECK(tap_loss(a, a) == 0.0);

  TapMatrix plus_one = a;
  plus_one.values += 1.0;
  CHECK(tap_loss(a, plus_one) == doctest::Approx(1.0).epsilon(1e-12));

  const TapMatrix b = random_tap(7, 13);
  double brute = 0.0;
  for (Index t = 0; t < 7; ++t)
    for (int p = 0; p < kNumTapParams; ++p)
      brute += std::abs(a.values(t, p) - b.values(t, p));
  brute /= 7.0 * kNumTapParams;
  CHECK(std::abs(tap_loss(a, b) - brute) < 1e-12);

  const TapMatrix c = random_tap(8, 14);
  CHECK_THROWS_AS(tap_loss(a, c), Error);
}

TEST_CASE("masked tap loss ignores invalid cells") {
  TapMatrix a = random_tap(5, 15);
  TapMatrix b = random_tap(5, 16);
  a.valid.setConstant(false);
  a.valid(0, 0) = true;
  b.valid.setConstant(true);
  const double expected = std::abs(a.values(0, 0) - b.values(0, 0));
  CHECK(tap_loss_masked(a, b) == doctest::Approx(expected));

  b.valid.setConstant(false);
  CHECK_THROWS_AS(tap_loss_masked(a, b), Error);
}

TEST_CASE("fullsubnet loss weight algebra") {
  const CirmMask pred = random_compressed_mask(32, 10, 20);
  const CirmMask target = random_compressed_mask(32, 10, 21);
  const TapMatrix a = random_tap(9, 22);
  const TapMatrix b = random_tap(9, 23);

  LossWeights w;
  w.gamma = 0.0;
  const LossBreakdown zero = fullsubnet_loss(pred, target, a, b, w);
  CHECK(zero.total == zero.cirm);
  CHECK(zero.cirm == cirm_loss(pred, target));

  w.gamma = 1.0;
  const LossBreakdown one = fullsubnet_loss(pred, target, a, b, w);
  CHECK(one.total - zero.total == doctest::Approx(tap_loss(a, b)).epsilon(1e-9));

  w.gamma = 0.03;  // the reported best configuration
  const LossBreakdown best = fullsubnet_loss(pred, target, a, b, w);
  CHECK(best.total ==
        doctest::Approx(best.cirm + 0.03 * best.tap).epsilon(1e-12));
}

TEST_CASE("losses are nonnegative on random inputs") {
  for (std::uint64_t s = 0; s < 4; ++s) {
    const Waveform y = make_speech_like(100 + s, 16000, 0.4);
    const Waveform h = add_noise_at_snr(y, 200 + s, 5.0);
    CHECK(l1_loss(y, h) >= 0.0);
    CHECK(mrstft_loss(y, h) >= 0.0);
    CHECK(tap_loss(random_tap(6, 300 + s), random_tap(6, 400 + s)) >= 0.0);
  }
}

}  // TEST_SUITE
