// tests/test_stft.cpp

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

#include "seval/stft.hpp"
#include "test_util.hpp"

using namespace seval;
using namespace seval::testing;

TEST_SUITE("stft") {

TEST_CASE("all-zero input gives an all-zero spectrogram") {
  const Waveform w(Vec::Zero(8000), 16000);
  const ComplexSpectrogram s = stft(w);
  CHECK(s.bins.abs().maxCoeff() == 0.0);
}

TEST_CASE("default config yields 257 bins at 16 kHz") {
  const Waveform w = make_speech_like(2, 16000, 0.5);
  const ComplexSpectrogram s = stft(w);
  CHECK(s.num_bins() == 257);
  CHECK(s.config.fft_size == 512);
  CHECK(s.num_frames() == 1 + (w.size() + 2 * 256 - 512) / 256);
}

TEST_CASE("bin-centered tone concentrates frame energy near its bin") {
  // bin 40 of a 512 FFT at 16 kHz: 40 * 31.25 = 1250 Hz
  const Waveform w = make_tone(1250.0, 16000, 0.5, 0.5, false);
  const ComplexSpectrogram s = stft(w);
  const Index t = s.num_frames() / 2;
  double total = 0.0, near = 0.0;
  for (Index k = 0; k < s.num_bins(); ++k) {
    const double p = std::norm(s.bins(k, t));
    total += p;
    if (k >= 39 && k <= 41) near += p;
  }
  CHECK(near / total >= 0.9);
}

TEST_CASE("istft inverts stft to 1e-6 relative error") {
  const Waveform w = make_white_noise(5, 16000, 1.0, 0.3);
  for (const bool center : {true, false}) {
    StftConfig cfg;
    cfg.center_padding = center;
    const Waveform back = istft(stft(w, cfg));
    REQUIRE(back.size() == w.size());
    // without centering the first/last window tails lack full overlap
    const Index skip = center ? 0 : cfg.win_length;
    const Index n = w.size() - 2 * skip;
    const double err =
        std::sqrt((back.samples.segment(skip, n) - w.samples.segment(skip, n))
                      .square()
                      .sum());
    const double ref = std::sqrt(w.samples.segment(skip, n).square().sum());
    CHECK(err / ref <= 1e-6);
  }
}

TEST_CASE("zero spectrogram inverts to a zero waveform") {
  const Waveform w = make_tone(500.0, 16000, 0.3);
  ComplexSpectrogram s = stft(w);
  s.bins.setZero();
  const Waveform back = istft(s);
  CHECK(back.samples.abs().maxCoeff() == 0.0);
}

TEST_CASE("hop equal to the window length is not invertible for hann") {
  const Waveform w = make_tone(500.0, 16000, 0.5);
  StftConfig cfg;
  cfg.hop = 512;
  cfg.win_length = 512;
  cfg.fft_size = 512;
  const ComplexSpectrogram s = stft(w, cfg);
  try {
    istft(s);
    FAIL("expected NonColaConfig");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNonColaConfig);
  }
}

TEST_CASE("input shorter than the window throws InputTooShort") {
  StftConfig cfg;
  cfg.center_padding = false;
  try {
    stft(Waveform(Vec::Zero(100), 16000), cfg);
    FAIL("expected InputTooShort");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInputTooShort);
  }
}

TEST_CASE("stft is linear in its input") {
  const Waveform x = make_speech_like(7, 16000, 0.4);
  const Waveform y = make_white_noise(8, 16000, 0.4, 0.2);
  const double a = 0.7, b = -1.3;
  const Waveform mix(a * x.samples + b * y.samples, 16000);
  const CplxMat lhs = stft(mix).bins;
  const CplxMat rhs = a * stft(x).bins + b * stft(y).bins;
  const double err = (lhs - rhs).abs().maxCoeff();
  const double ref = rhs.abs().maxCoeff();
  CHECK(err / ref < 1e-9);
}

TEST_CASE("Parseval: spectrogram energy matches window-weighted energy") {
  const Waveform w = make_white_noise(21, 16000, 0.7, 0.25);
  for (const int hop : {128, 256}) {
    StftConfig cfg;
    cfg.hop = hop;
    const ComplexSpectrogram s = stft(w, cfg);

    double spec_energy = 0.0;
    for (Index t = 0; t < s.num_frames(); ++t) {
      for (Index k = 0; k < s.num_bins(); ++k) {
        const double p = std::norm(s.bins(k, t));
        const bool interior = k != 0 && k != s.num_bins() - 1;
        spec_energy += interior ? 2.0 * p : p;  // one-sided correction
      }
    }
    spec_energy /= cfg.fft_size;

    // time-domain side: sum of x^2 weighted by the squared-window overlap
    const Vec window = make_window(cfg.window, cfg.win_length);
    const Index pad = cfg.fft_size / 2;
    Vec overlap = Vec::Zero(w.size() + 2 * pad);
    for (Index t = 0; t < s.num_frames(); ++t)
      for (int i = 0; i < cfg.win_length; ++i)
        overlap[t * cfg.hop + i] += window[i] * window[i];
    double time_energy = 0.0;
    for (Index i = 0; i < w.size(); ++i)
      time_energy += w.samples[i] * w.samples[i] * overlap[i + pad];

    CHECK(spec_energy ==
          doctest::Approx(time_energy).epsilon(1e-6));
  }
}

}  // TEST_SUITE
