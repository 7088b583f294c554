// tests/test_resample.cpp

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

#include "seval/resample.hpp"
#include "test_util.hpp"

using namespace seval;
using namespace seval::testing;

namespace {

// Band-limited multi-sine with smooth fades; content stays below max_hz.
Waveform band_limited_fixture(int sr, double seconds, double max_hz,
                              std::uint64_t seed) {
  Xoshiro256StarStar rng(seed);
  const Index n = static_cast<Index>(std::llround(seconds * sr));
  Vec x = Vec::Zero(n);
  for (int c = 0; c < 12; ++c) {
    const double f = rng.uniform(60.0, max_hz);
    const double a = rng.uniform(0.02, 0.1);
    const double p = rng.uniform(0.0, 2.0 * M_PI);
    for (Index i = 0; i < n; ++i)
      x[i] += a * std::sin(2.0 * M_PI * f * i / sr + p);
  }
  for (Index i = 0; i < n; ++i)  // full-length hann fade: no edge steps
    x[i] *= 0.5 * (1.0 - std::cos(2.0 * M_PI * i / n));
  return Waveform(std::move(x), sr);
}

}  // namespace

TEST_SUITE("resample") {

TEST_CASE("same rate is the identity") {
  const Waveform w = make_speech_like(1, 16000, 0.3);
  const Waveform out = resample(w, 16000);
  CHECK(out.size() == w.size());
  CHECK((out.samples - w.samples).abs().maxCoeff() == 0.0);
}

TEST_CASE("output length is round(n * target / source)") {
  const Waveform w = make_tone(440.0, 48000, 0.5);
  CHECK(resample(w, 16000).size() == 8000);
  CHECK(resample(w, 44100).size() ==
        static_cast<Index>(std::llround(24000.0 * 44100 / 48000)));
}

TEST_CASE("440 Hz tone at 48 kHz keeps its frequency at 16 kHz") {
  const Waveform w = make_tone(440.0, 48000, 2.0, 0.5);
  const Waveform down = resample(w, 16000);
  CHECK(down.sample_rate_hz == 16000);
  const double peak = fft_peak_hz(down);
  CHECK(std::abs(peak - 440.0) <= 1.0);
}

TEST_CASE("16k -> 48k -> 16k roundtrip keeps relative L2 error small") {
  const Waveform w = band_limited_fixture(16000, 1.0, 3500.0, 11);
  const Waveform up = resample(w, 48000);
  const Waveform back = resample(up, 16000);
  REQUIRE(back.size() == w.size());
  const double err = std::sqrt((back.samples - w.samples).square().sum());
  const double ref = std::sqrt(w.samples.square().sum());
  CHECK(err / ref <= 1e-3);
}

TEST_CASE("tone frequencies below 0.45 Nyquist survive typical conversions") {
  struct Conversion {
    int from, to;
    double tone;
  };
  for (const Conversion c : {Conversion{16000, 8000, 1000.0},
                             Conversion{16000, 10000, 1700.0},
                             Conversion{44100, 16000, 2500.0},
                             Conversion{8000, 16000, 1500.0}}) {
    const Waveform w = make_tone(c.tone, c.from, 2.0, 0.4);
    const double peak = fft_peak_hz(resample(w, c.to));
    CHECK(std::abs(peak - c.tone) <= 1.0);
  }
}

TEST_CASE("invalid target rate throws") {
  const Waveform w = make_tone(440.0, 16000, 0.1);
  CHECK_THROWS_AS(resample(w, 0), Error);
  CHECK_THROWS_AS(resample(w, -8000), Error);
}

}  // TEST_SUITE
