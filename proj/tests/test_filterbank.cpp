// tests/test_filterbank.cpp

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

#include "seval/filterbank.hpp"
#include "seval/iir.hpp"
#include "test_util.hpp"

using namespace seval;
using namespace seval::testing;

TEST_SUITE("filterbank") {

TEST_CASE("one-third-octave centers follow 150 * 2^(j/3)") {
  const FilterBank fb = third_octave_filterbank(10000, 512);
  REQUIRE(fb.num_bands() == 15);
  CHECK(fb.center_hz[0] == doctest::Approx(150.0));
  CHECK(fb.center_hz[14] ==
        doctest::Approx(150.0 * std::pow(2.0, 14.0 / 3.0)));
  CHECK(fb.center_hz[14] == doctest::Approx(3809.76).epsilon(1e-3));
}

TEST_CASE("one-third-octave bands partition the covered bins exactly once") {
  const FilterBank fb = third_octave_filterbank(10000, 512);
  const double bin_hz = 10000.0 / 512;
  const double lo = 150.0 * std::pow(2.0, -1.0 / 6.0);
  const double hi = 150.0 * std::pow(2.0, 14.0 / 3.0 + 1.0 / 6.0);
  for (Index k = 0; k < fb.weights.cols(); ++k) {
    const double f = k * bin_hz;
    const double cover = fb.weights.col(k).sum();
    if (f >= lo && f < hi) {
      CHECK(cover == 1.0);
    } else {
      CHECK(cover == 0.0);
    }
  }
}

TEST_CASE("erb bank has monotone edges, positive support, unit importance") {
  const FilterBank fb = erb_filterbank(16000, 512, 20, 150.0, 7000.0);
  REQUIRE(fb.num_bands() == 20);
  for (Index b = 0; b < fb.num_bands(); ++b) {
    CHECK(fb.lo_hz[b] < fb.hi_hz[b]);
    if (b > 0) CHECK(fb.lo_hz[b] == doctest::Approx(fb.hi_hz[b - 1]));
    CHECK(fb.weights.row(b).sum() > 0.0);  // nonzero support
    CHECK(fb.weights.row(b).minCoeff() >= 0.0);
  }
  CHECK(fb.importance.sum() == doctest::Approx(1.0));
  CHECK(hz_to_erb_rate(erb_rate_to_hz(10.0)) == doctest::Approx(10.0));
}

TEST_CASE("band envelope of a steady in-band tone is flat") {
  const Waveform w = make_tone(1000.0, 16000, 1.5, 0.4, false);
  const FilterBank fb = erb_filterbank(16000, 512, 20, 150.0, 7000.0);
  const Mat env = band_envelope(w, fb);
  // the band containing 1 kHz
  Index band = 0;
  for (Index b = 0; b < fb.num_bands(); ++b)
    if (fb.lo_hz[b] <= 1000.0 && 1000.0 < fb.hi_hz[b]) band = b;
  const Index t0 = env.cols() / 4, t1 = 3 * env.cols() / 4;
  const Vec mid = env.row(band).segment(t0, t1 - t0);
  const double mean = mid.mean();
  REQUIRE(mean > 0.0);
  CHECK((mid - mean).abs().maxCoeff() / mean < 0.05);
}

TEST_CASE("4 Hz amplitude modulation lands at 4 Hz in the envelope spectrum") {
  const int sr = 16000;
  const Index n = 4 * sr;
  Vec x(n);
  for (Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sr;
    x[i] = 0.4 * (1.0 + 0.8 * std::sin(2.0 * M_PI * 4.0 * t)) *
           std::sin(2.0 * M_PI * 1000.0 * t);
  }
  const FilterBank fb = erb_filterbank(sr, 512, 20, 150.0, 7000.0);
  const Mat env = band_envelope(Waveform(x, sr), fb);  // 100 Hz frame rate
  Index band = 0;
  for (Index b = 0; b < fb.num_bands(); ++b)
    if (fb.lo_hz[b] <= 1000.0 && 1000.0 < fb.hi_hz[b]) band = b;

  Vec e = env.row(band);
  e -= e.mean();
  const Waveform env_wave(e, 100);
  const double peak = fft_peak_hz(env_wave);
  CHECK(std::abs(peak - 4.0) <= 0.5);
}

TEST_CASE("silence produces zero envelopes") {
  const Waveform w(Vec::Zero(16000), 16000);
  const FilterBank fb = erb_filterbank(16000, 512, 20, 150.0, 7000.0);
  const Mat env = band_envelope(w, fb);
  CHECK(env.abs().maxCoeff() == 0.0);
}

TEST_CASE("butterworth biquads have the textbook -3 dB point") {
  const int sr = 16000;
  for (const double fc : {25.0, 300.0, 3400.0}) {
    for (const bool high : {false, true}) {
      const BiquadCascade sos = high ? butterworth_highpass(4, fc, sr)
                                     : butterworth_lowpass(4, fc, sr);
      // measure |H| at fc via a long probe tone
      const Waveform probe = make_tone(fc, sr, 2.0, 0.5, false);
      const Vec out = iir_filter(sos, probe.samples);
      const Index skip = out.size() / 2;
      const double g = std::sqrt(out.tail(skip).square().mean() /
                                 probe.samples.tail(skip).square().mean());
      CHECK(20.0 * std::log10(g) == doctest::Approx(-3.01).epsilon(0.05));
    }
  }
}

}  // TEST_SUITE
