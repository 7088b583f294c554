// tests/test_util.hpp

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

#ifndef SEVAL_TESTS_TEST_UTIL_HPP_
#define SEVAL_TESTS_TEST_UTIL_HPP_

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "seval/rng.hpp"
#include "seval/stft.hpp"
#include "seval/types.hpp"

namespace seval::testing {

inline Waveform make_tone(double freq_hz, int sr, double seconds,
                          double amp = 0.5, bool fade = true) {
  const Index n = static_cast<Index>(std::llround(seconds * sr));
  Vec x(n);
  for (Index i = 0; i < n; ++i)
    x[i] = amp * std::sin(2.0 * M_PI * freq_hz * i / sr);
  if (fade) {
    const Index f = std::min<Index>(n / 8, sr / 100);
    for (Index i = 0; i < f; ++i) {
      const double g = 0.5 * (1.0 - std::cos(M_PI * i / f));
      x[i] *= g;
      x[n - 1 - i] *= g;
    }
  }
  return Waveform(std::move(x), sr);
}

inline Waveform make_white_noise(std::uint64_t seed, int sr, double seconds,
                                 double amp = 0.1) {
  Xoshiro256StarStar rng(seed);
  const Index n = static_cast<Index>(std::llround(seconds * sr));
  Vec x(n);
  for (Index i = 0; i < n; ++i) x[i] = amp * rng.next_gaussian();
  return Waveform(std::move(x), sr);
}

/// Band-limited sawtooth-like periodic source: harmonics of f0 with 1/k
/// amplitude rolloff up to max_hz.
inline Waveform make_sawtooth(double f0_hz, int sr, double seconds,
                              double amp = 0.4, double max_hz = 5000.0) {
  const Index n = static_cast<Index>(std::llround(seconds * sr));
  Vec x = Vec::Zero(n);
  const int harmonics =
      static_cast<int>(std::floor(std::min(max_hz, 0.45 * sr) / f0_hz));
  for (int k = 1; k <= harmonics; ++k)
    for (Index i = 0; i < n; ++i)
      x[i] += std::sin(2.0 * M_PI * k * f0_hz * i / sr) / k;
  x *= amp / x.abs().maxCoeff();
  return Waveform(std::move(x), sr);
}

/// Speech-shaped fixture: pitch-modulated harmonic source with formant-like
/// spectral envelope, syllabic amplitude modulation, and a broadband noise
/// floor so every auditory band carries energy.
inline Waveform make_speech_like(std::uint64_t seed, int sr, double seconds,
                                 double amp = 0.3) {
  Xoshiro256StarStar rng(seed);
  const Index n = static_cast<Index>(std::llround(seconds * sr));
  const double f0_base = 100.0 + rng.uniform(0.0, 60.0);
  const double vibrato_hz = 2.0 + rng.uniform(0.0, 2.0);
  const double am_hz = 2.5 + rng.uniform(0.0, 1.5);
  const double formants[3] = {500.0 + rng.uniform(-80.0, 80.0),
                              1500.0 + rng.uniform(-200.0, 200.0),
                              2500.0 + rng.uniform(-300.0, 300.0)};

  Vec x = Vec::Zero(n);
  double phase = 0.0;
  const int harmonics = static_cast<int>(std::floor(4500.0 / f0_base));
  std::vector<double> hphase(static_cast<std::size_t>(harmonics) + 1, 0.0);
  for (Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sr;
    const double f0 = f0_base * (1.0 + 0.03 * std::sin(2.0 * M_PI * vibrato_hz * t));
    phase += 2.0 * M_PI * f0 / sr;
    double v = 0.0;
    for (int k = 1; k <= harmonics; ++k) {
      const double fk = k * f0;
      if (fk > 0.45 * sr) break;
      double gain = 0.0;
      for (double fc : formants) {
        const double d = (fk - fc) / 300.0;
        gain += std::exp(-0.5 * d * d);
      }
      v += (gain + 0.05) / k * std::sin(k * phase);
    }
    const double am = 0.55 + 0.45 * std::sin(2.0 * M_PI * am_hz * t);
    x[i] = am * v;
  }
  x *= amp / x.abs().maxCoeff();
  for (Index i = 0; i < n; ++i) x[i] += 2e-4 * rng.next_gaussian();
  return Waveform(std::move(x), sr);
}

/// Adds seeded white noise at the requested SNR relative to the input power.
inline Waveform add_noise_at_snr(const Waveform& clean, std::uint64_t seed,
                                 double snr_db) {
  Xoshiro256StarStar rng(seed);
  const double p_clean = clean.samples.square().mean();
  const double p_noise = p_clean / std::pow(10.0, snr_db / 10.0);
  const double sigma = std::sqrt(p_noise);
  Vec out = clean.samples;
  for (Index i = 0; i < out.size(); ++i) out[i] += sigma * rng.next_gaussian();
  return Waveform(std::move(out), clean.sample_rate_hz);
}

/// FFT-peak frequency oracle with parabolic interpolation on the dB
/// spectrum; resolution well under 1 Hz for seconds-long inputs.
inline double fft_peak_hz(const Waveform& w) {
  Index nfft = 1;
  while (nfft < 4 * w.size()) nfft <<= 1;
  const CplxVec spec = rfft(w.samples, static_cast<int>(nfft));
  Index best = 1;
  double best_mag = 0.0;
  for (Index k = 1; k + 1 < spec.size(); ++k) {
    const double m = std::abs(spec[k]);
    if (m > best_mag) {
      best_mag = m;
      best = k;
    }
  }
  const double y1 = 20.0 * std::log10(std::abs(spec[best - 1]) + 1e-30);
  const double y2 = 20.0 * std::log10(std::abs(spec[best]) + 1e-30);
  const double y3 = 20.0 * std::log10(std::abs(spec[best + 1]) + 1e-30);
  const double denom = y1 - 2.0 * y2 + y3;
  const double d = std::abs(denom) > 1e-12 ? 0.5 * (y1 - y3) / denom : 0.0;
  return (static_cast<double>(best) + d) * w.sample_rate_hz /
         static_cast<double>(nfft);
}

/// Pulse train through cascaded two-pole resonators; a crude vowel with
/// known resonance frequencies.
inline Waveform make_resonator_vowel(int sr, double seconds, double f1,
                                     double f2, double f0 = 100.0,
                                     double bw = 80.0) {
  const Index n = static_cast<Index>(std::llround(seconds * sr));
  Vec x = Vec::Zero(n);
  const Index period = static_cast<Index>(std::llround(sr / f0));
  for (Index i = 0; i < n; i += period) x[i] = 1.0;

  for (double fc : {f1, f2}) {
    const double r = std::exp(-M_PI * bw / sr);
    const double a1 = -2.0 * r * std::cos(2.0 * M_PI * fc / sr);
    const double a2 = r * r;
    double z1 = 0.0, z2 = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double y = x[i] - a1 * z1 - a2 * z2;
      z2 = z1;
      z1 = y;
      x[i] = y;
    }
  }
  x *= 0.5 / x.abs().maxCoeff();
  return Waveform(std::move(x), sr);
}

/// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("seval_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& rel = "") const {
    return rel.empty() ? path_.string() : (path_ / rel).string();
  }

 private:
  std::filesystem::path path_;
};

inline std::string read_text_file(const std::filesystem::path& p) {
  std::ifstream is(p);
  return std::string((std::istreambuf_iterator<char>(is)),
                     std::istreambuf_iterator<char>());
}

}  // namespace seval::testing

#endif  // SEVAL_TESTS_TEST_UTIL_HPP_
