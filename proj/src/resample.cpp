// seval/resample.cpp

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

#include "seval/resample.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace seval {

namespace {

// Zeroth-order modified Bessel function of the first kind (power series).
double bessel_i0(double x) {
  double sum = 1.0, term = 1.0;
  const double x2 = 0.25 * x * x;
  for (int k = 1; k < 64; ++k) {
    term *= x2 / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = M_PI * x;
  return std::sin(px) / px;
}

}  // namespace

Waveform resample(const Waveform& w, int target_hz) {
  if (target_hz <= 0)
    throw Error(ErrorCode::kInvalidArgument, "target rate must be positive");
  if (w.size() == 0) throw Error(ErrorCode::kEmptyAudio, "resample");
  if (target_hz == w.sample_rate_hz) return w;

  const int g = std::gcd(target_hz, w.sample_rate_hz);
  const long up = target_hz / g;      // L
  const long down = w.sample_rate_hz / g;  // M
  const Index n_in = w.size();
  const Index n_out = static_cast<Index>(
      std::llround(static_cast<double>(n_in) * target_hz / w.sample_rate_hz));

  // Anti-alias/anti-image cutoff in source-rate cycles per sample, kept a
  // little inside the tighter Nyquist. Kaiser beta 9 gives ~90 dB stopband.
  const double ratio = static_cast<double>(up) / down;
  const double cutoff = 0.5 * std::min(1.0, ratio) * 0.945;
  const double beta = 9.0;
  // Sinc half-width in source samples; widen when downsampling so the
  // transition band stays narrow relative to the output Nyquist.
  const int half_width =
      static_cast<int>(std::ceil(48.0 * std::max(1.0, 1.0 / ratio)));
  const double inv_i0_beta = 1.0 / bessel_i0(beta);

  // Polyphase: output sample n sits at source offset (n*M)/L; the fractional
  // part (n*M mod L)/L cycles through L values, one tap set per phase.
  std::vector<std::vector<double>> phase_taps(static_cast<std::size_t>(up));
  for (long p = 0; p < up; ++p) {
    const double frac = static_cast<double>(p) / up;
    auto& taps = phase_taps[static_cast<std::size_t>(p)];
    taps.resize(2 * static_cast<std::size_t>(half_width) + 1);
    for (int j = -half_width; j <= half_width; ++j) {
      const double u = static_cast<double>(j) - frac;
      const double window_arg = u / half_width;
      double win = 0.0;
      if (std::abs(window_arg) <= 1.0)
        win = bessel_i0(beta * std::sqrt(1.0 - window_arg * window_arg)) *
              inv_i0_beta;
      taps[static_cast<std::size_t>(j + half_width)] =
          2.0 * cutoff * sinc(2.0 * cutoff * u) * win;
    }
    // Normalize DC gain to exactly 1 per phase.
    double s = 0.0;
    for (double t : taps) s += t;
    for (double& t : taps) t /= s;
  }

  Vec out(n_out);
  for (Index n = 0; n < n_out; ++n) {
    const long num = static_cast<long>(n) * down;
    const Index i0 = static_cast<Index>(num / up);
    const auto& taps = phase_taps[static_cast<std::size_t>(num % up)];
    double acc = 0.0;
    for (int j = -half_width; j <= half_width; ++j) {
      const Index k = i0 + j;
      if (k < 0 || k >= n_in) continue;  // zeros outside the signal
      acc += w.samples[k] * taps[static_cast<std::size_t>(j + half_width)];
    }
    out[n] = acc;
  }
  return Waveform(std::move(out), target_hz);
}

Waveform gain_normalize(const Waveform& w, double target_dbfs_rms) {
  if (w.size() == 0) throw Error(ErrorCode::kEmptyAudio, "gain_normalize");
  const double level_db = rms_dbfs(w.samples);
  if (level_db < -100.0)
    throw Error(ErrorCode::kSilentInput,
                "input RMS " + std::to_string(level_db) + " dBFS");
  const double gain = db_to_linear(target_dbfs_rms - level_db);
  return Waveform(w.samples * gain, w.sample_rate_hz);
}

}  // namespace seval
