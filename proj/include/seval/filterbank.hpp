// seval/filterbank.hpp

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

#ifndef SEVAL_FILTERBANK_HPP_
#define SEVAL_FILTERBANK_HPP_

#include "seval/types.hpp"

namespace seval {

enum class FilterBankKind { kThirdOctave, kCriticalBand };

/// Per-band frequency weighting over one-sided FFT bins. Rectangular bin
/// grouping: weights are 0/1 and bands never overlap.
struct FilterBank {
  FilterBankKind kind;
  Mat weights;       // num_bands x num_bins
  Vec center_hz;     // band centers
  Vec lo_hz, hi_hz;  // band edges, [lo, hi)
  Vec importance;    // band-importance weights, sums to 1
  int fft_size = 0;
  int sample_rate_hz = 0;

  Index num_bands() const { return weights.rows(); }

  /// Band magnitudes of a one-sided power column: sqrt(W |X|^2).
  Vec band_magnitudes(const Eigen::Ref<const Vec>& power_column) const {
    return (weights.matrix() * power_column.matrix()).array().max(0.0).sqrt();
  }
};

/// 15 one-third-octave bands with centers 150 * 2^(j/3) Hz, j = 0..14.
FilterBank third_octave_filterbank(int sample_rate_hz, int fft_size);

/// Critical-band style bank: num_bands bands equally spaced on the ERB-rate
/// scale between lo_hz and hi_hz (hi is clamped below Nyquist).
FilterBank erb_filterbank(int sample_rate_hz, int fft_size, int num_bands = 20,
                          double lo_hz = 150.0, double hi_hz = 7000.0);

/// ERB-rate (Glasberg & Moore): 21.4 log10(1 + 0.00437 f).
double hz_to_erb_rate(double hz);
double erb_rate_to_hz(double erb);

/// Per-band temporal envelopes (bands x frames): the signal is band-limited
/// with a zero-phase FFT mask, half-wave rectified, low-passed at lp_hz, and
/// sampled at envelope_rate_hz.
Mat band_envelope(const Waveform& w, const FilterBank& fb,
                  double envelope_rate_hz = 100.0, double lp_hz = 25.0);

}  // namespace seval

#endif  // SEVAL_FILTERBANK_HPP_
