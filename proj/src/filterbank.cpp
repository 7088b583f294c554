// seval/filterbank.cpp

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

#include "seval/filterbank.hpp"

#include <cmath>

#include "seval/iir.hpp"
#include "seval/stft.hpp"

namespace seval {

namespace {

// ANSI S3.5-style critical-band importance, interpolated at band centers.
const double kSiiCenters[] = {150,  250,  350,  450,  570,  700,  840,
                              1000, 1170, 1370, 1600, 1850, 2150, 2500,
                              2900, 3400, 4000, 4800, 5800, 7000, 8500};
const double kSiiImportance[] = {0.0103, 0.0261, 0.0419, 0.0577, 0.0577,
                                 0.0577, 0.0577, 0.0577, 0.0577, 0.0577,
                                 0.0577, 0.0577, 0.0577, 0.0577, 0.0577,
                                 0.0577, 0.0577, 0.0460, 0.0343, 0.0226,
                                 0.0110};

double sii_importance_at(double hz) {
  const int n = static_cast<int>(sizeof(kSiiCenters) / sizeof(double));
  if (hz <= kSiiCenters[0]) return kSiiImportance[0];
  if (hz >= kSiiCenters[n - 1]) return kSiiImportance[n - 1];
  for (int i = 1; i < n; ++i) {
    if (hz <= kSiiCenters[i]) {
      const double t =
          (hz - kSiiCenters[i - 1]) / (kSiiCenters[i] - kSiiCenters[i - 1]);
      return kSiiImportance[i - 1] +
             t * (kSiiImportance[i] - kSiiImportance[i - 1]);
    }
  }
  return kSiiImportance[n - 1];
}

FilterBank build_rectangular(FilterBankKind kind, const Vec& lo, const Vec& hi,
                             const Vec& centers, int sample_rate_hz,
                             int fft_size) {
  const int num_bins = fft_size / 2 + 1;
  const Index bands = centers.size();
  FilterBank fb;
  fb.kind = kind;
  fb.center_hz = centers;
  fb.lo_hz = lo;
  fb.hi_hz = hi;
  fb.fft_size = fft_size;
  fb.sample_rate_hz = sample_rate_hz;
  fb.weights = Mat::Zero(bands, num_bins);
  const double bin_hz = static_cast<double>(sample_rate_hz) / fft_size;
  for (Index b = 0; b < bands; ++b) {
    for (int k = 0; k < num_bins; ++k) {
      const double f = k * bin_hz;
      if (f >= lo[b] && f < hi[b]) fb.weights(b, k) = 1.0;
    }
  }
  fb.importance = Vec(bands);
  for (Index b = 0; b < bands; ++b)
    fb.importance[b] = sii_importance_at(centers[b]);
  fb.importance /= fb.importance.sum();
  return fb;
}

}  // namespace

double hz_to_erb_rate(double hz) {
  return 21.4 * std::log10(1.0 + 0.00437 * hz);
}

double erb_rate_to_hz(double erb) {
  return (std::pow(10.0, erb / 21.4) - 1.0) / 0.00437;
}

FilterBank third_octave_filterbank(int sample_rate_hz, int fft_size) {
  if (sample_rate_hz <= 0 || fft_size <= 0)
    throw Error(ErrorCode::kInvalidArgument, "bad filterbank parameters");
  const int bands = 15;
  Vec centers(bands), lo(bands), hi(bands);
  for (int j = 0; j < bands; ++j) {
    centers[j] = 150.0 * std::pow(2.0, j / 3.0);
    lo[j] = centers[j] * std::pow(2.0, -1.0 / 6.0);
    hi[j] = centers[j] * std::pow(2.0, 1.0 / 6.0);
  }
  return build_rectangular(FilterBankKind::kThirdOctave, lo, hi, centers,
                           sample_rate_hz, fft_size);
}

FilterBank erb_filterbank(int sample_rate_hz, int fft_size, int num_bands,
                          double lo_hz, double hi_hz) {
  if (sample_rate_hz <= 0 || fft_size <= 0 || num_bands <= 0)
    throw Error(ErrorCode::kInvalidArgument, "bad filterbank parameters");
  const double nyquist = 0.5 * sample_rate_hz;
  hi_hz = std::min(hi_hz, 0.98 * nyquist);
  if (!(lo_hz > 0.0 && lo_hz < hi_hz))
    throw Error(ErrorCode::kInvalidArgument, "bad band range");
  const double e_lo = hz_to_erb_rate(lo_hz), e_hi = hz_to_erb_rate(hi_hz);
  Vec centers(num_bands), lo(num_bands), hi(num_bands);
  for (int b = 0; b < num_bands; ++b) {
    lo[b] = erb_rate_to_hz(e_lo + (e_hi - e_lo) * b / num_bands);
    hi[b] = erb_rate_to_hz(e_lo + (e_hi - e_lo) * (b + 1) / num_bands);
    centers[b] = erb_rate_to_hz(e_lo + (e_hi - e_lo) * (b + 0.5) / num_bands);
  }
  return build_rectangular(FilterBankKind::kCriticalBand, lo, hi, centers,
                           sample_rate_hz, fft_size);
}

Mat band_envelope(const Waveform& w, const FilterBank& fb,
                  double envelope_rate_hz, double lp_hz) {
  const Index n = w.size();
  if (n == 0) throw Error(ErrorCode::kEmptyAudio, "band_envelope");
  const int sr = w.sample_rate_hz;
  const Index hop = std::max<Index>(1, static_cast<Index>(
                                           std::llround(sr / envelope_rate_hz)));
  const Index frames = n / hop;

  // Whole-signal FFT once; each band is a zero-phase brick-wall mask.
  Index nfft = 1;
  while (nfft < n) nfft <<= 1;
  const CplxVec spectrum = rfft(w.samples, static_cast<int>(nfft));
  const double bin_hz = static_cast<double>(sr) / static_cast<double>(nfft);

  const BiquadCascade lp = butterworth_lowpass(2, lp_hz, sr);
  const Index pad = static_cast<Index>(3.0 * sr / lp_hz);

  Mat env = Mat::Zero(fb.num_bands(), frames);
  for (Index b = 0; b < fb.num_bands(); ++b) {
    CplxVec masked = CplxVec::Zero(spectrum.size());
    const Index k_lo = static_cast<Index>(std::ceil(fb.lo_hz[b] / bin_hz));
    const Index k_hi = std::min<Index>(
        spectrum.size() - 1,
        static_cast<Index>(std::floor(fb.hi_hz[b] / bin_hz)));
    for (Index k = std::max<Index>(0, k_lo); k <= k_hi; ++k)
      masked[k] = spectrum[k];
    Vec band = irfft(masked, static_cast<int>(nfft)).head(n);

    Vec rectified = band.max(0.0);
    Vec smoothed = filtfilt(lp, rectified, pad).max(0.0);
    for (Index t = 0; t < frames; ++t)
      env(b, t) = smoothed[std::min(n - 1, t * hop + hop / 2)];
  }
  return env;
}

}  // namespace seval
