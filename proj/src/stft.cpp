// seval/stft.cpp

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

#include "seval/stft.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <vector>

namespace seval {

void StftConfig::validate() const {
  if (fft_size <= 0 || hop <= 0 || win_length <= 0)
    throw Error(ErrorCode::kInvalidArgument, "STFT sizes must be positive");
  if (!(hop <= win_length && win_length <= fft_size))
    throw Error(ErrorCode::kInvalidArgument,
                "need 0 < hop <= win_length <= fft_size");
}

Vec make_window(WindowKind kind, int length) {
  Vec w(length);
  for (int n = 0; n < length; ++n) {
    const double phase = 2.0 * M_PI * n / length;
    w[n] = kind == WindowKind::kHann ? 0.5 - 0.5 * std::cos(phase)
                                     : 0.54 - 0.46 * std::cos(phase);
  }
  return w;
}

CplxVec rfft(const Eigen::Ref<const Vec>& x, int n) {
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> in(static_cast<std::size_t>(n), 0.0);
  const Index copy = std::min<Index>(x.size(), n);
  for (Index i = 0; i < copy; ++i) in[static_cast<std::size_t>(i)] = x[i];
  std::vector<std::complex<double>> out;
  fft.fwd(out, in);
  return Eigen::Map<const CplxVec>(out.data(), static_cast<Index>(out.size()));
}

Vec irfft(const Eigen::Ref<const CplxVec>& spectrum, int n) {
  if (spectrum.size() != n / 2 + 1)
    throw Error(ErrorCode::kDimensionMismatch, "half spectrum size mismatch");
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::complex<double>> in(spectrum.data(),
                                       spectrum.data() + spectrum.size());
  std::vector<double> out;
  fft.inv(out, in, n);
  return Eigen::Map<const Vec>(out.data(), static_cast<Index>(out.size()));
}

ComplexSpectrogram stft(const Waveform& w, const StftConfig& cfg) {
  cfg.validate();
  const Index n = w.size();
  const Index pad = cfg.center_padding ? cfg.fft_size / 2 : 0;
  const Index padded = n + 2 * pad;
  if (padded < cfg.win_length)
    throw Error(ErrorCode::kInputTooShort,
                "signal shorter than the analysis window");
  const Index frames = 1 + (padded - cfg.win_length) / cfg.hop;
  const Vec window = make_window(cfg.window, cfg.win_length);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);

  ComplexSpectrogram spec;
  spec.bins.resize(cfg.num_bins(), frames);
  spec.config = cfg;
  spec.sample_rate_hz = w.sample_rate_hz;
  spec.signal_length = n;

  std::vector<double> buf(static_cast<std::size_t>(cfg.fft_size));
  std::vector<std::complex<double>> out;
  for (Index t = 0; t < frames; ++t) {
    const Index start = t * cfg.hop - pad;
    for (int i = 0; i < cfg.fft_size; ++i) {
      double v = 0.0;
      if (i < cfg.win_length) {
        const Index src = start + i;
        if (src >= 0 && src < n) v = w.samples[src] * window[i];
      }
      buf[static_cast<std::size_t>(i)] = v;
    }
    fft.fwd(out, buf);
    for (Index k = 0; k < spec.bins.rows(); ++k)
      spec.bins(k, t) = out[static_cast<std::size_t>(k)];
  }
  return spec;
}

Waveform istft(const ComplexSpectrogram& spec) {
  const StftConfig& cfg = spec.config;
  cfg.validate();
  const Vec window = make_window(cfg.window, cfg.win_length);

  // Steady-state squared-window overlap must be bounded away from zero,
  // otherwise WOLA cannot reconstruct (e.g. hann with hop == win_length).
  Vec period(cfg.hop);
  period.setZero();
  for (int j = 0; j < cfg.hop; ++j)
    for (int k = j; k < cfg.win_length; k += cfg.hop)
      period[j] += window[k] * window[k];
  if (period.minCoeff() < 1e-8)
    throw Error(ErrorCode::kNonColaConfig,
                "squared window overlap vanishes at this hop");

  const Index pad = cfg.center_padding ? cfg.fft_size / 2 : 0;
  const Index frames = spec.num_frames();
  const Index padded = (frames - 1) * cfg.hop + cfg.win_length;

  Vec acc = Vec::Zero(padded);
  Vec den = Vec::Zero(padded);
  for (Index t = 0; t < frames; ++t) {
    const Vec frame = irfft(spec.bins.col(t), cfg.fft_size);
    const Index start = t * cfg.hop;
    for (int i = 0; i < cfg.win_length; ++i) {
      acc[start + i] += window[i] * frame[i];
      den[start + i] += window[i] * window[i];
    }
  }

  const Index out_len =
      spec.signal_length > 0 ? spec.signal_length : padded - 2 * pad;
  Vec out(out_len);
  for (Index i = 0; i < out_len; ++i) {
    const Index src = i + pad;
    const double d = src < padded ? den[src] : 0.0;
    out[i] = d > 1e-10 ? acc[src] / d : 0.0;
  }
  return Waveform(std::move(out), spec.sample_rate_hz);
}

Mat magnitude(const ComplexSpectrogram& spec) { return spec.bins.abs(); }

}  // namespace seval
