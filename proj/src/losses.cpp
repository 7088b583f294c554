// seval/losses.cpp

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

#include "seval/losses.hpp"

#include <cmath>

namespace seval {

namespace {

void check_pair(const Waveform& y, const Waveform& y_hat) {
  if (y.size() != y_hat.size())
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(y.size()) + " vs " + std::to_string(y_hat.size()));
  if (y.sample_rate_hz != y_hat.sample_rate_hz)
    throw Error(ErrorCode::kLengthMismatch, "sample rates differ");
}

void check_spec_pair(const ComplexSpectrogram& a, const ComplexSpectrogram& b) {
  if (a.bins.rows() != b.bins.rows() || a.bins.cols() != b.bins.cols())
    throw Error(ErrorCode::kDimensionMismatch, "spectrogram grids differ");
}

}  // namespace

double l1_loss(const Waveform& y, const Waveform& y_hat) {
  check_pair(y, y_hat);
  return (y.samples - y_hat.samples).abs().mean();
}

const std::vector<MrStftResolution>& default_mrstft_resolutions() {
  static const std::vector<MrStftResolution> kResolutions = {
      {512, 50, 240}, {1024, 120, 600}, {2048, 240, 1200}};
  return kResolutions;
}

double mrstft_loss(const Waveform& y, const Waveform& y_hat) {
  check_pair(y, y_hat);
  constexpr double kLogFloor = 1e-7;
  double total = 0.0;
  for (const MrStftResolution& res : default_mrstft_resolutions()) {
    StftConfig cfg;
    cfg.fft_size = res.fft_size;
    cfg.hop = res.hop;
    cfg.win_length = res.win_length;
    const Mat my = magnitude(stft(y, cfg));
    const Mat mh = magnitude(stft(y_hat, cfg));
    const double ref_norm = std::sqrt(my.square().sum());
    const double diff_norm = std::sqrt((my - mh).square().sum());
    const double spectral_convergence =
        ref_norm > 0.0 ? diff_norm / ref_norm : diff_norm;
    const double log_magnitude =
        ((my + kLogFloor).log() - (mh + kLogFloor).log()).abs().mean();
    total += spectral_convergence + log_magnitude;
  }
  return total;
}

LossBreakdown demucs_loss(const Waveform& y, const Waveform& y_hat,
                          const LossWeights& w) {
  w.validate();
  check_pair(y, y_hat);
  LossBreakdown out;
  out.weights = w;
  out.l1 = l1_loss(y, y_hat);
  out.stft = mrstft_loss(y, y_hat);
  out.tap = tap_loss(extract_tap(y), extract_tap(y_hat));
  out.total = out.l1 + w.lambda1 * out.tap + w.lambda2 * out.stft;
  return out;
}

CirmMask cirm_from_specs(const ComplexSpectrogram& noisy,
                         const ComplexSpectrogram& clean) {
  check_spec_pair(noisy, clean);
  CirmMask mask;
  mask.values.resize(noisy.bins.rows(), noisy.bins.cols());
  for (Index t = 0; t < noisy.bins.cols(); ++t) {
    for (Index f = 0; f < noisy.bins.rows(); ++f) {
      const std::complex<double> y = noisy.bins(f, t);
      const double denom = std::norm(y);
      mask.values(f, t) = denom < kCirmEnergyFloor
                              ? std::complex<double>(0.0, 0.0)
                              : clean.bins(f, t) * std::conj(y) / denom;
    }
  }
  mask.compressed = false;
  return mask;
}

ComplexSpectrogram apply_cirm(const ComplexSpectrogram& noisy,
                              const CirmMask& mask) {
  if (mask.compressed)
    throw Error(ErrorCode::kCompressedMask, "decompress the mask first");
  if (noisy.bins.rows() != mask.values.rows() ||
      noisy.bins.cols() != mask.values.cols())
    throw Error(ErrorCode::kDimensionMismatch, "mask/spectrogram grids differ");
  ComplexSpectrogram out = noisy;
  out.bins = noisy.bins * mask.values;
  return out;
}

CirmMask compress_cirm(const CirmMask& mask) {
  if (mask.compressed)
    throw Error(ErrorCode::kAlreadyCompressed, "mask is already compressed");
  const double k = mask.k, c = mask.c;
  auto squash = [k, c](double x) {
    // K (1 - e^(-C x)) / (1 + e^(-C x)) == K tanh(C x / 2)
    return k * std::tanh(0.5 * c * x);
  };
  CirmMask out = mask;
  for (Index t = 0; t < mask.values.cols(); ++t)
    for (Index f = 0; f < mask.values.rows(); ++f)
      out.values(f, t) = {squash(mask.values(f, t).real()),
                          squash(mask.values(f, t).imag())};
  out.compressed = true;
  return out;
}

CirmMask decompress_cirm(const CirmMask& mask) {
  if (!mask.compressed)
    throw Error(ErrorCode::kUncompressedInput, "mask is not compressed");
  const double k = mask.k, c = mask.c;
  auto unsquash = [k, c](double x) {
    if (!(std::abs(x) < k))
      throw Error(ErrorCode::kOutOfDomain,
                  "compressed component magnitude reached K");
    return -(1.0 / c) * std::log((k - x) / (k + x));
  };
  CirmMask out = mask;
  for (Index t = 0; t < mask.values.cols(); ++t)
    for (Index f = 0; f < mask.values.rows(); ++f)
      out.values(f, t) = {unsquash(mask.values(f, t).real()),
                          unsquash(mask.values(f, t).imag())};
  out.compressed = false;
  return out;
}

double cirm_loss(const CirmMask& predicted, const CirmMask& target) {
  if (!predicted.compressed || !target.compressed)
    throw Error(ErrorCode::kUncompressedInput,
                "cirm_loss expects compressed masks");
  if (predicted.values.rows() != target.values.rows() ||
      predicted.values.cols() != target.values.cols())
    throw Error(ErrorCode::kDimensionMismatch, "mask grids differ");
  const CplxMat diff = predicted.values - target.values;
  const double sum = diff.real().square().sum() + diff.imag().square().sum();
  return sum / (2.0 * static_cast<double>(diff.size()));
}

double tap_loss(const TapMatrix& a, const TapMatrix& a_hat) {
  a.check_shape();
  a_hat.check_shape();
  if (a.num_frames() != a_hat.num_frames())
    throw Error(ErrorCode::kDimensionMismatch, "frame counts differ");
  return (a.values - a_hat.values).abs().mean();
}

double tap_loss_masked(const TapMatrix& a, const TapMatrix& a_hat) {
  a.check_shape();
  a_hat.check_shape();
  if (a.num_frames() != a_hat.num_frames())
    throw Error(ErrorCode::kDimensionMismatch, "frame counts differ");
  double sum = 0.0;
  Index count = 0;
  for (Index t = 0; t < a.values.rows(); ++t) {
    for (Index p = 0; p < a.values.cols(); ++p) {
      if (a.valid(t, p) && a_hat.valid(t, p)) {
        sum += std::abs(a.values(t, p) - a_hat.values(t, p));
        ++count;
      }
    }
  }
  if (count == 0)
    throw Error(ErrorCode::kNoValidFrames, "no jointly valid cells");
  return sum / static_cast<double>(count);
}

LossBreakdown fullsubnet_loss(const CirmMask& pred_mask,
                              const CirmMask& target_mask, const TapMatrix& a,
                              const TapMatrix& a_hat, const LossWeights& w) {
  w.validate();
  LossBreakdown out;
  out.weights = w;
  out.cirm = cirm_loss(pred_mask, target_mask);
  out.tap = tap_loss(a, a_hat);
  out.total = out.cirm + w.gamma * out.tap;
  return out;
}

}  // namespace seval
