// seval/stft.hpp

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

#ifndef SEVAL_STFT_HPP_
#define SEVAL_STFT_HPP_

#include "seval/types.hpp"

namespace seval {

enum class WindowKind { kHann, kHamming };

struct StftConfig {
  int fft_size = 512;
  int hop = 256;
  int win_length = 512;
  WindowKind window = WindowKind::kHann;
  bool center_padding = true;

  int num_bins() const { return fft_size / 2 + 1; }
  void validate() const;
};

/// F x T complex time-frequency grid. F = fft_size/2 + 1 (one-sided).
struct ComplexSpectrogram {
  CplxMat bins;  // F rows, T columns
  StftConfig config;
  int sample_rate_hz = 0;
  Index signal_length = 0;  // samples before padding, for exact inversion

  Index num_bins() const { return bins.rows(); }
  Index num_frames() const { return bins.cols(); }
};

/// Periodic analysis window of the given length.
Vec make_window(WindowKind kind, int length);

/// One-sided FFT of a real signal: returns n/2+1 complex bins (unnormalized).
CplxVec rfft(const Eigen::Ref<const Vec>& x, int n);

/// Inverse of rfft back to n real samples (1/n normalization applied).
Vec irfft(const Eigen::Ref<const CplxVec>& spectrum, int n);

ComplexSpectrogram stft(const Waveform& w, const StftConfig& cfg = {});

/// Weighted overlap-add inversion. Requires a config whose squared-window
/// overlap never vanishes (COLA for reconstruction); throws NonColaConfig
/// otherwise.
Waveform istft(const ComplexSpectrogram& spec);

/// Magnitude grid |stft|.
Mat magnitude(const ComplexSpectrogram& spec);

}  // namespace seval

#endif  // SEVAL_STFT_HPP_
