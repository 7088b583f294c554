// seval/losses.hpp

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

#ifndef SEVAL_LOSSES_HPP_
#define SEVAL_LOSSES_HPP_

#include <vector>

#include "seval/acoustic_params.hpp"
#include "seval/stft.hpp"
#include "seval/types.hpp"

namespace seval {

struct LossWeights {
  double lambda1 = 0.75;  // TAP weight in the Demucs objective
  double lambda2 = 0.5;   // STFT weight in the Demucs objective
  double gamma = 0.03;    // TAP weight in the FullSubNet objective

  void validate() const {
    if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0) || !(gamma >= 0.0))
      throw Error(ErrorCode::kInvalidArgument,
                  "loss weights must be finite and nonnegative");
  }
};

/// Complex ideal ratio mask M with M .* Y == S. Trained compressed through a
/// tanh-shaped map bounded by (-K, K), K = 10, C = 0.1.
struct CirmMask {
  CplxMat values;  // F x T
  bool compressed = false;
  double k = 10.0;
  double c = 0.1;
};

struct LossBreakdown {
  double l1 = 0.0;
  double stft = 0.0;
  double tap = 0.0;
  double cirm = 0.0;
  double total = 0.0;
  LossWeights weights;
};

/// Mean absolute sample difference (1/T) sum |y - y_hat|.
double l1_loss(const Waveform& y, const Waveform& y_hat);

struct MrStftResolution {
  int fft_size;
  int hop;
  int win_length;
};

/// The three standard multi-resolution configurations.
const std::vector<MrStftResolution>& default_mrstft_resolutions();

/// Sum over resolutions of spectral convergence plus log-magnitude L1, both
/// on magnitude spectrograms.
double mrstft_loss(const Waveform& y, const Waveform& y_hat);

/// total = L1 + lambda1 * L_TAP + lambda2 * L_STFT, components reported.
LossBreakdown demucs_loss(const Waveform& y, const Waveform& y_hat,
                          const LossWeights& w);

/// Energy floor below which mask bins are forced to zero.
inline constexpr double kCirmEnergyFloor = 1e-10;

CirmMask cirm_from_specs(const ComplexSpectrogram& noisy,
                         const ComplexSpectrogram& clean);

ComplexSpectrogram apply_cirm(const ComplexSpectrogram& noisy,
                              const CirmMask& mask);

CirmMask compress_cirm(const CirmMask& mask);
CirmMask decompress_cirm(const CirmMask& mask);

/// MSE over real and imaginary mask components jointly; both compressed.
double cirm_loss(const CirmMask& predicted, const CirmMask& target);

/// (1/(T P)) sum |A - A_hat| over the stored (zero-filled) matrices.
double tap_loss(const TapMatrix& a, const TapMatrix& a_hat);

/// Variant restricted to cells valid in both matrices.
double tap_loss_masked(const TapMatrix& a, const TapMatrix& a_hat);

/// total = L_cIRM + gamma * L_TAP.
LossBreakdown fullsubnet_loss(const CirmMask& pred_mask,
                              const CirmMask& target_mask, const TapMatrix& a,
                              const TapMatrix& a_hat, const LossWeights& w);

}  // namespace seval

#endif  // SEVAL_LOSSES_HPP_
