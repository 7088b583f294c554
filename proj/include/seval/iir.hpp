// seval/iir.hpp

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

#ifndef SEVAL_IIR_HPP_
#define SEVAL_IIR_HPP_

#include <vector>

#include "seval/types.hpp"

namespace seval {

struct Biquad {
  double b0, b1, b2;  // numerator
  double a1, a2;      // denominator (a0 normalized to 1)
};

using BiquadCascade = std::vector<Biquad>;

/// Butterworth designs via the bilinear transform (even orders only; each
/// conjugate pole pair becomes one second-order section).
BiquadCascade butterworth_lowpass(int order, double cutoff_hz, double fs_hz);
BiquadCascade butterworth_highpass(int order, double cutoff_hz, double fs_hz);

/// Direct-form II transposed, zero initial state.
Vec iir_filter(const BiquadCascade& sections, const Eigen::Ref<const Vec>& x);

/// Forward-backward filtering for zero phase. Pads both ends with odd
/// reflection so filter transients decay outside the signal; pad_len should
/// cover a few time constants of the slowest section.
Vec filtfilt(const BiquadCascade& sections, const Eigen::Ref<const Vec>& x,
             Index pad_len);

}  // namespace seval

#endif  // SEVAL_IIR_HPP_
