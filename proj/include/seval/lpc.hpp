// seval/lpc.hpp

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

#ifndef SEVAL_LPC_HPP_
#define SEVAL_LPC_HPP_

#include <vector>

#include "seval/types.hpp"

namespace seval {

struct LpcResult {
  Vec coeffs;           // error-filter coefficients, coeffs[0] == 1
  double error_power;   // forward prediction error power (per sample)
};

/// Biased autocorrelation estimate r[k] = (1/N) sum_n x[n] x[n+k],
/// k = 0..max_lag.
Vec autocorrelation(const Eigen::Ref<const Vec>& frame, int max_lag);

/// Autocorrelation-method linear prediction via the Levinson-Durbin
/// recursion. The prediction error filter is A(z) = 1 + a1 z^-1 + ... and
/// coeffs minimize the forward prediction error power.
LpcResult lpc_coefficients(const Eigen::Ref<const Vec>& frame, int order);

/// Levinson-Durbin on a precomputed autocorrelation sequence (r.size() must
/// be order+1). Exposed so LLR can reuse one clean-frame autocorrelation.
LpcResult levinson_durbin(const Eigen::Ref<const Vec>& r, int order);

struct Resonance {
  double frequency_hz;
  double bandwidth_hz;
};

/// Complex roots of A(z) mapped to resonance frequency/bandwidth pairs,
/// sorted by ascending frequency. Only upper-half-plane roots are reported.
std::vector<Resonance> lpc_resonances(const Eigen::Ref<const Vec>& coeffs,
                                      int sample_rate_hz);

}  // namespace seval

#endif  // SEVAL_LPC_HPP_
