// seval/improvement.hpp

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

#ifndef SEVAL_IMPROVEMENT_HPP_
#define SEVAL_IMPROVEMENT_HPP_

#include <string>
#include <utility>
#include <vector>

#include "seval/acoustic_params.hpp"
#include "seval/types.hpp"

namespace seval {

enum class ImprovementMode { kLldTimeseries, kFunctionalVector };

inline const char* improvement_mode_name(ImprovementMode m) {
  return m == ImprovementMode::kLldTimeseries ? "lld_timeseries"
                                              : "functional_vector";
}

struct ParamImprovement {
  std::string param;
  double mae_n = 0.0;  // noisy vs clean
  double mae_b = 0.0;  // baseline-enhanced vs clean
  double mae_f = 0.0;  // finetuned-enhanced vs clean
  double i_b = 0.0;    // 1 - mae_b / mae_n
  double i_f = 0.0;    // 1 - mae_f / mae_n
  bool undefined = false;  // mae_n == 0: improvement has no meaning
};

struct ImprovementReport {
  std::vector<ParamImprovement> params;
  int params_finetuned_beats_baseline = 0;  // strict i_f > i_b count
  ImprovementMode mode = ImprovementMode::kLldTimeseries;
};

/// Per-parameter mean absolute error across the time axis:
/// for each p, (1/T) sum_t |a(t,p) - b(t,p)|.
Vec mae_over_time(const TapMatrix& a, const TapMatrix& b);

/// I_B = 1 - MAE_B/MAE_N and I_F = 1 - MAE_F/MAE_N. Throws
/// UndefinedBaseline when mae_n == 0.
std::pair<double, double> improvement_scores(double mae_n, double mae_b,
                                             double mae_f);

ImprovementReport improvement_report(const TapMatrix& clean,
                                     const TapMatrix& noisy,
                                     const TapMatrix& baseline,
                                     const TapMatrix& finetuned);

ImprovementReport improvement_report(const FunctionalVector& clean,
                                     const FunctionalVector& noisy,
                                     const FunctionalVector& baseline,
                                     const FunctionalVector& finetuned);

/// Builds a report directly from per-parameter MAE triples (used for pooled
/// multi-file reports).
ImprovementReport improvement_report_from_mae(
    const std::vector<std::string>& names, const Vec& mae_n, const Vec& mae_b,
    const Vec& mae_f, ImprovementMode mode);

}  // namespace seval

#endif  // SEVAL_IMPROVEMENT_HPP_
