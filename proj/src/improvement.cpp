// seval/improvement.cpp

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

#include "seval/improvement.hpp"

#include <cmath>

namespace seval {

namespace {

void check_same_frames(const TapMatrix& a, const TapMatrix& b) {
  a.check_shape();
  b.check_shape();
  if (a.num_frames() != b.num_frames())
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(a.num_frames()) + " vs " +
                    std::to_string(b.num_frames()) + " frames");
}

}  // namespace

Vec mae_over_time(const TapMatrix& a, const TapMatrix& b) {
  check_same_frames(a, b);
  return (a.values - b.values).abs().colwise().mean().transpose();
}

std::pair<double, double> improvement_scores(double mae_n, double mae_b,
                                             double mae_f) {
  if (!(mae_n >= 0.0) || !(mae_b >= 0.0) || !(mae_f >= 0.0))
    throw Error(ErrorCode::kInvalidArgument, "MAE values must be nonnegative");
  if (mae_n == 0.0)
    throw Error(ErrorCode::kUndefinedBaseline, "MAE_N is zero");
  return {1.0 - mae_b / mae_n, 1.0 - mae_f / mae_n};
}

ImprovementReport improvement_report_from_mae(
    const std::vector<std::string>& names, const Vec& mae_n, const Vec& mae_b,
    const Vec& mae_f, ImprovementMode mode) {
  const Index p = static_cast<Index>(names.size());
  if (mae_n.size() != p || mae_b.size() != p || mae_f.size() != p)
    throw Error(ErrorCode::kDimensionMismatch, "MAE vector lengths differ");

  ImprovementReport report;
  report.mode = mode;
  report.params.reserve(static_cast<std::size_t>(p));
  for (Index i = 0; i < p; ++i) {
    ParamImprovement pi;
    pi.param = names[static_cast<std::size_t>(i)];
    pi.mae_n = mae_n[i];
    pi.mae_b = mae_b[i];
    pi.mae_f = mae_f[i];
    if (pi.mae_n > 0.0) {
      auto [ib, iff] = improvement_scores(pi.mae_n, pi.mae_b, pi.mae_f);
      pi.i_b = ib;
      pi.i_f = iff;
      if (pi.i_f > pi.i_b) ++report.params_finetuned_beats_baseline;
    } else {
      pi.undefined = true;
    }
    report.params.push_back(std::move(pi));
  }
  return report;
}

ImprovementReport improvement_report(const TapMatrix& clean,
                                     const TapMatrix& noisy,
                                     const TapMatrix& baseline,
                                     const TapMatrix& finetuned) {
  check_same_frames(clean, noisy);
  check_same_frames(clean, baseline);
  check_same_frames(clean, finetuned);
  std::vector<std::string> names(tap_param_names().begin(),
                                 tap_param_names().end());
  return improvement_report_from_mae(
      names, mae_over_time(clean, noisy), mae_over_time(clean, baseline),
      mae_over_time(clean, finetuned), ImprovementMode::kLldTimeseries);
}

ImprovementReport improvement_report(const FunctionalVector& clean,
                                     const FunctionalVector& noisy,
                                     const FunctionalVector& baseline,
                                     const FunctionalVector& finetuned) {
  const Index p = clean.size();
  if (noisy.size() != p || baseline.size() != p || finetuned.size() != p)
    throw Error(ErrorCode::kDimensionMismatch, "functional lengths differ");
  if (p != kFunctionalVectorLength)
    throw Error(ErrorCode::kKindMismatch, "not a functional vector");
  return improvement_report_from_mae(
      functional_names(), (clean.values - noisy.values).abs(),
      (clean.values - baseline.values).abs(),
      (clean.values - finetuned.values).abs(),
      ImprovementMode::kFunctionalVector);
}

}  // namespace seval
