// seval/lpc.cpp

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

#include "seval/lpc.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace seval {

Vec autocorrelation(const Eigen::Ref<const Vec>& frame, int max_lag) {
  const Index n = frame.size();
  if (n <= max_lag)
    throw Error(ErrorCode::kInputTooShort, "frame shorter than max lag");
  Vec r(max_lag + 1);
  for (int k = 0; k <= max_lag; ++k)
    r[k] = (frame.head(n - k) * frame.tail(n - k)).sum() / n;
  return r;
}

LpcResult levinson_durbin(const Eigen::Ref<const Vec>& r, int order) {
  if (r.size() != order + 1)
    throw Error(ErrorCode::kDimensionMismatch, "need order+1 autocorrelations");
  if (!(r[0] > 0.0))
    throw Error(ErrorCode::kDegenerateFrame, "zero autocorrelation at lag 0");

  Vec a = Vec::Zero(order + 1);
  a[0] = 1.0;
  double err = r[0];
  Vec prev(order + 1);
  for (int i = 1; i <= order; ++i) {
    if (err < r[0] * 1e-14) break;  // perfectly predictable; stop early
    double acc = r[i];
    for (int j = 1; j < i; ++j) acc += a[j] * r[i - j];
    const double k = -acc / err;
    prev = a;
    for (int j = 1; j < i; ++j) a[j] = prev[j] + k * prev[i - j];
    a[i] = k;
    err *= (1.0 - k * k);
  }
  return {std::move(a), std::max(err, 0.0)};
}

LpcResult lpc_coefficients(const Eigen::Ref<const Vec>& frame, int order) {
  if (order <= 0)
    throw Error(ErrorCode::kInvalidArgument, "LPC order must be positive");
  if (frame.size() <= order)
    throw Error(ErrorCode::kInputTooShort, "frame length must exceed order");
  const Vec r = autocorrelation(frame, order);
  return levinson_durbin(r, order);
}

std::vector<Resonance> lpc_resonances(const Eigen::Ref<const Vec>& coeffs,
                                      int sample_rate_hz) {
  const int order = static_cast<int>(coeffs.size()) - 1;
  if (order < 1 || coeffs[0] != 1.0)
    throw Error(ErrorCode::kInvalidArgument, "expected monic error filter");

  // Roots of z^p + a1 z^(p-1) + ... + ap via the companion matrix.
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(order, order);
  for (int j = 0; j < order; ++j) companion(0, j) = -coeffs[j + 1];
  for (int i = 1; i < order; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);

  std::vector<Resonance> out;
  const double nyquist = 0.5 * sample_rate_hz;
  for (Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const std::complex<double> z = solver.eigenvalues()[i];
    if (z.imag() <= 0.0) continue;
    const double radius = std::abs(z);
    if (radius < 1e-6) continue;
    const double freq = std::arg(z) / (2.0 * M_PI) * sample_rate_hz;
    if (freq <= 0.0 || freq >= nyquist) continue;
    const double bw = -std::log(std::min(radius, 1.0 - 1e-12)) *
                      sample_rate_hz / M_PI;
    out.push_back({freq, bw});
  }
  std::sort(out.begin(), out.end(), [](const Resonance& a, const Resonance& b) {
    return a.frequency_hz < b.frequency_hz;
  });
  return out;
}

}  // namespace seval
