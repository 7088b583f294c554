// seval/iir.cpp

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

#include "seval/iir.hpp"

#include <cmath>

namespace seval {

namespace {

void check_design(int order, double cutoff_hz, double fs_hz) {
  if (order <= 0 || order % 2 != 0)
    throw Error(ErrorCode::kInvalidArgument, "only even Butterworth orders");
  if (!(cutoff_hz > 0.0 && cutoff_hz < 0.5 * fs_hz))
    throw Error(ErrorCode::kInvalidArgument, "cutoff must be below Nyquist");
}

// Butterworth pole-pair Q factors: Q_k = 1 / (2 sin((2k+1) pi / (2N))).
std::vector<double> butterworth_qs(int order) {
  std::vector<double> qs(static_cast<std::size_t>(order / 2));
  for (int k = 0; k < order / 2; ++k)
    qs[static_cast<std::size_t>(k)] =
        1.0 / (2.0 * std::sin((2.0 * k + 1.0) * M_PI / (2.0 * order)));
  return qs;
}

}  // namespace

BiquadCascade butterworth_lowpass(int order, double cutoff_hz, double fs_hz) {
  check_design(order, cutoff_hz, fs_hz);
  const double w0 = 2.0 * M_PI * cutoff_hz / fs_hz;
  const double cw = std::cos(w0), sw = std::sin(w0);
  BiquadCascade sections;
  for (double q : butterworth_qs(order)) {
    const double alpha = sw / (2.0 * q);
    const double a0 = 1.0 + alpha;
    Biquad s;
    s.b0 = (1.0 - cw) / 2.0 / a0;
    s.b1 = (1.0 - cw) / a0;
    s.b2 = s.b0;
    s.a1 = -2.0 * cw / a0;
    s.a2 = (1.0 - alpha) / a0;
    sections.push_back(s);
  }
  return sections;
}

BiquadCascade butterworth_highpass(int order, double cutoff_hz, double fs_hz) {
  check_design(order, cutoff_hz, fs_hz);
  const double w0 = 2.0 * M_PI * cutoff_hz / fs_hz;
  const double cw = std::cos(w0), sw = std::sin(w0);
  BiquadCascade sections;
  for (double q : butterworth_qs(order)) {
    const double alpha = sw / (2.0 * q);
    const double a0 = 1.0 + alpha;
    Biquad s;
    s.b0 = (1.0 + cw) / 2.0 / a0;
    s.b1 = -(1.0 + cw) / a0;
    s.b2 = s.b0;
    s.a1 = -2.0 * cw / a0;
    s.a2 = (1.0 - alpha) / a0;
    sections.push_back(s);
  }
  return sections;
}

Vec iir_filter(const BiquadCascade& sections, const Eigen::Ref<const Vec>& x) {
  Vec y = x;
  for (const Biquad& s : sections) {
    double z1 = 0.0, z2 = 0.0;
    for (Index n = 0; n < y.size(); ++n) {
      const double in = y[n];
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      y[n] = out;
    }
  }
  return y;
}

Vec filtfilt(const BiquadCascade& sections, const Eigen::Ref<const Vec>& x,
             Index pad_len) {
  const Index n = x.size();
  if (n == 0) return Vec();
  const Index pad = std::min(pad_len, n - 1);

  Vec ext(n + 2 * pad);
  for (Index i = 0; i < pad; ++i)
    ext[i] = 2.0 * x[0] - x[pad - i];  // odd reflection about the first sample
  ext.segment(pad, n) = x;
  for (Index i = 0; i < pad; ++i)
    ext[pad + n + i] = 2.0 * x[n - 1] - x[n - 2 - i];

  Vec fwd = iir_filter(sections, ext);
  Vec rev = fwd.reverse();
  Vec back = iir_filter(sections, rev);
  Vec restored = back.reverse();
  return restored.segment(pad, n);
}

}  // namespace seval
