// seval/types.hpp

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

#ifndef SEVAL_TYPES_HPP_
#define SEVAL_TYPES_HPP_

#include <Eigen/Core>

#include <complex>
#include <cstdint>

#include "seval/error.hpp"

namespace seval {

using Vec = Eigen::ArrayXd;
using Mat = Eigen::ArrayXXd;
using CplxVec = Eigen::ArrayXcd;
using CplxMat = Eigen::ArrayXXcd;
using BoolVec = Eigen::Array<bool, Eigen::Dynamic, 1>;
using BoolMat = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using Index = Eigen::Index;

/// Mono sample sequence with its sample rate; the signal currency every
/// module consumes. Samples are full-scale normalized, nominally in [-1, 1].
struct Waveform {
  Vec samples;
  int sample_rate_hz = 0;

  Waveform() = default;
  Waveform(Vec s, int sr) : samples(std::move(s)), sample_rate_hz(sr) {
    if (sample_rate_hz <= 0)
      throw Error(ErrorCode::kInvalidArgument, "sample rate must be positive");
  }

  Index size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

enum class SampleEncoding : std::uint8_t { kPcm16, kPcm24, kPcm32, kFloat32 };

inline const char* encoding_name(SampleEncoding e) {
  switch (e) {
    case SampleEncoding::kPcm16: return "pcm16";
    case SampleEncoding::kPcm24: return "pcm24";
    case SampleEncoding::kPcm32: return "pcm32";
    case SampleEncoding::kFloat32: return "float32";
  }
  return "?";
}

struct AudioMetadata {
  int channels = 1;
  SampleEncoding encoding = SampleEncoding::kPcm16;
  double duration_s = 0.0;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 20.0); }
inline double linear_to_db(double lin) { return 20.0 * std::log10(lin); }

inline double rms(const Eigen::Ref<const Vec>& x) {
  if (x.size() == 0) return 0.0;
  return std::sqrt(x.square().mean());
}

inline double rms_dbfs(const Eigen::Ref<const Vec>& x) {
  double r = rms(x);
  if (r <= 0.0) return -400.0;
  return linear_to_db(r);
}

}  // namespace seval

#endif  // SEVAL_TYPES_HPP_
