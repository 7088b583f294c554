// seval/acoustic_params.hpp

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

#ifndef SEVAL_ACOUSTIC_PARAMS_HPP_
#define SEVAL_ACOUSTIC_PARAMS_HPP_

#include <array>
#include <string>
#include <vector>

#include "seval/types.hpp"

namespace seval {

/// The 25 temporal acoustic parameters, in fixed column order.
enum class TapParamId : int {
  kPitch = 0,
  kJitter,
  kShimmer,
  kLoudness,
  kHnr,
  kAlphaRatio,
  kHammarbergIndex,
  kSpectralSlope0_500,
  kSpectralSlope500_1500,
  kF1Freq,
  kF1Bandwidth,
  kF1RelEnergy,
  kF2Freq,
  kF2Bandwidth,
  kF2RelEnergy,
  kF3Freq,
  kF3Bandwidth,
  kF3RelEnergy,
  kH1H2HarmonicDiff,
  kH1A3HarmonicDiff,
  kRateLoudnessPeaks,
  kMeanVoicedLen,
  kStdVoicedLen,
  kMeanUnvoicedLen,
  kContinuousVoicedPerSec,
};

inline constexpr int kNumTapParams = 25;

const std::array<std::string, kNumTapParams>& tap_param_names();
const std::string& tap_param_name(TapParamId id);

/// T x 25 grid of parameter values at a fixed frame rate. Undefined entries
/// (e.g. pitch in unvoiced frames) are stored as 0 with valid == false, so
/// matrix-wide MAE is always well defined.
struct TapMatrix {
  Mat values;    // T x 25
  BoolMat valid; // T x 25
  double frame_rate_hz = 100.0;

  Index num_frames() const { return values.rows(); }

  void check_shape() const {
    if (values.cols() != kNumTapParams || valid.cols() != kNumTapParams ||
        valid.rows() != values.rows())
      throw Error(ErrorCode::kDimensionMismatch, "TapMatrix must be T x 25");
  }
};

/// Fixed-length functional descriptor vector: {mean, stddev, p20, p50, p80}
/// per parameter over its valid frames (125 entries), then the four scalar
/// voicing statistics appended. Total length 129.
struct FunctionalVector {
  Vec values;
  BoolVec valid;

  Index size() const { return values.size(); }
};

inline constexpr int kFunctionalsPerParam = 5;
inline constexpr int kFunctionalVectorLength =
    kNumTapParams * kFunctionalsPerParam + 4;

const std::vector<std::string>& functional_names();

struct PitchFrame {
  double f0_hz = 0.0;
  bool voiced = false;
  double strength = 0.0;  // normalized autocorrelation peak in [0, 1]
  double rms_db = -400.0;
};

struct FormantFrame {
  std::array<double, 3> freq_hz{};
  std::array<double, 3> bandwidth_hz{};
  std::array<double, 3> rel_energy_db{};
  bool voiced = false;
  bool low_confidence = false;  // wide-bandwidth fits, e.g. on noise
  int count = 0;                // resonances actually found (<= 3)
};

struct TapConfig {
  int sample_rate_hz = 16000;   // canonical analysis rate
  double frame_rate_hz = 100.0; // 10 ms hop
  double window_ms = 25.0;
  double pitch_window_ms = 40.0;
  double pitch_min_hz = 60.0;
  double pitch_max_hz = 500.0;
  double voicing_threshold = 0.50;
  double silence_floor_db = -70.0;
  int lpc_order = 12;
  int fft_size = 512;
};

std::vector<PitchFrame> pitch_track(const Waveform& w, const TapConfig& cfg = {});

std::vector<FormantFrame> formant_estimate(const Waveform& w,
                                           const TapConfig& cfg = {});

/// The deterministic TAP extractor: 25 parameters per 10 ms frame.
TapMatrix extract_tap(const Waveform& w, const TapConfig& cfg = {});

FunctionalVector compute_functionals(const TapMatrix& m);

/// CSV with one header row of parameter names and one row per frame.
void tap_to_csv(const TapMatrix& m, const std::string& path);

/// Binary container: magic "TAPB", version, T, P, frame rate, row-major
/// float64 values, then row-major uint8 validity.
void tap_to_binary(const TapMatrix& m, const std::string& path);
TapMatrix tap_from_binary(const std::string& path);

}  // namespace seval

#endif  // SEVAL_ACOUSTIC_PARAMS_HPP_
