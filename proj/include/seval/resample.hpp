// seval/resample.hpp

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

#ifndef SEVAL_RESAMPLE_HPP_
#define SEVAL_RESAMPLE_HPP_

#include "seval/types.hpp"

namespace seval {

/// Band-limited sample rate conversion by polyphase windowed-sinc
/// interpolation (Kaiser window). Output length = round(n * target / source).
Waveform resample(const Waveform& w, int target_hz);

/// Scales the waveform so its RMS level equals target_dbfs_rms (default -25
/// dBFS). Pure scalar gain; shape is preserved and no clipping is applied.
Waveform gain_normalize(const Waveform& w, double target_dbfs_rms = -25.0);

}  // namespace seval

#endif  // SEVAL_RESAMPLE_HPP_
