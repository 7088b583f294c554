// seval/wav_io.hpp

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

#ifndef SEVAL_WAV_IO_HPP_
#define SEVAL_WAV_IO_HPP_

#include <string>
#include <utility>

#include "seval/types.hpp"

namespace seval {

/// Reads a little-endian RIFF/WAVE file. Supported encodings: pcm16, pcm24,
/// pcm32, float32 (plain or WAVE_FORMAT_EXTENSIBLE). Multichannel input is
/// averaged down to mono; samples are scaled to [-1, 1].
std::pair<Waveform, AudioMetadata> load_wav(const std::string& path);

/// Writes a mono WAV file in the requested encoding.
/// Returns the number of samples that had to be clamped because |x| > 1;
/// a nonzero count is the warning-level ClippingDetected condition.
Index save_wav(const Waveform& w, const std::string& path,
               SampleEncoding encoding);

}  // namespace seval

#endif  // SEVAL_WAV_IO_HPP_
