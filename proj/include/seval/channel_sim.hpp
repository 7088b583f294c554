// seval/channel_sim.hpp

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

#ifndef SEVAL_CHANNEL_SIM_HPP_
#define SEVAL_CHANNEL_SIM_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include "seval/types.hpp"

namespace seval {

enum class CodecKind { kNone, kMuLaw };
enum class PacketLossModel { kNone, kBernoulli, kGilbertElliott };

struct PacketConfig {
  PacketLossModel loss_model = PacketLossModel::kNone;
  double frame_ms = 20.0;
  double p_loss = 0.0;          // Bernoulli
  double p_good_to_bad = 0.0;   // Gilbert-Elliott
  double p_bad_to_good = 1.0;
  double ramp_ms = 2.0;         // raised-cosine edges around dropped frames
};

/// Deterministic telephone-grade transmission chain. (input, config) fully
/// determines the output; every random choice is drawn from the seeded
/// generator.
struct ChannelConfig {
  std::optional<double> snr_db = 5.0;  // nullopt: no noise mixing
  bool bandpass_enabled = true;
  double bandpass_low_hz = 300.0;
  double bandpass_high_hz = 3400.0;
  CodecKind codec = CodecKind::kMuLaw;
  PacketConfig packet;
  std::uint64_t seed = 0;
  std::string condition_label;  // free-form tag carried into records

  void validate(int sample_rate_hz) const;
};

/// Provenance sidecar: same input + record reproduces the output bit-exactly.
struct TransmissionRecord {
  ChannelConfig config;
  Index frames_dropped = 0;
  double achieved_snr_db = 0.0;
  std::uint64_t seed_used = 0;
};

struct MixResult {
  Waveform noisy;
  double achieved_snr_db = 0.0;
};

/// Crops/loops the noise to the clean length at a seeded random offset and
/// scales it so 10 log10(P_clean / P_noise) equals snr_db.
MixResult mix_at_snr(const Waveform& clean, const Waveform& noise,
                     double snr_db, std::uint64_t seed);

/// Zero-phase 300-3400 Hz Butterworth bandpass, then optional 8-bit mu-law
/// companding (mu = 255).
Waveform telephone_channel(const Waveform& w, const ChannelConfig& cfg);

struct PacketLossResult {
  Waveform output;
  Index frames_dropped = 0;
};

PacketLossResult packet_loss(const Waveform& w, const ChannelConfig& cfg);

struct SimulationResult {
  Waveform degraded;
  TransmissionRecord record;
};

/// Full pipeline: mix -> bandpass -> codec -> packet loss. Output length
/// equals the clean length.
SimulationResult simulate_transmission(const Waveform& clean,
                                       const Waveform& noise,
                                       const ChannelConfig& cfg);

/// 8-bit mu-law compand/expand roundtrip (mu = 255), exposed for tests.
Vec mu_law_roundtrip(const Eigen::Ref<const Vec>& x);

}  // namespace seval

#endif  // SEVAL_CHANNEL_SIM_HPP_
