// seval/channel_sim.cpp

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

#include "seval/channel_sim.hpp"

#include <cmath>

#include "seval/iir.hpp"
#include "seval/rng.hpp"

namespace seval {

namespace {

constexpr double kMu = 255.0;

double mu_law_compand(double x) {
  const double ax = std::min(std::abs(x), 1.0);
  const double y = std::log1p(kMu * ax) / std::log1p(kMu);
  return std::copysign(y, x);
}

double mu_law_expand(double y) {
  const double ay = std::abs(y);
  const double x = (std::pow(1.0 + kMu, ay) - 1.0) / kMu;
  return std::copysign(x, y);
}

}  // namespace

void ChannelConfig::validate(int sample_rate_hz) const {
  if (bandpass_enabled) {
    if (!(bandpass_low_hz > 0.0 && bandpass_low_hz < bandpass_high_hz &&
          bandpass_high_hz < 0.5 * sample_rate_hz))
      throw Error(ErrorCode::kInvalidArgument,
                  "need 0 < low < high < Nyquist for the bandpass");
  }
  auto is_prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!is_prob(packet.p_loss) || !is_prob(packet.p_good_to_bad) ||
      !is_prob(packet.p_bad_to_good))
    throw Error(ErrorCode::kInvalidArgument, "probabilities must be in [0,1]");
  if (packet.loss_model != PacketLossModel::kNone && packet.frame_ms <= 0.0)
    throw Error(ErrorCode::kInvalidArgument, "frame_ms must be positive");
}

MixResult mix_at_snr(const Waveform& clean, const Waveform& noise,
                     double snr_db, std::uint64_t seed) {
  if (clean.sample_rate_hz != noise.sample_rate_hz)
    throw Error(ErrorCode::kLengthMismatch, "sample rates differ");
  const double p_clean = clean.samples.square().mean();
  const double p_noise_src = noise.samples.square().mean();
  if (p_clean < 1e-10)
    throw Error(ErrorCode::kSilentInput, "clean signal below -100 dBFS");
  if (p_noise_src < 1e-10)
    throw Error(ErrorCode::kSilentInput, "noise signal below -100 dBFS");

  // Noise segment: loop if too short, then crop at a seeded random offset.
  const Index n = clean.size();
  Xoshiro256StarStar rng(seed);
  Vec segment(n);
  const Index m = noise.size();
  const Index offset = static_cast<Index>(rng.next_below(
      static_cast<std::uint64_t>(m)));
  for (Index i = 0; i < n; ++i) segment[i] = noise.samples[(offset + i) % m];

  const double p_segment = segment.square().mean();
  if (p_segment < 1e-12)
    throw Error(ErrorCode::kSilentInput, "noise segment is silent");

  // Scale so 10 log10(P_clean / P_noise) == snr_db.
  const double target_noise_power = p_clean / std::pow(10.0, snr_db / 10.0);
  const double gain = std::sqrt(target_noise_power / p_segment);
  segment *= gain;

  MixResult out;
  out.noisy = Waveform(clean.samples + segment, clean.sample_rate_hz);
  out.achieved_snr_db =
      10.0 * std::log10(p_clean / segment.square().mean());
  return out;
}

Waveform telephone_channel(const Waveform& w, const ChannelConfig& cfg) {
  cfg.validate(w.sample_rate_hz);
  Vec y = w.samples;
  if (cfg.bandpass_enabled) {
    const BiquadCascade hp =
        butterworth_highpass(4, cfg.bandpass_low_hz, w.sample_rate_hz);
    const BiquadCascade lp =
        butterworth_lowpass(4, cfg.bandpass_high_hz, w.sample_rate_hz);
    const Index pad = static_cast<Index>(
        std::llround(3.0 * w.sample_rate_hz / cfg.bandpass_low_hz));
    y = filtfilt(hp, y, pad);
    y = filtfilt(lp, y, pad);
  }
  if (cfg.codec == CodecKind::kMuLaw) y = mu_law_roundtrip(y);
  return Waveform(std::move(y), w.sample_rate_hz);
}

Vec mu_law_roundtrip(const Eigen::Ref<const Vec>& x) {
  Vec y(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double companded = mu_law_compand(x[i]);
    // 8-bit uniform quantization of the companded value.
    const double quantized = std::round(companded * 127.0) / 127.0;
    y[i] = mu_law_expand(quantized);
  }
  return y;
}

PacketLossResult packet_loss(const Waveform& w, const ChannelConfig& cfg) {
  cfg.validate(w.sample_rate_hz);
  PacketLossResult out;
  out.output = w;
  if (cfg.packet.loss_model == PacketLossModel::kNone) return out;

  const Index frame_len = static_cast<Index>(
      std::llround(cfg.packet.frame_ms * 1e-3 * w.sample_rate_hz));
  if (frame_len < 1 || w.size() < frame_len)
    throw Error(ErrorCode::kInputTooShort, "under one packet frame");
  const Index frames = (w.size() + frame_len - 1) / frame_len;

  Xoshiro256StarStar rng(cfg.seed);
  std::vector<bool> lost(static_cast<std::size_t>(frames), false);
  if (cfg.packet.loss_model == PacketLossModel::kBernoulli) {
    for (Index f = 0; f < frames; ++f)
      lost[static_cast<std::size_t>(f)] = rng.bernoulli(cfg.packet.p_loss);
  } else {
    bool bad = false;  // start in the good state
    for (Index f = 0; f < frames; ++f) {
      lost[static_cast<std::size_t>(f)] = bad;
      const double p = bad ? cfg.packet.p_bad_to_good : cfg.packet.p_good_to_bad;
      if (rng.bernoulli(p)) bad = !bad;
    }
  }

  // Gain envelope: 0 inside lost frames with raised-cosine transitions.
  Vec gain = Vec::Ones(w.size());
  for (Index f = 0; f < frames; ++f) {
    if (!lost[static_cast<std::size_t>(f)]) continue;
    ++out.frames_dropped;
    const Index lo = f * frame_len;
    const Index hi = std::min<Index>(w.size(), lo + frame_len);
    gain.segment(lo, hi - lo).setZero();
  }
  // Raised-cosine tapers on the kept samples adjacent to each dropped
  // frame; the dropped span itself stays exactly zero.
  const Index ramp = static_cast<Index>(
      std::llround(cfg.packet.ramp_ms * 1e-3 * w.sample_rate_hz));
  if (ramp > 1) {
    Vec smoothed = gain;
    for (Index i = 1; i < w.size(); ++i) {
      if (gain[i] == gain[i - 1]) continue;
      if (gain[i] == 0.0) {  // fade out into the loss
        for (Index j = 0; j < ramp; ++j) {
          const Index k = i - ramp + j;
          if (k < 0 || k >= w.size()) continue;
          const double g =
              0.5 * (1.0 + std::cos(M_PI * (j + 1.0) / (ramp + 1.0)));
          smoothed[k] = std::min(smoothed[k], g);
        }
      } else {  // fade back in after the loss
        for (Index j = 0; j < ramp; ++j) {
          const Index k = i + j;
          if (k >= w.size()) break;
          const double g =
              0.5 * (1.0 - std::cos(M_PI * (j + 1.0) / (ramp + 1.0)));
          smoothed[k] = std::min(smoothed[k], g);
        }
      }
    }
    gain = smoothed;
  }
  out.output.samples = w.samples * gain;
  return out;
}

SimulationResult simulate_transmission(const Waveform& clean,
                                       const Waveform& noise,
                                       const ChannelConfig& cfg) {
  cfg.validate(clean.sample_rate_hz);
  SimulationResult out;
  out.record.config = cfg;
  out.record.seed_used = cfg.seed;

  Waveform stage = clean;
  if (cfg.snr_db) {
    MixResult mixed = mix_at_snr(clean, noise, *cfg.snr_db, cfg.seed);
    stage = std::move(mixed.noisy);
    out.record.achieved_snr_db = mixed.achieved_snr_db;
  }
  stage = telephone_channel(stage, cfg);
  PacketLossResult pl = packet_loss(stage, cfg);
  out.record.frames_dropped = pl.frames_dropped;
  out.degraded = std::move(pl.output);
  return out;
}

}  // namespace seval
