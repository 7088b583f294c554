// seval/metrics.hpp

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

#ifndef SEVAL_METRICS_HPP_
#define SEVAL_METRICS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "seval/types.hpp"

namespace seval {

enum class LlrAggregate { kMean, kMedian, kTrimmedMean };

/// Every numeric knob of the metric pipelines. The digest of these settings
/// is embedded in reports so results stay comparable across runs.
struct MetricConfig {
  // STOI (Taal et al.): 10 kHz internal rate, 40 dB VAD, 15 one-third-octave
  // bands from 150 Hz, 384 ms (30 frame) segments, -15 dB SDR clip.
  int stoi_rate_hz = 10000;
  int stoi_frame_len = 256;
  int stoi_fft_size = 512;
  double stoi_dyn_range_db = 40.0;
  int stoi_segment_frames = 30;
  double stoi_clip_db = -15.0;

  // LLR: 25 ms hann frames, quarter-window hop, LPC order 10, mean of the
  // smallest 95% of frame values.
  double llr_frame_ms = 25.0;
  int llr_order = 10;
  LlrAggregate llr_aggregate = LlrAggregate::kTrimmedMean;
  double llr_keep_fraction = 0.95;

  // CSII / NCM: 20 ERB-spaced bands in 150-7000 Hz with SII-style band
  // importance; +/-15 dB apparent-SNR clip.
  int band_count = 20;
  double band_lo_hz = 150.0;
  double band_hi_hz = 7000.0;
  int csii_win_length = 512;
  int csii_hop = 256;
  int csii_fft_size = 512;
  int csii_min_region_frames = 4;
  double sdr_clip_db = 15.0;

  // NCM envelopes: rectify + 25 Hz low-pass, sampled at 100 Hz.
  double envelope_rate_hz = 100.0;
  double envelope_lp_hz = 25.0;

  std::string digest() const;
};

struct MetricValue {
  double value = 0.0;
  bool ok = false;
  std::string error;  // error code name when !ok

  static MetricValue of(double v) { return {v, true, ""}; }
  static MetricValue failed(const std::string& why) { return {0.0, false, why}; }
};

struct MetricReport {
  MetricValue stoi;
  MetricValue llr;
  MetricValue csii_high;
  MetricValue csii_mid;
  MetricValue csii_low;
  MetricValue ncm;
  std::optional<MetricValue> pesq;  // present only when an adapter is set
  std::string config_digest;
};

struct Csii3 {
  MetricValue high, mid, low;
};

/// Short-time objective intelligibility in [-1, 1]; 1 on identical inputs.
double stoi(const Waveform& clean, const Waveform& degraded,
            const MetricConfig& cfg = {});

/// Log-likelihood ratio spectral distance; 0 on identical inputs.
double llr(const Waveform& clean, const Waveform& enhanced,
           const MetricConfig& cfg = {});

/// Frame-value aggregation used by llr (exposed for its contract tests).
double aggregate_frame_values(std::vector<double> values, LlrAggregate mode,
                              double keep_fraction);

/// Coherence-based intelligibility over high/mid/low level regions, each in
/// [0, 1]. A region with too few frames reports EmptyRegion for that
/// component only.
Csii3 csii(const Waveform& clean, const Waveform& degraded,
           const MetricConfig& cfg = {});

/// Normalized covariance measure in [0, 1]; 1 on identical inputs.
double ncm(const Waveform& clean, const Waveform& degraded,
           const MetricConfig& cfg = {});

/// External PESQ command. {clean} and {degraded} in the template are
/// replaced with 16 kHz pcm16 WAV paths; the last real number on stdout is
/// the score.
struct PesqAdapter {
  std::string command_template;
  double timeout_s = 30.0;
};

MetricReport evaluate_pair(const Waveform& clean, const Waveform& degraded,
                           const std::optional<PesqAdapter>& pesq_adapter = {},
                           const MetricConfig& cfg = {});

}  // namespace seval

#endif  // SEVAL_METRICS_HPP_
