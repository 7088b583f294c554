// seval/cli_runner.hpp

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

#ifndef SEVAL_CLI_RUNNER_HPP_
#define SEVAL_CLI_RUNNER_HPP_

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "seval/channel_sim.hpp"
#include "seval/improvement.hpp"
#include "seval/losses.hpp"
#include "seval/metrics.hpp"

namespace seval {

/// Everything a batch run needs. Serialized as hierarchical JSON; every
/// field has a documented default (see `seval config init`).
struct RunConfig {
  std::uint64_t seed = 42;
  int workers = 1;
  std::vector<std::string> formats = {"csv", "json", "markdown"};

  // Directory roles; pairing is by identical file stem unless a manifest
  // overrides it.
  std::string clean_dir;
  std::string noisy_dir;
  std::string baseline_dir;
  std::string finetuned_dir;
  std::string noise_dir;
  std::string out_dir = "seval_out";
  std::vector<std::pair<std::string, std::string>> systems;  // name -> dir
  std::string manifest_path;

  // synth
  int synth_count = 10;
  double synth_clip_seconds = 10.0;
  int sample_rate_hz = 16000;
  double gain_target_dbfs = -25.0;
  std::vector<double> synth_snr_choices;  // empty: always channel.snr_db
  ChannelConfig channel;

  LossWeights loss_weights;

  MetricConfig metrics;
  std::string pesq_cmd;  // empty: PESQ not attempted
  double pesq_timeout_s = 30.0;
  bool truncate_to_shorter = false;

  ImprovementMode improve_mode = ImprovementMode::kLldTimeseries;
};

RunConfig load_run_config(const std::string& path);
std::string run_config_to_json(const RunConfig& cfg);

/// Exit status contract: 0 on full success, 1 when any per-file failure was
/// recorded (the run still completes the other files), 2 on invalid
/// configuration (thrown as Error before any work).
int run_eval(const RunConfig& cfg, std::ostream& log);
int run_synth(const RunConfig& cfg, std::ostream& log);
int run_improve(const RunConfig& cfg, std::ostream& log);

/// `tap`: TapMatrix CSV (and optional binary) for one input file.
int run_tap(const RunConfig& cfg, const std::string& input_wav,
            const std::string& csv_out, const std::string& binary_out,
            std::ostream& log);

/// `loss`: LossBreakdown JSON for a (clean, enhanced) pair; when a noisy
/// reference is given the FullSubNet objective is reported as well.
int run_loss(const RunConfig& cfg, const std::string& clean_wav,
             const std::string& enhanced_wav, const std::string& noisy_wav,
             const std::string& json_out, std::ostream& log);

}  // namespace seval

#endif  // SEVAL_CLI_RUNNER_HPP_
