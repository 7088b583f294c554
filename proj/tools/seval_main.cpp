// tools/seval_main.cpp

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

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "seval/cli_runner.hpp"
#include "seval/version.hpp"

namespace {

seval::RunConfig base_config(const std::string& config_path) {
  if (!config_path.empty()) return seval::load_run_config(config_path);
  if (const char* env = std::getenv("SEVAL_CONFIG"); env && *env)
    return seval::load_run_config(env);
  return seval::RunConfig{};
}

void split_system_spec(const std::string& spec, std::string& name,
                       std::string& dir) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) {
    dir = spec;
    name = std::filesystem::path(spec).filename().string();
    if (name.empty()) name = spec;
  } else {
    name = spec.substr(0, eq);
    dir = spec.substr(eq + 1);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seval: speech-enhancement evaluation toolkit"};
  app.set_version_flag("--version", std::string("seval ") + seval::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON run configuration (default: $SEVAL_CONFIG)");

  // Flags shared by the batch subcommands; applied on top of the config.
  struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::vector<std::string> formats;
    std::optional<std::string> out_dir;
    std::optional<std::string> manifest;
    bool truncate = false;
    std::optional<std::string> pesq_cmd;
  } ov;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", ov.seed, "PRNG seed");
    cmd->add_option("--workers", ov.workers, "worker thread count");
    cmd->add_option("--format", ov.formats,
                    "report formats: csv, json, markdown (repeatable)")
        ->check(CLI::IsMember({"csv", "json", "markdown"}));
    cmd->add_option("--out-dir", ov.out_dir, "output directory");
    cmd->add_option("--manifest", ov.manifest,
                    "CSV manifest overriding stem-based pairing");
    cmd->add_flag("--truncate-to-shorter", ov.truncate,
                  "allow length mismatches by truncating to the shorter file");
  };

  // synth
  auto* synth = app.add_subcommand(
      "synth", "synthesize a (clean, noisy, degraded) corpus");
  std::string synth_clean, synth_noise;
  std::optional<int> synth_count;
  std::optional<double> synth_clip_s, synth_snr;
  synth->add_option("--clean-dir", synth_clean, "pool of clean speech WAVs");
  synth->add_option("--noise-dir", synth_noise, "pool of noise WAVs");
  synth->add_option("--count", synth_count, "number of pairs to generate");
  synth->add_option("--clip-seconds", synth_clip_s, "output clip length");
  synth->add_option("--snr-db", synth_snr, "mixing SNR in dB");
  add_common(synth);

  // eval
  auto* eval = app.add_subcommand(
      "eval", "objective metric table over paired directories");
  std::string eval_clean;
  std::vector<std::string> eval_systems;
  std::string eval_enhanced;
  eval->add_option("--clean", eval_clean, "clean reference directory");
  eval->add_option("--system", eval_systems,
                   "system under test, NAME=DIR (repeatable)");
  eval->add_option("--enhanced", eval_enhanced,
                   "shorthand for a single system directory");
  eval->add_option("--pesq-cmd", ov.pesq_cmd,
                   "external PESQ command with {clean} and {degraded}");
  add_common(eval);

  // improve
  auto* improve = app.add_subcommand(
      "improve", "acoustic-improvement report over four directories");
  std::string imp_clean, imp_noisy, imp_baseline, imp_finetuned, imp_mode;
  improve->add_option("--clean", imp_clean, "clean reference directory");
  improve->add_option("--noisy", imp_noisy, "unprocessed noisy directory");
  improve->add_option("--baseline", imp_baseline, "baseline system directory");
  improve->add_option("--finetuned", imp_finetuned,
                      "finetuned system directory");
  improve->add_option("--mode", imp_mode,
                      "lld_timeseries or functional_vector")
      ->check(CLI::IsMember({"lld_timeseries", "functional_vector"}));
  add_common(improve);

  // tap
  auto* tap = app.add_subcommand("tap", "dump the T x 25 TAP matrix");
  std::string tap_input, tap_csv, tap_binary;
  tap->add_option("input", tap_input, "input WAV")->required();
  tap->add_option("--output", tap_csv, "CSV output path");
  tap->add_option("--binary", tap_binary, "binary container output path");

  // loss
  auto* loss = app.add_subcommand(
      "loss", "loss breakdown for a (clean, enhanced) pair");
  std::string loss_clean, loss_enhanced, loss_noisy, loss_out;
  std::optional<double> lambda1, lambda2, gamma;
  loss->add_option("--clean", loss_clean, "clean WAV")->required();
  loss->add_option("--enhanced", loss_enhanced, "enhanced WAV")->required();
  loss->add_option("--noisy", loss_noisy,
                   "noisy WAV (enables the mask-based objective)");
  loss->add_option("--lambda1", lambda1, "TAP weight in the Demucs objective");
  loss->add_option("--lambda2", lambda2, "STFT weight in the Demucs objective");
  loss->add_option("--gamma", gamma, "TAP weight in the FullSubNet objective");
  loss->add_option("--output", loss_out, "JSON output path ('-' for stdout)");
  loss->add_flag("--truncate-to-shorter", ov.truncate,
                 "truncate to the shorter input");

  // config
  auto* config = app.add_subcommand("config", "configuration utilities");
  auto* config_init =
      config->add_subcommand("init", "print the default configuration");
  std::string config_out;
  config_init->add_option("--output", config_out, "write to a file instead");

  CLI11_PARSE(app, argc, argv);

  try {
    seval::RunConfig cfg = base_config(config_path);
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.workers) cfg.workers = *ov.workers;
    if (!ov.formats.empty()) cfg.formats = ov.formats;
    if (ov.out_dir) cfg.out_dir = *ov.out_dir;
    if (ov.manifest) cfg.manifest_path = *ov.manifest;
    if (ov.truncate) cfg.truncate_to_shorter = true;
    if (ov.pesq_cmd) cfg.pesq_cmd = *ov.pesq_cmd;

    if (synth->parsed()) {
      if (!synth_clean.empty()) cfg.clean_dir = synth_clean;
      if (!synth_noise.empty()) cfg.noise_dir = synth_noise;
      if (synth_count) cfg.synth_count = *synth_count;
      if (synth_clip_s) cfg.synth_clip_seconds = *synth_clip_s;
      if (synth_snr) cfg.channel.snr_db = *synth_snr;
      return seval::run_synth(cfg, std::cout);
    }
    if (eval->parsed()) {
      if (!eval_clean.empty()) cfg.clean_dir = eval_clean;
      if (!eval_enhanced.empty())
        cfg.systems.emplace_back("enhanced", eval_enhanced);
      for (const std::string& spec : eval_systems) {
        std::string name, dir;
        split_system_spec(spec, name, dir);
        cfg.systems.emplace_back(name, dir);
      }
      return seval::run_eval(cfg, std::cout);
    }
    if (improve->parsed()) {
      if (!imp_clean.empty()) cfg.clean_dir = imp_clean;
      if (!imp_noisy.empty()) cfg.noisy_dir = imp_noisy;
      if (!imp_baseline.empty()) cfg.baseline_dir = imp_baseline;
      if (!imp_finetuned.empty()) cfg.finetuned_dir = imp_finetuned;
      if (imp_mode == "functional_vector")
        cfg.improve_mode = seval::ImprovementMode::kFunctionalVector;
      else if (imp_mode == "lld_timeseries")
        cfg.improve_mode = seval::ImprovementMode::kLldTimeseries;
      return seval::run_improve(cfg, std::cout);
    }
    if (tap->parsed()) {
      if (tap_csv.empty() && tap_binary.empty())
        tap_csv = std::filesystem::path(tap_input).stem().string() + "_tap.csv";
      return seval::run_tap(cfg, tap_input, tap_csv, tap_binary, std::cout);
    }
    if (loss->parsed()) {
      if (lambda1) cfg.loss_weights.lambda1 = *lambda1;
      if (lambda2) cfg.loss_weights.lambda2 = *lambda2;
      if (gamma) cfg.loss_weights.gamma = *gamma;
      return seval::run_loss(cfg, loss_clean, loss_enhanced, loss_noisy,
                             loss_out, std::cout);
    }
    if (config_init->parsed()) {
      const std::string text = seval::run_config_to_json(cfg);
      if (config_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream os(config_out, std::ios::trunc);
        os << text;
        if (!os) {
          std::cerr << "seval: cannot write " << config_out << "\n";
          return 2;
        }
        std::cout << "wrote " << config_out << "\n";
      }
      return 0;
    }
    std::cerr << "seval: no subcommand\n";
    return 2;
  } catch (const seval::Error& e) {
    std::cerr << "seval: " << e.what() << "\n";
    return e.code() == seval::ErrorCode::kConfigInvalid ||
                   e.code() == seval::ErrorCode::kEmptyPool
               ? 2
               : 1;
  } catch (const std::exception& e) {
    std::cerr << "seval: " << e.what() << "\n";
    return 1;
  }
}
