// seval/cli_runner.cpp

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

#include "seval/cli_runner.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "seval/rng.hpp"
#include "seval/resample.hpp"
#include "seval/version.hpp"
#include "seval/wav_io.hpp"

namespace seval {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------- helpers

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  os << content;
  if (!os) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

bool wants_format(const RunConfig& cfg, const std::string& f) {
  return std::find(cfg.formats.begin(), cfg.formats.end(), f) !=
         cfg.formats.end();
}

std::string meta_comment(const RunConfig& cfg) {
  return "# seval " + std::string(kVersion) +
         " config_digest=" + cfg.metrics.digest() +
         " seed=" + std::to_string(cfg.seed) + "\n";
}

json meta_json(const RunConfig& cfg) {
  return json{{"toolkit", "seval"},
              {"version", kVersion},
              {"config_digest", cfg.metrics.digest()},
              {"seed", cfg.seed}};
}

std::vector<std::string> wav_stems(const fs::path& dir) {
  if (!fs::is_directory(dir))
    throw Error(ErrorCode::kConfigInvalid,
                "not a directory: " + dir.string());
  std::vector<std::string> stems;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (ext == ".wav") stems.push_back(entry.path().stem().string());
  }
  std::sort(stems.begin(), stems.end());
  return stems;
}

std::optional<fs::path> find_wav(const fs::path& dir, const std::string& stem) {
  for (const char* ext : {".wav", ".WAV"}) {
    const fs::path p = dir / (stem + ext);
    if (fs::exists(p)) return p;
  }
  return std::nullopt;
}

// Optional manifest: CSV whose header is "stem,<role>,<role>,..." and whose
// rows carry explicit paths, overriding stem-based discovery.
using Manifest = std::map<std::string, std::map<std::string, std::string>>;

Manifest load_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kConfigInvalid, "cannot open " + path);
  std::string line;
  if (!std::getline(is, line))
    throw Error(ErrorCode::kConfigInvalid, "empty manifest " + path);
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(s);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  const std::vector<std::string> header = split(line);
  if (header.size() < 2 || header[0] != "stem")
    throw Error(ErrorCode::kConfigInvalid, "manifest header must start 'stem'");
  Manifest m;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != header.size())
      throw Error(ErrorCode::kConfigInvalid, "ragged manifest row: " + line);
    for (std::size_t i = 1; i < cells.size(); ++i)
      m[cells[0]][header[i]] = cells[i];
  }
  return m;
}

fs::path resolve_role(const Manifest& manifest, const std::string& stem,
                      const std::string& role, const fs::path& dir) {
  if (!manifest.empty()) {
    auto s = manifest.find(stem);
    if (s != manifest.end()) {
      auto r = s->second.find(role);
      if (r != s->second.end() && !r->second.empty()) return r->second;
    }
    throw Error(ErrorCode::kMissingPair,
                stem + " has no '" + role + "' entry in the manifest");
  }
  const auto p = find_wav(dir, stem);
  if (!p)
    throw Error(ErrorCode::kMissingPair,
                stem + " missing in " + dir.string());
  return *p;
}

void parallel_for(int workers, Index count,
                  const std::function<void(Index)>& fn) {
  if (count <= 0) return;
  const int n_threads =
      std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (n_threads == 1) {
    for (Index i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<Index> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t)
    pool.emplace_back([&] {
      for (Index i = next++; i < count; i = next++) fn(i);
    });
  for (auto& th : pool) th.join();
}

struct AlignedPair {
  Waveform a, b;
};

AlignedPair load_aligned(const fs::path& pa, const fs::path& pb,
                         bool truncate_to_shorter) {
  AlignedPair out;
  out.a = load_wav(pa.string()).first;
  out.b = load_wav(pb.string()).first;
  if (out.a.sample_rate_hz != out.b.sample_rate_hz)
    throw Error(ErrorCode::kLengthMismatch,
                "sample rates differ; resample inputs first");
  if (out.a.size() != out.b.size()) {
    if (!truncate_to_shorter)
      throw Error(ErrorCode::kLengthMismatch,
                  "lengths differ (pass --truncate-to-shorter to allow)");
    const Index n = std::min(out.a.size(), out.b.size());
    out.a.samples.conservativeResize(n);
    out.b.samples.conservativeResize(n);
  }
  return out;
}

// ------------------------------------------------------- config <-> JSON

std::string codec_name(CodecKind k) {
  return k == CodecKind::kMuLaw ? "mu_law" : "none";
}

CodecKind codec_from(const std::string& s) {
  if (s == "mu_law") return CodecKind::kMuLaw;
  if (s == "none") return CodecKind::kNone;
  throw Error(ErrorCode::kConfigInvalid, "unknown codec: " + s);
}

std::string loss_model_name(PacketLossModel m) {
  switch (m) {
    case PacketLossModel::kNone: return "none";
    case PacketLossModel::kBernoulli: return "bernoulli";
    case PacketLossModel::kGilbertElliott: return "gilbert_elliott";
  }
  return "none";
}

PacketLossModel loss_model_from(const std::string& s) {
  if (s == "none") return PacketLossModel::kNone;
  if (s == "bernoulli") return PacketLossModel::kBernoulli;
  if (s == "gilbert_elliott") return PacketLossModel::kGilbertElliott;
  throw Error(ErrorCode::kConfigInvalid, "unknown loss model: " + s);
}

std::string aggregate_name(LlrAggregate a) {
  switch (a) {
    case LlrAggregate::kMean: return "mean";
    case LlrAggregate::kMedian: return "median";
    case LlrAggregate::kTrimmedMean: return "trimmed_mean";
  }
  return "trimmed_mean";
}

LlrAggregate aggregate_from(const std::string& s) {
  if (s == "mean") return LlrAggregate::kMean;
  if (s == "median") return LlrAggregate::kMedian;
  if (s == "trimmed_mean") return LlrAggregate::kTrimmedMean;
  throw Error(ErrorCode::kConfigInvalid, "unknown llr aggregate: " + s);
}

json config_to_json_obj(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["formats"] = c.formats;
  j["paths"] = {{"clean_dir", c.clean_dir},       {"noisy_dir", c.noisy_dir},
                {"baseline_dir", c.baseline_dir}, {"finetuned_dir", c.finetuned_dir},
                {"noise_dir", c.noise_dir},       {"out_dir", c.out_dir},
                {"manifest", c.manifest_path}};
  json systems = json::array();
  for (const auto& [name, dir] : c.systems)
    systems.push_back({{"name", name}, {"dir", dir}});
  j["systems"] = systems;
  j["synth"] = {{"count", c.synth_count},
                {"clip_seconds", c.synth_clip_seconds},
                {"sample_rate_hz", c.sample_rate_hz},
                {"gain_target_dbfs", c.gain_target_dbfs},
                {"snr_choices", c.synth_snr_choices}};
  json ch;
  if (c.channel.snr_db)
    ch["snr_db"] = *c.channel.snr_db;
  else
    ch["snr_db"] = nullptr;
  ch["bandpass"] = {{"enabled", c.channel.bandpass_enabled},
                    {"low_hz", c.channel.bandpass_low_hz},
                    {"high_hz", c.channel.bandpass_high_hz}};
  ch["codec"] = codec_name(c.channel.codec);
  ch["packet"] = {{"loss_model", loss_model_name(c.channel.packet.loss_model)},
                  {"frame_ms", c.channel.packet.frame_ms},
                  {"p_loss", c.channel.packet.p_loss},
                  {"p_good_to_bad", c.channel.packet.p_good_to_bad},
                  {"p_bad_to_good", c.channel.packet.p_bad_to_good},
                  {"ramp_ms", c.channel.packet.ramp_ms}};
  ch["condition_label"] = c.channel.condition_label;
  j["channel"] = ch;
  j["loss_weights"] = {{"lambda1", c.loss_weights.lambda1},
                       {"lambda2", c.loss_weights.lambda2},
                       {"gamma", c.loss_weights.gamma}};
  j["metrics"] = {{"stoi_rate_hz", c.metrics.stoi_rate_hz},
                  {"stoi_frame_len", c.metrics.stoi_frame_len},
                  {"stoi_fft_size", c.metrics.stoi_fft_size},
                  {"stoi_dyn_range_db", c.metrics.stoi_dyn_range_db},
                  {"stoi_segment_frames", c.metrics.stoi_segment_frames},
                  {"stoi_clip_db", c.metrics.stoi_clip_db},
                  {"llr_frame_ms", c.metrics.llr_frame_ms},
                  {"llr_order", c.metrics.llr_order},
                  {"llr_aggregate", aggregate_name(c.metrics.llr_aggregate)},
                  {"llr_keep_fraction", c.metrics.llr_keep_fraction},
                  {"band_count", c.metrics.band_count},
                  {"band_lo_hz", c.metrics.band_lo_hz},
                  {"band_hi_hz", c.metrics.band_hi_hz},
                  {"csii_win_length", c.metrics.csii_win_length},
                  {"csii_hop", c.metrics.csii_hop},
                  {"csii_fft_size", c.metrics.csii_fft_size},
                  {"csii_min_region_frames", c.metrics.csii_min_region_frames},
                  {"sdr_clip_db", c.metrics.sdr_clip_db},
                  {"envelope_rate_hz", c.metrics.envelope_rate_hz},
                  {"envelope_lp_hz", c.metrics.envelope_lp_hz}};
  j["pesq"] = {{"command", c.pesq_cmd}, {"timeout_s", c.pesq_timeout_s}};
  j["eval"] = {{"truncate_to_shorter", c.truncate_to_shorter}};
  j["improve"] = {{"mode", improvement_mode_name(c.improve_mode)}};
  return j;
}

RunConfig config_from_json_obj(const json& j) {
  RunConfig c;
  try {
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    c.formats = j.value("formats", c.formats);
    if (j.contains("paths")) {
      const json& p = j["paths"];
      c.clean_dir = p.value("clean_dir", c.clean_dir);
      c.noisy_dir = p.value("noisy_dir", c.noisy_dir);
      c.baseline_dir = p.value("baseline_dir", c.baseline_dir);
      c.finetuned_dir = p.value("finetuned_dir", c.finetuned_dir);
      c.noise_dir = p.value("noise_dir", c.noise_dir);
      c.out_dir = p.value("out_dir", c.out_dir);
      c.manifest_path = p.value("manifest", c.manifest_path);
    }
    if (j.contains("systems"))
      for (const json& s : j["systems"])
        c.systems.emplace_back(s.at("name").get<std::string>(),
                               s.at("dir").get<std::string>());
    if (j.contains("synth")) {
      const json& s = j["synth"];
      c.synth_count = s.value("count", c.synth_count);
      c.synth_clip_seconds = s.value("clip_seconds", c.synth_clip_seconds);
      c.sample_rate_hz = s.value("sample_rate_hz", c.sample_rate_hz);
      c.gain_target_dbfs = s.value("gain_target_dbfs", c.gain_target_dbfs);
      c.synth_snr_choices =
          s.value("snr_choices", c.synth_snr_choices);
    }
    if (j.contains("channel")) {
      const json& ch = j["channel"];
      if (ch.contains("snr_db")) {
        if (ch["snr_db"].is_null())
          c.channel.snr_db.reset();
        else
          c.channel.snr_db = ch["snr_db"].get<double>();
      }
      if (ch.contains("bandpass")) {
        const json& b = ch["bandpass"];
        c.channel.bandpass_enabled = b.value("enabled", true);
        c.channel.bandpass_low_hz = b.value("low_hz", 300.0);
        c.channel.bandpass_high_hz = b.value("high_hz", 3400.0);
      }
      c.channel.codec = codec_from(ch.value("codec", std::string("mu_law")));
      if (ch.contains("packet")) {
        const json& p = ch["packet"];
        c.channel.packet.loss_model =
            loss_model_from(p.value("loss_model", std::string("none")));
        c.channel.packet.frame_ms = p.value("frame_ms", 20.0);
        c.channel.packet.p_loss = p.value("p_loss", 0.0);
        c.channel.packet.p_good_to_bad = p.value("p_good_to_bad", 0.0);
        c.channel.packet.p_bad_to_good = p.value("p_bad_to_good", 1.0);
        c.channel.packet.ramp_ms = p.value("ramp_ms", 2.0);
      }
      c.channel.condition_label = ch.value("condition_label", std::string());
    }
    if (j.contains("loss_weights")) {
      const json& w = j["loss_weights"];
      c.loss_weights.lambda1 = w.value("lambda1", c.loss_weights.lambda1);
      c.loss_weights.lambda2 = w.value("lambda2", c.loss_weights.lambda2);
      c.loss_weights.gamma = w.value("gamma", c.loss_weights.gamma);
    }
    if (j.contains("metrics")) {
      const json& m = j["metrics"];
      MetricConfig& mc = c.metrics;
      mc.stoi_rate_hz = m.value("stoi_rate_hz", mc.stoi_rate_hz);
      mc.stoi_frame_len = m.value("stoi_frame_len", mc.stoi_frame_len);
      mc.stoi_fft_size = m.value("stoi_fft_size", mc.stoi_fft_size);
      mc.stoi_dyn_range_db = m.value("stoi_dyn_range_db", mc.stoi_dyn_range_db);
      mc.stoi_segment_frames =
          m.value("stoi_segment_frames", mc.stoi_segment_frames);
      mc.stoi_clip_db = m.value("stoi_clip_db", mc.stoi_clip_db);
      mc.llr_frame_ms = m.value("llr_frame_ms", mc.llr_frame_ms);
      mc.llr_order = m.value("llr_order", mc.llr_order);
      mc.llr_aggregate = aggregate_from(
          m.value("llr_aggregate", std::string("trimmed_mean")));
      mc.llr_keep_fraction = m.value("llr_keep_fraction", mc.llr_keep_fraction);
      mc.band_count = m.value("band_count", mc.band_count);
      mc.band_lo_hz = m.value("band_lo_hz", mc.band_lo_hz);
      mc.band_hi_hz = m.value("band_hi_hz", mc.band_hi_hz);
      mc.csii_win_length = m.value("csii_win_length", mc.csii_win_length);
      mc.csii_hop = m.value("csii_hop", mc.csii_hop);
      mc.csii_fft_size = m.value("csii_fft_size", mc.csii_fft_size);
      mc.csii_min_region_frames =
          m.value("csii_min_region_frames", mc.csii_min_region_frames);
      mc.sdr_clip_db = m.value("sdr_clip_db", mc.sdr_clip_db);
      mc.envelope_rate_hz = m.value("envelope_rate_hz", mc.envelope_rate_hz);
      mc.envelope_lp_hz = m.value("envelope_lp_hz", mc.envelope_lp_hz);
    }
    if (j.contains("pesq")) {
      c.pesq_cmd = j["pesq"].value("command", std::string());
      c.pesq_timeout_s = j["pesq"].value("timeout_s", 30.0);
    }
    if (j.contains("eval"))
      c.truncate_to_shorter = j["eval"].value("truncate_to_shorter", false);
    if (j.contains("improve")) {
      const std::string mode =
          j["improve"].value("mode", std::string("lld_timeseries"));
      if (mode == "lld_timeseries")
        c.improve_mode = ImprovementMode::kLldTimeseries;
      else if (mode == "functional_vector")
        c.improve_mode = ImprovementMode::kFunctionalVector;
      else
        throw Error(ErrorCode::kConfigInvalid, "unknown improve mode: " + mode);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigInvalid, e.what());
  }
  return c;
}

// ------------------------------------------------------------ eval runner

struct PairOutcome {
  std::string stem;
  std::string status = "ok";  // or an error code name
  MetricReport report;
};

json metric_value_json(const MetricValue& v) {
  if (!v.ok) return json{{"status", v.error}};
  return json{{"status", "ok"}, {"value", v.value}};
}

std::string metric_cell(const MetricValue& v) {
  return v.ok ? fmt_num(v.value) : v.error;
}

struct SystemSummary {
  std::map<std::string, double> mean;  // metric -> mean over ok files
  std::map<std::string, int> count;
  int files_failed = 0;
};

const std::vector<std::string>& metric_row_names() {
  static const std::vector<std::string> kRows = {
      "pesq", "llr", "stoi", "csii_high", "csii_mid", "csii_low", "ncm"};
  return kRows;
}

const MetricValue* metric_by_name(const MetricReport& r, const std::string& m) {
  if (m == "pesq") return r.pesq ? &*r.pesq : nullptr;
  if (m == "llr") return &r.llr;
  if (m == "stoi") return &r.stoi;
  if (m == "csii_high") return &r.csii_high;
  if (m == "csii_mid") return &r.csii_mid;
  if (m == "csii_low") return &r.csii_low;
  if (m == "ncm") return &r.ncm;
  return nullptr;
}

bool pair_failed(const PairOutcome& o, bool pesq_requested) {
  if (o.status != "ok") return true;
  for (const std::string& m : metric_row_names()) {
    if (m == "pesq") {
      if (pesq_requested && (!o.report.pesq || !o.report.pesq->ok)) return true;
      continue;
    }
    const MetricValue* v = metric_by_name(o.report, m);
    if (v && !v->ok) return true;
  }
  return false;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kConfigInvalid, "cannot open " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigInvalid, e.what());
  }
  return config_from_json_obj(j);
}

std::string run_config_to_json(const RunConfig& cfg) {
  return config_to_json_obj(cfg).dump(2) + "\n";
}

int run_eval(const RunConfig& cfg, std::ostream& log) {
  if (cfg.clean_dir.empty())
    throw Error(ErrorCode::kConfigInvalid, "eval needs a clean directory");
  if (cfg.systems.empty())
    throw Error(ErrorCode::kConfigInvalid, "eval needs at least one system");
  const Manifest manifest =
      cfg.manifest_path.empty() ? Manifest{} : load_manifest(cfg.manifest_path);

  const std::vector<std::string> stems =
      manifest.empty() ? wav_stems(cfg.clean_dir) : [&] {
        std::vector<std::string> s;
        for (const auto& [stem, _] : manifest) s.push_back(stem);
        return s;
      }();
  if (stems.empty())
    throw Error(ErrorCode::kConfigInvalid, "no .wav files to evaluate");

  fs::create_directories(cfg.out_dir);
  const bool pesq_requested = !cfg.pesq_cmd.empty();
  std::optional<PesqAdapter> adapter;
  if (pesq_requested) adapter = PesqAdapter{cfg.pesq_cmd, cfg.pesq_timeout_s};

  std::map<std::string, std::vector<PairOutcome>> outcomes;
  int total_failures = 0;
  for (const auto& [sys_name, sys_dir] : cfg.systems) {
    std::vector<PairOutcome> rows(stems.size());
    parallel_for(cfg.workers, static_cast<Index>(stems.size()), [&](Index i) {
      PairOutcome& row = rows[static_cast<std::size_t>(i)];
      row.stem = stems[static_cast<std::size_t>(i)];
      try {
        const fs::path clean_path =
            resolve_role(manifest, row.stem, "clean", cfg.clean_dir);
        const fs::path sys_path =
            resolve_role(manifest, row.stem, sys_name, sys_dir);
        const AlignedPair pair =
            load_aligned(clean_path, sys_path, cfg.truncate_to_shorter);
        row.report = evaluate_pair(pair.a, pair.b, adapter, cfg.metrics);
      } catch (const Error& e) {
        row.status = error_code_name(e.code());
      }
    });
    for (const PairOutcome& row : rows)
      if (pair_failed(row, pesq_requested)) ++total_failures;
    outcomes.emplace(sys_name, std::move(rows));
  }

  // Summaries: mean over files where the metric succeeded.
  std::map<std::string, SystemSummary> summaries;
  for (const auto& [sys_name, rows] : outcomes) {
    SystemSummary& s = summaries[sys_name];
    for (const PairOutcome& row : rows) {
      if (row.status != "ok") {
        ++s.files_failed;
        continue;
      }
      for (const std::string& m : metric_row_names()) {
        const MetricValue* v = metric_by_name(row.report, m);
        if (v && v->ok) {
          s.mean[m] += v->value;
          s.count[m] += 1;
        }
      }
    }
    for (auto& [m, sum] : s.mean) sum /= s.count[m];
  }

  // Emission, deterministic order throughout.
  if (wants_format(cfg, "csv")) {
    std::ostringstream os;
    os << meta_comment(cfg) << "metric";
    for (const auto& [sys_name, _] : outcomes) os << "," << sys_name;
    os << "\n";
    for (const std::string& m : metric_row_names()) {
      os << m;
      for (const auto& [sys_name, _] : outcomes) {
        const SystemSummary& s = summaries[sys_name];
        os << ",";
        if (s.count.count(m))
          os << fmt_num(s.mean.at(m));
        else
          os << "n/a";
      }
      os << "\n";
    }
    write_text_file(fs::path(cfg.out_dir) / "eval_summary.csv", os.str());

    std::ostringstream fo;
    fo << meta_comment(cfg)
       << "system,stem,status,pesq,llr,stoi,csii_high,csii_mid,csii_low,ncm\n";
    for (const auto& [sys_name, rows] : outcomes) {
      for (const PairOutcome& row : rows) {
        fo << sys_name << "," << row.stem << "," << row.status;
        for (const std::string& m : metric_row_names()) {
          fo << ",";
          if (row.status != "ok") continue;
          const MetricValue* v = metric_by_name(row.report, m);
          if (m == "pesq" && !row.report.pesq) {
            fo << "n/a";
          } else if (v) {
            fo << metric_cell(*v);
          }
        }
        fo << "\n";
      }
    }
    write_text_file(fs::path(cfg.out_dir) / "eval_files.csv", fo.str());
  }

  if (wants_format(cfg, "json")) {
    json j;
    j["meta"] = meta_json(cfg);
    json systems = json::object();
    for (const auto& [sys_name, rows] : outcomes) {
      const SystemSummary& s = summaries[sys_name];
      json summary = json::object();
      for (const std::string& m : metric_row_names()) {
        if (s.count.count(m))
          summary[m] = s.mean.at(m);
        else
          summary[m] = nullptr;
      }
      summary["files_failed"] = s.files_failed;
      summary["files_total"] = rows.size();
      json files = json::object();
      for (const PairOutcome& row : rows) {
        json r;
        r["status"] = row.status;
        if (row.status == "ok") {
          r["stoi"] = metric_value_json(row.report.stoi);
          r["llr"] = metric_value_json(row.report.llr);
          r["csii_high"] = metric_value_json(row.report.csii_high);
          r["csii_mid"] = metric_value_json(row.report.csii_mid);
          r["csii_low"] = metric_value_json(row.report.csii_low);
          r["ncm"] = metric_value_json(row.report.ncm);
          if (row.report.pesq) r["pesq"] = metric_value_json(*row.report.pesq);
        }
        files[row.stem] = r;
      }
      systems[sys_name] = {{"summary", summary}, {"files", files}};
    }
    j["systems"] = systems;
    write_text_file(fs::path(cfg.out_dir) / "eval_report.json",
                    j.dump(2) + "\n");
  }

  if (wants_format(cfg, "markdown")) {
    std::ostringstream os;
    os << "# Evaluation results\n\n"
       << "seval " << kVersion << ", config digest `" << cfg.metrics.digest()
       << "`, seed " << cfg.seed << "\n\n| metric |";
    for (const auto& [sys_name, _] : outcomes) os << " " << sys_name << " |";
    os << "\n|---|";
    for (std::size_t i = 0; i < outcomes.size(); ++i) os << "---|";
    os << "\n";
    for (const std::string& m : metric_row_names()) {
      os << "| " << m << " |";
      for (const auto& [sys_name, _] : outcomes) {
        const SystemSummary& s = summaries[sys_name];
        if (s.count.count(m))
          os << " " << fmt_num(s.mean.at(m)) << " |";
        else
          os << " n/a |";
      }
      os << "\n";
    }
    write_text_file(fs::path(cfg.out_dir) / "eval_summary.md", os.str());
  }

  for (const auto& [sys_name, rows] : outcomes) {
    int failed = 0;
    for (const PairOutcome& row : rows)
      if (pair_failed(row, pesq_requested)) ++failed;
    log << "eval: system '" << sys_name << "': " << rows.size() - failed
        << "/" << rows.size() << " pairs ok\n";
  }
  return total_failures == 0 ? 0 : 1;
}

// ----------------------------------------------------------- synth runner

int run_synth(const RunConfig& cfg, std::ostream& log) {
  if (cfg.clean_dir.empty() || cfg.noise_dir.empty())
    throw Error(ErrorCode::kConfigInvalid, "synth needs clean and noise pools");
  const std::vector<std::string> clean_pool = wav_stems(cfg.clean_dir);
  const std::vector<std::string> noise_pool = wav_stems(cfg.noise_dir);
  if (clean_pool.empty())
    throw Error(ErrorCode::kEmptyPool, "no .wav files in " + cfg.clean_dir);
  if (noise_pool.empty())
    throw Error(ErrorCode::kEmptyPool, "no .wav files in " + cfg.noise_dir);
  if (cfg.synth_count <= 0)
    throw Error(ErrorCode::kConfigInvalid, "synth count must be positive");

  const fs::path out(cfg.out_dir);
  fs::create_directories(out / "clean");
  fs::create_directories(out / "noisy");
  fs::create_directories(out / "degraded");
  fs::create_directories(out / "records");

  const Index clip_len = static_cast<Index>(
      std::llround(cfg.synth_clip_seconds * cfg.sample_rate_hz));
  std::atomic<int> failures{0};
  std::mutex log_mutex;

  parallel_for(cfg.workers, cfg.synth_count, [&](Index i) {
    char stem[32];
    std::snprintf(stem, sizeof(stem), "pair_%04d", static_cast<int>(i));
    try {
      Xoshiro256StarStar rng = Xoshiro256StarStar::stream(cfg.seed, i);

      const std::string& clean_stem =
          clean_pool[rng.next_below(clean_pool.size())];
      const std::string& noise_stem =
          noise_pool[rng.next_below(noise_pool.size())];
      Waveform clean =
          load_wav(find_wav(cfg.clean_dir, clean_stem)->string()).first;
      Waveform noise =
          load_wav(find_wav(cfg.noise_dir, noise_stem)->string()).first;
      if (clean.sample_rate_hz != cfg.sample_rate_hz)
        clean = resample(clean, cfg.sample_rate_hz);
      if (noise.sample_rate_hz != cfg.sample_rate_hz)
        noise = resample(noise, cfg.sample_rate_hz);
      clean = gain_normalize(clean, cfg.gain_target_dbfs);
      noise = gain_normalize(noise, cfg.gain_target_dbfs);

      // Seeded crop (with wrap-around) to the requested clip length.
      Vec clip(clip_len);
      const Index offset =
          static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(clean.size())));
      for (Index k = 0; k < clip_len; ++k)
        clip[k] = clean.samples[(offset + k) % clean.size()];
      const Waveform clean_clip(std::move(clip), cfg.sample_rate_hz);

      ChannelConfig channel = cfg.channel;
      channel.seed = rng.next_u64();
      if (!cfg.synth_snr_choices.empty())
        channel.snr_db = cfg.synth_snr_choices[static_cast<std::size_t>(i) %
                                               cfg.synth_snr_choices.size()];

      // Mix-only reference alongside the fully degraded output.
      Waveform noisy = clean_clip;
      double achieved_snr = 0.0;
      if (channel.snr_db) {
        MixResult mixed =
            mix_at_snr(clean_clip, noise, *channel.snr_db, channel.seed);
        noisy = mixed.noisy;
        achieved_snr = mixed.achieved_snr_db;
      }
      SimulationResult sim = simulate_transmission(clean_clip, noise, channel);

      const std::string name = std::string(stem) + ".wav";
      save_wav(clean_clip, (out / "clean" / name).string(),
               SampleEncoding::kPcm16);
      save_wav(noisy, (out / "noisy" / name).string(), SampleEncoding::kPcm16);
      save_wav(sim.degraded, (out / "degraded" / name).string(),
               SampleEncoding::kPcm16);

      json record;
      record["meta"] = meta_json(cfg);
      record["stem"] = stem;
      record["source_clean"] = clean_stem;
      record["source_noise"] = noise_stem;
      record["achieved_snr_db"] = achieved_snr;
      record["frames_dropped"] = sim.record.frames_dropped;
      record["seed_used"] = sim.record.seed_used;
      json jcfg = config_to_json_obj(cfg)["channel"];
      if (channel.snr_db)
        jcfg["snr_db"] = *channel.snr_db;
      jcfg["derived_seed"] = channel.seed;
      record["channel"] = jcfg;
      write_text_file(out / "records" / (std::string(stem) + ".json"),
                      record.dump(2) + "\n");
    } catch (const Error& e) {
      ++failures;
      std::lock_guard<std::mutex> lock(log_mutex);
      log << "synth: " << stem << " failed: " << e.what() << "\n";
    }
  });

  log << "synth: wrote " << cfg.synth_count - failures.load() << "/"
      << cfg.synth_count << " pairs to " << cfg.out_dir << "\n";
  return failures.load() == 0 ? 0 : 1;
}

// --------------------------------------------------------- improve runner

int run_improve(const RunConfig& cfg, std::ostream& log) {
  if (cfg.clean_dir.empty() || cfg.noisy_dir.empty() ||
      cfg.baseline_dir.empty() || cfg.finetuned_dir.empty())
    throw Error(ErrorCode::kConfigInvalid,
                "improve needs clean/noisy/baseline/finetuned directories");
  const Manifest manifest =
      cfg.manifest_path.empty() ? Manifest{} : load_manifest(cfg.manifest_path);
  const std::vector<std::string> stems =
      manifest.empty() ? wav_stems(cfg.clean_dir) : [&] {
        std::vector<std::string> s;
        for (const auto& [stem, _] : manifest) s.push_back(stem);
        return s;
      }();
  if (stems.empty())
    throw Error(ErrorCode::kConfigInvalid, "no .wav files to analyze");
  fs::create_directories(cfg.out_dir);

  struct StemResult {
    std::string stem;
    std::string status = "ok";
    Vec mae_n, mae_b, mae_f;  // per parameter/component
    Index frames = 0;
  };
  std::vector<StemResult> results(stems.size());

  const bool functional = cfg.improve_mode == ImprovementMode::kFunctionalVector;
  const std::vector<std::string>& names =
      functional ? functional_names()
                 : std::vector<std::string>(tap_param_names().begin(),
                                            tap_param_names().end());

  parallel_for(cfg.workers, static_cast<Index>(stems.size()), [&](Index i) {
    StemResult& res = results[static_cast<std::size_t>(i)];
    res.stem = stems[static_cast<std::size_t>(i)];
    try {
      auto load_role = [&](const std::string& role, const std::string& dir) {
        return load_wav(resolve_role(manifest, res.stem, role, dir).string())
            .first;
      };
      Waveform clean = load_role("clean", cfg.clean_dir);
      Waveform noisy = load_role("noisy", cfg.noisy_dir);
      Waveform baseline = load_role("baseline", cfg.baseline_dir);
      Waveform finetuned = load_role("finetuned", cfg.finetuned_dir);

      const Index n = std::min(std::min(clean.size(), noisy.size()),
                               std::min(baseline.size(), finetuned.size()));
      auto fit = [&](Waveform& w) {
        if (w.size() != n) {
          if (!cfg.truncate_to_shorter)
            throw Error(ErrorCode::kDimensionMismatch,
                        "lengths differ for stem " + res.stem);
          w.samples.conservativeResize(n);
        }
      };
      fit(clean);
      fit(noisy);
      fit(baseline);
      fit(finetuned);

      const TapMatrix tc = extract_tap(clean);
      const TapMatrix tn = extract_tap(noisy);
      const TapMatrix tb = extract_tap(baseline);
      const TapMatrix tf = extract_tap(finetuned);
      res.frames = tc.num_frames();
      if (functional) {
        const FunctionalVector fc = compute_functionals(tc);
        const FunctionalVector fn = compute_functionals(tn);
        const FunctionalVector fb = compute_functionals(tb);
        const FunctionalVector ff = compute_functionals(tf);
        res.mae_n = (fc.values - fn.values).abs();
        res.mae_b = (fc.values - fb.values).abs();
        res.mae_f = (fc.values - ff.values).abs();
      } else {
        res.mae_n = mae_over_time(tc, tn);
        res.mae_b = mae_over_time(tc, tb);
        res.mae_f = mae_over_time(tc, tf);
      }
    } catch (const Error& e) {
      res.status = error_code_name(e.code());
    }
  });

  // Pool: frame-weighted in time-series mode, stem-averaged in functional
  // mode.
  const Index p = static_cast<Index>(names.size());
  Vec pooled_n = Vec::Zero(p), pooled_b = Vec::Zero(p), pooled_f = Vec::Zero(p);
  double pool_weight = 0.0;
  int failures = 0;
  for (const StemResult& res : results) {
    if (res.status != "ok") {
      ++failures;
      continue;
    }
    const double w = functional ? 1.0 : static_cast<double>(res.frames);
    pooled_n += res.mae_n * w;
    pooled_b += res.mae_b * w;
    pooled_f += res.mae_f * w;
    pool_weight += w;
  }
  if (pool_weight > 0.0) {
    pooled_n /= pool_weight;
    pooled_b /= pool_weight;
    pooled_f /= pool_weight;
  }
  const ImprovementReport pooled = improvement_report_from_mae(
      names, pooled_n, pooled_b, pooled_f, cfg.improve_mode);

  auto report_rows_csv = [&](const ImprovementReport& r) {
    std::ostringstream os;
    os << "param,mae_n,mae_b,mae_f,i_b,i_f,i_f_minus_i_b,rel_mae_delta,"
          "undefined\n";
    for (const ParamImprovement& pi : r.params) {
      os << pi.param << "," << fmt_num(pi.mae_n) << "," << fmt_num(pi.mae_b)
         << "," << fmt_num(pi.mae_f) << ",";
      if (pi.undefined) {
        os << ",,,," << "true\n";
        continue;
      }
      os << fmt_num(pi.i_b) << "," << fmt_num(pi.i_f) << ","
         << fmt_num(pi.i_f - pi.i_b) << ",";
      if (pi.mae_b > 0.0)
        os << fmt_num((pi.mae_b - pi.mae_f) / pi.mae_b);
      os << ",false\n";
    }
    return os.str();
  };

  auto report_json = [&](const ImprovementReport& r) {
    json jr;
    jr["mode"] = improvement_mode_name(r.mode);
    jr["params_finetuned_beats_baseline"] = r.params_finetuned_beats_baseline;
    json arr = json::array();
    for (const ParamImprovement& pi : r.params) {
      json e;
      e["param"] = pi.param;
      e["mae_n"] = pi.mae_n;
      e["mae_b"] = pi.mae_b;
      e["mae_f"] = pi.mae_f;
      if (pi.undefined) {
        e["undefined"] = true;
      } else {
        e["undefined"] = false;
        e["i_b"] = pi.i_b;
        e["i_f"] = pi.i_f;
        e["i_f_minus_i_b"] = pi.i_f - pi.i_b;
        if (pi.mae_b > 0.0)
          e["rel_mae_delta"] = (pi.mae_b - pi.mae_f) / pi.mae_b;
        else
          e["rel_mae_delta"] = nullptr;
      }
      arr.push_back(e);
    }
    jr["params"] = arr;
    return jr;
  };

  if (wants_format(cfg, "csv"))
    write_text_file(fs::path(cfg.out_dir) / "improvement_pooled.csv",
                    meta_comment(cfg) + report_rows_csv(pooled));

  if (wants_format(cfg, "json")) {
    json j;
    j["meta"] = meta_json(cfg);
    j["pooled"] = report_json(pooled);
    json files = json::object();
    for (const StemResult& res : results) {
      if (res.status != "ok") {
        files[res.stem] = {{"status", res.status}};
        continue;
      }
      const ImprovementReport r = improvement_report_from_mae(
          names, res.mae_n, res.mae_b, res.mae_f, cfg.improve_mode);
      json e = report_json(r);
      e["status"] = "ok";
      files[res.stem] = e;
    }
    j["files"] = files;
    write_text_file(fs::path(cfg.out_dir) / "improvement_report.json",
                    j.dump(2) + "\n");
  }

  if (wants_format(cfg, "markdown")) {
    std::ostringstream os;
    os << "# Acoustic improvement (pooled)\n\n"
       << "seval " << kVersion << ", mode " << improvement_mode_name(cfg.improve_mode)
       << ", config digest `" << cfg.metrics.digest() << "`\n\n"
       << "Finetuned beats baseline on " << pooled.params_finetuned_beats_baseline
       << " of " << pooled.params.size() << " parameters.\n\n"
       << "| param | I_B | I_F | I_F - I_B | (MAE_B - MAE_F)/MAE_B |\n"
       << "|---|---|---|---|---|\n";
    for (const ParamImprovement& pi : pooled.params) {
      os << "| " << pi.param << " | ";
      if (pi.undefined) {
        os << "undefined | undefined | undefined | undefined |\n";
        continue;
      }
      os << fmt_num(pi.i_b) << " | " << fmt_num(pi.i_f) << " | "
         << fmt_num(pi.i_f - pi.i_b) << " | ";
      if (pi.mae_b > 0.0)
        os << fmt_num((pi.mae_b - pi.mae_f) / pi.mae_b);
      else
        os << "undefined";
      os << " |\n";
    }
    write_text_file(fs::path(cfg.out_dir) / "improvement_pooled.md", os.str());
  }

  log << "improve: " << results.size() - failures << "/" << results.size()
      << " stems ok; finetuned beats baseline on "
      << pooled.params_finetuned_beats_baseline << "/" << pooled.params.size()
      << " parameters\n";
  return failures == 0 ? 0 : 1;
}

// ------------------------------------------------------------- tap / loss

int run_tap(const RunConfig& cfg, const std::string& input_wav,
            const std::string& csv_out, const std::string& binary_out,
            std::ostream& log) {
  (void)cfg;
  const Waveform w = load_wav(input_wav).first;
  const TapMatrix m = extract_tap(w);
  if (!csv_out.empty()) {
    tap_to_csv(m, csv_out);
    log << "tap: wrote " << csv_out << " (" << m.num_frames() << " frames x "
        << kNumTapParams << " params)\n";
  }
  if (!binary_out.empty()) {
    tap_to_binary(m, binary_out);
    log << "tap: wrote " << binary_out << "\n";
  }
  return 0;
}

int run_loss(const RunConfig& cfg, const std::string& clean_wav,
             const std::string& enhanced_wav, const std::string& noisy_wav,
             const std::string& json_out, std::ostream& log) {
  const AlignedPair pair =
      load_aligned(clean_wav, enhanced_wav, cfg.truncate_to_shorter);

  json j;
  j["meta"] = meta_json(cfg);
  const LossBreakdown demucs = demucs_loss(pair.a, pair.b, cfg.loss_weights);
  j["demucs"] = {{"l1", demucs.l1},
                 {"tap", demucs.tap},
                 {"stft", demucs.stft},
                 {"total", demucs.total},
                 {"weights",
                  {{"lambda1", cfg.loss_weights.lambda1},
                   {"lambda2", cfg.loss_weights.lambda2}}}};
  json res = json::array();
  for (const MrStftResolution& r : default_mrstft_resolutions())
    res.push_back({{"fft_size", r.fft_size}, {"hop", r.hop},
                   {"win_length", r.win_length}});
  j["mrstft_resolutions"] = res;

  if (!noisy_wav.empty()) {
    Waveform noisy = load_wav(noisy_wav).first;
    if (noisy.sample_rate_hz != pair.a.sample_rate_hz)
      throw Error(ErrorCode::kLengthMismatch, "noisy sample rate differs");
    if (noisy.size() != pair.a.size()) {
      if (!cfg.truncate_to_shorter)
        throw Error(ErrorCode::kLengthMismatch, "noisy length differs");
      noisy.samples.conservativeResize(pair.a.size());
    }
    const ComplexSpectrogram sn = stft(noisy);
    const CirmMask target = compress_cirm(cirm_from_specs(sn, stft(pair.a)));
    const CirmMask pred = compress_cirm(cirm_from_specs(sn, stft(pair.b)));
    const LossBreakdown fsn = fullsubnet_loss(
        pred, target, extract_tap(pair.a), extract_tap(pair.b), cfg.loss_weights);
    j["fullsubnet"] = {{"cirm", fsn.cirm},
                       {"tap", fsn.tap},
                       {"total", fsn.total},
                       {"weights", {{"gamma", cfg.loss_weights.gamma}}}};
  }

  const std::string text = j.dump(2) + "\n";
  if (json_out.empty() || json_out == "-")
    log << text;
  else
    write_text_file(json_out, text);
  return 0;
}

}  // namespace seval
