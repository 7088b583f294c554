// seval/metrics.cpp

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

#include "seval/metrics.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <vector>

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include "seval/filterbank.hpp"
#include "seval/lpc.hpp"
#include "seval/resample.hpp"
#include "seval/stft.hpp"
#include "seval/wav_io.hpp"

namespace seval {

namespace {

void check_aligned(const Waveform& a, const Waveform& b) {
  if (a.sample_rate_hz != b.sample_rate_hz)
    throw Error(ErrorCode::kLengthMismatch, "sample rates differ");
  if (a.size() != b.size())
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Energy-based silent-frame removal shared by both STOI inputs: the frame
// mask comes from the clean signal and is applied to both, and retained
// frames are overlap-added back to back.
struct SilenceTrimmed {
  Vec clean;
  Vec degraded;
};

SilenceTrimmed remove_silent_frames(const Vec& x, const Vec& y, int frame_len,
                                    int hop, double dyn_range_db) {
  const Index n = x.size();
  if (n < frame_len) throw Error(ErrorCode::kTooShort, "below one frame");
  const Index num_frames = 1 + (n - frame_len) / hop;
  const Vec w = make_window(WindowKind::kHann, frame_len);

  std::vector<double> energy_db(static_cast<std::size_t>(num_frames));
  double max_db = -1e30;
  for (Index t = 0; t < num_frames; ++t) {
    double e = 0.0;
    for (int i = 0; i < frame_len; ++i) {
      const double v = w[i] * x[t * hop + i];
      e += v * v;
    }
    energy_db[static_cast<std::size_t>(t)] = 10.0 * std::log10(e + 1e-300);
    max_db = std::max(max_db, energy_db[static_cast<std::size_t>(t)]);
  }

  std::vector<Index> keep;
  for (Index t = 0; t < num_frames; ++t)
    if (energy_db[static_cast<std::size_t>(t)] > max_db - dyn_range_db)
      keep.push_back(t);
  if (keep.empty() || max_db < -250.0)
    throw Error(ErrorCode::kNoActiveSpeech, "no frames above the VAD floor");

  const Index out_len = (static_cast<Index>(keep.size()) - 1) * hop + frame_len;
  SilenceTrimmed out;
  out.clean = Vec::Zero(out_len);
  out.degraded = Vec::Zero(out_len);
  for (std::size_t j = 0; j < keep.size(); ++j) {
    const Index src = keep[j] * hop;
    const Index dst = static_cast<Index>(j) * hop;
    for (int i = 0; i < frame_len; ++i) {
      out.clean[dst + i] += w[i] * x[src + i];
      out.degraded[dst + i] += w[i] * y[src + i];
    }
  }
  return out;
}

// One-third-octave band magnitudes per frame: rows bands, cols frames.
Mat stoi_band_energies(const Vec& sig, int frame_len, int fft_size, int hop,
                       const FilterBank& bank) {
  const Index n = sig.size();
  const Index num_frames = 1 + (n - frame_len) / hop;
  const Vec w = make_window(WindowKind::kHann, frame_len);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> buf(static_cast<std::size_t>(fft_size));
  std::vector<std::complex<double>> spec;

  Mat bands(bank.num_bands(), num_frames);
  Vec power(fft_size / 2 + 1);
  for (Index t = 0; t < num_frames; ++t) {
    for (int i = 0; i < fft_size; ++i)
      buf[static_cast<std::size_t>(i)] =
          i < frame_len ? w[i] * sig[t * hop + i] : 0.0;
    fft.fwd(spec, buf);
    for (Index k = 0; k < power.size(); ++k)
      power[k] = std::norm(spec[static_cast<std::size_t>(k)]);
    bands.col(t) = bank.band_magnitudes(power);
  }
  return bands;
}

struct RegionCoherence {
  Vec msc;       // magnitude-squared coherence per FFT bin
  Vec deg_power; // degraded power per bin, summed over region frames
  int frames = 0;
};

double llr_frame_value(const Vec& clean_frame, const Vec& enh_frame,
                       int order) {
  const Vec r_c = autocorrelation(clean_frame, order);
  if (!(r_c[0] > 1e-14)) throw Error(ErrorCode::kDegenerateFrame, "silent");
  const LpcResult c = levinson_durbin(r_c, order);
  const LpcResult e = lpc_coefficients(enh_frame, order);

  // a' R a with Toeplitz R from the clean autocorrelation.
  auto quad = [&](const Vec& a) {
    double acc = 0.0;
    const int p = static_cast<int>(a.size());
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) acc += a[i] * a[j] * r_c[std::abs(i - j)];
    return acc;
  };
  const double num = quad(e.coeffs);
  const double den = quad(c.coeffs);
  if (!(den > 0.0)) throw Error(ErrorCode::kDegenerateFrame, "flat clean fit");
  return std::log(std::max(num / den, 1.0));
}

struct CommandResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string stdout_text;
};

CommandResult run_with_timeout(const std::string& command, double timeout_s) {
  CommandResult result;
  int pipe_fd[2];
  if (pipe(pipe_fd) != 0) throw Error(ErrorCode::kIoError, "pipe failed");

  const pid_t pid = fork();
  if (pid < 0) {
    close(pipe_fd[0]);
    close(pipe_fd[1]);
    throw Error(ErrorCode::kIoError, "fork failed");
  }
  if (pid == 0) {
    dup2(pipe_fd[1], STDOUT_FILENO);
    close(pipe_fd[0]);
    close(pipe_fd[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(pipe_fd[1]);
  fcntl(pipe_fd[0], F_SETFL, O_NONBLOCK);

  const auto deadline =
      std::chrono::steady_clock::now() +
      std::chrono::milliseconds(static_cast<long>(timeout_s * 1000));
  int status = 0;
  bool done = false;
  char chunk[4096];
  while (!done) {
    ssize_t got;
    while ((got = read(pipe_fd[0], chunk, sizeof(chunk))) > 0)
      result.stdout_text.append(chunk, static_cast<std::size_t>(got));
    const pid_t r = waitpid(pid, &status, WNOHANG);
    if (r == pid) {
      done = true;
    } else if (std::chrono::steady_clock::now() > deadline) {
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      result.timed_out = true;
      done = true;
    } else {
      usleep(5000);
    }
  }
  ssize_t got;
  while ((got = read(pipe_fd[0], chunk, sizeof(chunk))) > 0)
    result.stdout_text.append(chunk, static_cast<std::size_t>(got));
  close(pipe_fd[0]);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string replace_all(std::string s, const std::string& needle,
                        const std::string& value) {
  std::size_t pos = 0;
  while ((pos = s.find(needle, pos)) != std::string::npos) {
    s.replace(pos, needle.size(), value);
    pos += value.size();
  }
  return s;
}

MetricValue run_pesq_adapter(const PesqAdapter& adapter, const Waveform& clean,
                             const Waveform& degraded) {
  namespace fs = std::filesystem;
  const std::string tag =
      "seval_pesq_" + std::to_string(static_cast<long>(getpid())) + "_" +
      std::to_string(reinterpret_cast<std::uintptr_t>(&adapter) & 0xFFFF);
  const fs::path dir = fs::temp_directory_path();
  const fs::path clean_path = dir / (tag + "_clean.wav");
  const fs::path deg_path = dir / (tag + "_degraded.wav");

  MetricValue out;
  try {
    Waveform c16 = clean.sample_rate_hz == 16000 ? clean : resample(clean, 16000);
    Waveform d16 =
        degraded.sample_rate_hz == 16000 ? degraded : resample(degraded, 16000);
    save_wav(c16, clean_path.string(), SampleEncoding::kPcm16);
    save_wav(d16, deg_path.string(), SampleEncoding::kPcm16);

    std::string cmd = adapter.command_template;
    cmd = replace_all(cmd, "{clean}", clean_path.string());
    cmd = replace_all(cmd, "{degraded}", deg_path.string());
    const CommandResult res = run_with_timeout(cmd, adapter.timeout_s);

    if (res.timed_out) {
      out = MetricValue::failed("AdapterTimeout");
    } else if (res.exit_code != 0) {
      out = MetricValue::failed("AdapterExit" + std::to_string(res.exit_code));
    } else {
      std::istringstream iss(res.stdout_text);
      std::string token;
      bool found = false;
      double value = 0.0;
      while (iss >> token) {
        char* end = nullptr;
        const double v = std::strtod(token.c_str(), &end);
        if (end && *end == '\0' && end != token.c_str()) {
          value = v;
          found = true;
        }
      }
      out = found ? MetricValue::of(value)
                  : MetricValue::failed("AdapterNoScore");
    }
  } catch (const Error& e) {
    out = MetricValue::failed(error_code_name(e.code()));
  }
  std::error_code ec;
  fs::remove(clean_path, ec);
  fs::remove(deg_path, ec);
  return out;
}

}  // namespace

std::string MetricConfig::digest() const {
  std::ostringstream os;
  os << "stoi:" << stoi_rate_hz << "," << stoi_frame_len << "," << stoi_fft_size
     << "," << stoi_dyn_range_db << "," << stoi_segment_frames << ","
     << stoi_clip_db << ";llr:" << llr_frame_ms << "," << llr_order << ","
     << static_cast<int>(llr_aggregate) << "," << llr_keep_fraction
     << ";bank:" << band_count << "," << band_lo_hz << "," << band_hi_hz
     << ";csii:" << csii_win_length << "," << csii_hop << "," << csii_fft_size
     << "," << csii_min_region_frames << "," << sdr_clip_db
     << ";env:" << envelope_rate_hz << "," << envelope_lp_hz;
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(os.str())));
  return std::string(buf);
}

double stoi(const Waveform& clean, const Waveform& degraded,
            const MetricConfig& cfg) {
  check_aligned(clean, degraded);
  const Waveform x10 = clean.sample_rate_hz == cfg.stoi_rate_hz
                           ? clean
                           : resample(clean, cfg.stoi_rate_hz);
  const Waveform y10 = degraded.sample_rate_hz == cfg.stoi_rate_hz
                           ? degraded
                           : resample(degraded, cfg.stoi_rate_hz);

  const int frame_len = cfg.stoi_frame_len;
  const int hop = frame_len / 2;
  const SilenceTrimmed trimmed = remove_silent_frames(
      x10.samples, y10.samples, frame_len, hop, cfg.stoi_dyn_range_db);

  if (trimmed.clean.size() < frame_len)
    throw Error(ErrorCode::kTooShort, "not enough active speech");

  const FilterBank bank =
      third_octave_filterbank(cfg.stoi_rate_hz, cfg.stoi_fft_size);
  const Mat bx =
      stoi_band_energies(trimmed.clean, frame_len, cfg.stoi_fft_size, hop, bank);
  const Mat by = stoi_band_energies(trimmed.degraded, frame_len,
                                    cfg.stoi_fft_size, hop, bank);

  const int seg = cfg.stoi_segment_frames;
  if (bx.cols() < seg)
    throw Error(ErrorCode::kTooShort,
                "fewer than " + std::to_string(seg) + " frames after trimming");

  const double clip_gain = 1.0 + std::pow(10.0, -cfg.stoi_clip_db / 20.0);
  double acc = 0.0;
  Index cells = 0;
  for (Index m = seg; m <= bx.cols(); ++m) {
    for (Index j = 0; j < bx.rows(); ++j) {
      Vec xs = bx.row(j).segment(m - seg, seg);
      Vec ys = by.row(j).segment(m - seg, seg);
      const double xn = std::sqrt(xs.square().sum());
      const double yn = std::sqrt(ys.square().sum());
      const double alpha = yn > 0.0 ? xn / yn : 0.0;
      Vec yc = (ys * alpha).min(xs * clip_gain);
      xs -= xs.mean();
      yc -= yc.mean();
      const double denom =
          std::sqrt(xs.square().sum() * yc.square().sum()) + 1e-30;
      acc += (xs * yc).sum() / denom;
      ++cells;
    }
  }
  return acc / static_cast<double>(cells);
}

double aggregate_frame_values(std::vector<double> values, LlrAggregate mode,
                              double keep_fraction) {
  if (values.empty())
    throw Error(ErrorCode::kNoActiveSpeech, "no frames to aggregate");
  std::sort(values.begin(), values.end());
  switch (mode) {
    case LlrAggregate::kMean: {
      double s = 0.0;
      for (double v : values) s += v;
      return s / static_cast<double>(values.size());
    }
    case LlrAggregate::kMedian: {
      const std::size_t n = values.size();
      return n % 2 == 1 ? values[n / 2]
                        : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    }
    case LlrAggregate::kTrimmedMean: {
      const std::size_t keep = std::max<std::size_t>(
          1, static_cast<std::size_t>(
                 std::llround(keep_fraction * static_cast<double>(values.size()))));
      double s = 0.0;
      for (std::size_t i = 0; i < keep; ++i) s += values[i];
      return s / static_cast<double>(keep);
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "bad aggregate mode");
}

double llr(const Waveform& clean, const Waveform& enhanced,
           const MetricConfig& cfg) {
  check_aligned(clean, enhanced);
  const int sr = clean.sample_rate_hz;
  const int win = static_cast<int>(std::llround(cfg.llr_frame_ms * 1e-3 * sr));
  const int hop = std::max(1, win / 4);
  const Index n = clean.size();
  if (n < win) throw Error(ErrorCode::kTooShort, "below one LLR frame");

  const Vec window = make_window(WindowKind::kHann, win);
  std::vector<double> frame_values;
  Vec cf(win), ef(win);
  for (Index start = 0; start + win <= n; start += hop) {
    cf = clean.samples.segment(start, win) * window;
    ef = enhanced.samples.segment(start, win) * window;
    try {
      frame_values.push_back(llr_frame_value(cf, ef, cfg.llr_order));
    } catch (const Error&) {
      // silent or degenerate frame; excluded from aggregation
    }
  }
  if (frame_values.empty())
    throw Error(ErrorCode::kNoActiveSpeech, "no scoreable frames");
  return aggregate_frame_values(std::move(frame_values), cfg.llr_aggregate,
                                cfg.llr_keep_fraction);
}

Csii3 csii(const Waveform& clean, const Waveform& degraded,
           const MetricConfig& cfg) {
  check_aligned(clean, degraded);
  const int sr = clean.sample_rate_hz;
  const int win = cfg.csii_win_length;
  const int hop = cfg.csii_hop;
  const int fft_size = cfg.csii_fft_size;
  const Index n = clean.size();
  if (n < win) throw Error(ErrorCode::kTooShort, "below one frame");
  const Index frames = 1 + (n - win) / hop;

  // Frame levels relative to the utterance RMS of the clean signal.
  const double utt_db = rms_dbfs(clean.samples);
  if (utt_db < -100.0) throw Error(ErrorCode::kNoActiveSpeech, "silent input");

  const Vec w = make_window(WindowKind::kHann, win);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> buf(static_cast<std::size_t>(fft_size));
  std::vector<std::complex<double>> spec;

  const Index bins = fft_size / 2 + 1;
  CplxMat sx(bins, frames), sy(bins, frames);
  Vec rel_db(frames);
  for (Index t = 0; t < frames; ++t) {
    const Index start = t * hop;
    rel_db[t] = rms_dbfs(clean.samples.segment(start, win)) - utt_db;
    for (int i = 0; i < fft_size; ++i)
      buf[static_cast<std::size_t>(i)] =
          i < win ? w[i] * clean.samples[start + i] : 0.0;
    fft.fwd(spec, buf);
    for (Index k = 0; k < bins; ++k) sx(k, t) = spec[static_cast<std::size_t>(k)];
    for (int i = 0; i < fft_size; ++i)
      buf[static_cast<std::size_t>(i)] =
          i < win ? w[i] * degraded.samples[start + i] : 0.0;
    fft.fwd(spec, buf);
    for (Index k = 0; k < bins; ++k) sy(k, t) = spec[static_cast<std::size_t>(k)];
  }

  const FilterBank bank = erb_filterbank(sr, fft_size, cfg.band_count,
                                         cfg.band_lo_hz, cfg.band_hi_hz);

  auto region_metric = [&](double lo_db, double hi_db,
                           bool include_hi) -> MetricValue {
    std::vector<Index> members;
    for (Index t = 0; t < frames; ++t) {
      const double r = rel_db[t];
      const bool in = include_hi ? (r > lo_db && r <= hi_db) : (r >= lo_db);
      if (in) members.push_back(t);
    }
    if (static_cast<int>(members.size()) < cfg.csii_min_region_frames)
      return MetricValue::failed("EmptyRegion");

    // Magnitude-squared coherence per bin over the region's frames.
    Vec msc = Vec::Zero(bins), pyy = Vec::Zero(bins);
    for (Index k = 0; k < bins; ++k) {
      std::complex<double> sxy(0.0, 0.0);
      double sxx = 0.0, syy = 0.0;
      for (Index t : members) {
        sxy += sx(k, t) * std::conj(sy(k, t));
        sxx += std::norm(sx(k, t));
        syy += std::norm(sy(k, t));
      }
      pyy[k] = syy;
      msc[k] = sxx * syy > 1e-60 ? std::norm(sxy) / (sxx * syy) : 0.0;
    }

    double weighted = 0.0, weight_used = 0.0;
    for (Index b = 0; b < bank.num_bands(); ++b) {
      double sig = 0.0, noise = 0.0;
      for (Index k = 0; k < bins; ++k) {
        const double wgt = bank.weights(b, k);
        if (wgt == 0.0) continue;
        sig += wgt * msc[k] * pyy[k];
        noise += wgt * (1.0 - msc[k]) * pyy[k];
      }
      const double total = sig + noise;
      if (total < 1e-30) continue;  // dead band; renormalize importance
      double sdr_db;
      if (noise <= total * 1e-15)
        sdr_db = cfg.sdr_clip_db;
      else
        sdr_db = std::clamp(10.0 * std::log10(sig / noise), -cfg.sdr_clip_db,
                            cfg.sdr_clip_db);
      const double transmission = (sdr_db + cfg.sdr_clip_db) / (2.0 * cfg.sdr_clip_db);
      weighted += bank.importance[b] * transmission;
      weight_used += bank.importance[b];
    }
    if (weight_used <= 0.0) return MetricValue::failed("EmptyRegion");
    return MetricValue::of(weighted / weight_used);
  };

  Csii3 out;
  out.high = region_metric(0.0, 0.0, false);
  out.mid = region_metric(-10.0, 0.0, true);
  out.low = region_metric(-30.0, -10.0, true);
  return out;
}

double ncm(const Waveform& clean, const Waveform& degraded,
           const MetricConfig& cfg) {
  check_aligned(clean, degraded);
  const int sr = clean.sample_rate_hz;
  const Index hop = static_cast<Index>(std::llround(sr / cfg.envelope_rate_hz));
  if (clean.size() / hop < 10)
    throw Error(ErrorCode::kTooShort, "under 10 envelope frames");

  const FilterBank bank =
      erb_filterbank(sr, 512, cfg.band_count, cfg.band_lo_hz, cfg.band_hi_hz);
  const Mat ex =
      band_envelope(clean, bank, cfg.envelope_rate_hz, cfg.envelope_lp_hz);
  const Mat ey =
      band_envelope(degraded, bank, cfg.envelope_rate_hz, cfg.envelope_lp_hz);

  double weighted = 0.0, weight_used = 0.0;
  for (Index b = 0; b < bank.num_bands(); ++b) {
    Vec x = ex.row(b);
    Vec y = ey.row(b);
    x -= x.mean();
    y -= y.mean();
    const double vx = x.square().sum(), vy = y.square().sum();
    if (vx < 1e-30 || vy < 1e-30) continue;  // flat envelope; skip band
    const double r = (x * y).sum() / std::sqrt(vx * vy);
    const double r2 = std::min(r * r, 1.0 - 1e-15);
    const double snr_db = std::clamp(10.0 * std::log10(r2 / (1.0 - r2)),
                                     -cfg.sdr_clip_db, cfg.sdr_clip_db);
    const double transmission = (snr_db + cfg.sdr_clip_db) / (2.0 * cfg.sdr_clip_db);
    weighted += bank.importance[b] * transmission;
    weight_used += bank.importance[b];
  }
  if (weight_used <= 0.0)
    throw Error(ErrorCode::kNoActiveSpeech, "all envelopes flat");
  return weighted / weight_used;
}

MetricReport evaluate_pair(const Waveform& clean, const Waveform& degraded,
                           const std::optional<PesqAdapter>& pesq_adapter,
                           const MetricConfig& cfg) {
  check_aligned(clean, degraded);
  MetricReport report;
  report.config_digest = cfg.digest();

  auto guarded = [&](auto&& fn) -> MetricValue {
    try {
      return MetricValue::of(fn());
    } catch (const Error& e) {
      return MetricValue::failed(error_code_name(e.code()));
    }
  };

  report.stoi = guarded([&] { return stoi(clean, degraded, cfg); });
  report.llr = guarded([&] { return llr(clean, degraded, cfg); });
  try {
    const Csii3 c = csii(clean, degraded, cfg);
    report.csii_high = c.high;
    report.csii_mid = c.mid;
    report.csii_low = c.low;
  } catch (const Error& e) {
    report.csii_high = report.csii_mid = report.csii_low =
        MetricValue::failed(error_code_name(e.code()));
  }
  report.ncm = guarded([&] { return ncm(clean, degraded, cfg); });

  if (pesq_adapter)
    report.pesq = run_pesq_adapter(*pesq_adapter, clean, degraded);
  return report;
}

}  // namespace seval
