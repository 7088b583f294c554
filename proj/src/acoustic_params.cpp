// seval/acoustic_params.cpp

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

#include "seval/acoustic_params.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>

#include "seval/filterbank.hpp"
#include "seval/lpc.hpp"
#include "seval/resample.hpp"
#include "seval/stft.hpp"

namespace seval {

namespace {

constexpr double kPreEmphasis = 0.97;
constexpr double kDbFloor = 1e-12;

struct FrameGrid {
  int hop;
  int win;
  int pitch_win;
  Index frames;
};

FrameGrid make_grid(const TapConfig& cfg, Index n) {
  FrameGrid g;
  g.hop = static_cast<int>(std::llround(cfg.sample_rate_hz / cfg.frame_rate_hz));
  g.win = static_cast<int>(std::llround(cfg.window_ms * 1e-3 * cfg.sample_rate_hz));
  g.pitch_win =
      static_cast<int>(std::llround(cfg.pitch_window_ms * 1e-3 * cfg.sample_rate_hz));
  g.frames = n >= g.win ? 1 + (n - g.win) / g.hop : 0;
  return g;
}

Waveform to_canonical(const Waveform& w, const TapConfig& cfg) {
  if (w.sample_rate_hz == cfg.sample_rate_hz) return w;
  return resample(w, cfg.sample_rate_hz);
}

double frame_rms_db(const Eigen::Ref<const Vec>& x, Index start, int len) {
  const Index n = x.size();
  double acc = 0.0;
  int used = 0;
  for (int i = 0; i < len; ++i) {
    const Index k = start + i;
    if (k < 0 || k >= n) continue;
    acc += x[k] * x[k];
    ++used;
  }
  if (used == 0 || acc <= 0.0) return -400.0;
  return 10.0 * std::log10(acc / used);
}

struct PeakFit {
  double offset;  // sub-sample shift in (-0.5, 0.5)
  double value;   // interpolated peak height
};

PeakFit parabolic_peak(double y1, double y2, double y3) {
  const double denom = y1 - 2.0 * y2 + y3;
  if (std::abs(denom) < 1e-18) return {0.0, y2};
  double d = 0.5 * (y1 - y3) / denom;
  d = std::clamp(d, -0.5, 0.5);
  return {d, y2 - 0.25 * (y1 - y3) * d};
}

// Normalized cross-correlation over a fixed comparison span.
double ncc_at(const Vec& xw, int lag, int span) {
  double num = 0.0, e0 = 0.0, e1 = 0.0;
  for (int i = 0; i < span; ++i) {
    num += xw[i] * xw[i + lag];
    e0 += xw[i] * xw[i];
    e1 += xw[i + lag] * xw[i + lag];
  }
  const double denom = std::sqrt(e0 * e1);
  return denom > 1e-30 ? num / denom : 0.0;
}

struct SpectralFrame {
  Vec power;       // one-sided |X|^2, fft_size/2+1 bins
  double peak_amp; // max |x| in the frame
  double rms_db;
};

double band_power_sum(const Vec& power, double bin_hz, double lo, double hi) {
  double acc = 0.0;
  for (Index k = 0; k < power.size(); ++k) {
    const double f = k * bin_hz;
    if (f >= lo && f < hi) acc += power[k];
  }
  return acc;
}

double band_peak_db(const Vec& power, double bin_hz, double lo, double hi) {
  double best = kDbFloor;
  for (Index k = 0; k < power.size(); ++k) {
    const double f = k * bin_hz;
    if (f > lo && f <= hi) best = std::max(best, power[k]);
  }
  return 10.0 * std::log10(best);
}

double spectral_slope_db_per_hz(const Vec& power, double bin_hz, double lo,
                                double hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (Index k = 0; k < power.size(); ++k) {
    const double f = k * bin_hz;
    if (f < lo || f > hi) continue;
    const double y = 10.0 * std::log10(std::max(power[k], kDbFloor));
    sx += f;
    sy += y;
    sxx += f * f;
    sxy += f * y;
    ++m;
  }
  if (m < 2) return 0.0;
  const double var = sxx - sx * sx / m;
  if (var <= 0.0) return 0.0;
  return (sxy - sx * sy / m) / var;
}

// Peak magnitude (dB) near an expected harmonic frequency.
double harmonic_amp_db(const Vec& power, double bin_hz, double freq_hz,
                       double search_hz) {
  const Index k_lo = std::max<Index>(
      1, static_cast<Index>(std::floor((freq_hz - search_hz) / bin_hz)));
  const Index k_hi = std::min<Index>(
      power.size() - 1,
      static_cast<Index>(std::ceil((freq_hz + search_hz) / bin_hz)));
  if (k_lo > k_hi) return 10.0 * std::log10(kDbFloor);
  double best = kDbFloor;
  for (Index k = k_lo; k <= k_hi; ++k) best = std::max(best, power[k]);
  return 10.0 * std::log10(best);
}

std::vector<FormantFrame> formant_frames_impl(
    const Vec& x, const TapConfig& cfg, const FrameGrid& grid,
    const std::vector<PitchFrame>& pitch) {
  const int sr = cfg.sample_rate_hz;
  const Vec window = make_window(WindowKind::kHann, grid.win);
  const double bin_hz = static_cast<double>(sr) / cfg.fft_size;

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> buf(static_cast<std::size_t>(cfg.fft_size));
  std::vector<std::complex<double>> spec_out;

  std::vector<FormantFrame> out(static_cast<std::size_t>(grid.frames));
  Vec frame(grid.win);
  for (Index t = 0; t < grid.frames; ++t) {
    FormantFrame& ff = out[static_cast<std::size_t>(t)];
    ff.voiced = pitch[static_cast<std::size_t>(t)].voiced;
    const Index start = t * grid.hop;
    if (pitch[static_cast<std::size_t>(t)].rms_db < cfg.silence_floor_db) {
      ff.low_confidence = true;
      continue;
    }

    // Pre-emphasized, windowed frame for the LPC fit.
    for (int i = 0; i < grid.win; ++i) {
      const Index k = start + i;
      const double prev = k > 0 ? x[k - 1] : 0.0;
      frame[i] = (x[k] - kPreEmphasis * prev) * window[i];
    }
    std::vector<Resonance> resonances;
    try {
      const LpcResult lpc = lpc_coefficients(frame, cfg.lpc_order);
      resonances = lpc_resonances(lpc.coeffs, sr);
    } catch (const Error&) {
      ff.low_confidence = true;
      continue;
    }

    // Raw-frame power spectrum for the relative-energy measure.
    for (int i = 0; i < cfg.fft_size; ++i) {
      double v = 0.0;
      if (i < grid.win) v = x[start + i] * window[i];
      buf[static_cast<std::size_t>(i)] = v;
    }
    fft.fwd(spec_out, buf);
    Vec power(static_cast<Index>(spec_out.size()));
    for (Index k = 0; k < power.size(); ++k)
      power[k] = std::norm(spec_out[static_cast<std::size_t>(k)]);
    const double total = std::max(power.sum(), kDbFloor);

    const double f_lo = 90.0, f_hi = 0.5 * sr - 300.0;
    int found = 0;
    for (const Resonance& r : resonances) {
      if (r.frequency_hz < f_lo || r.frequency_hz > f_hi) continue;
      ff.freq_hz[static_cast<std::size_t>(found)] = r.frequency_hz;
      ff.bandwidth_hz[static_cast<std::size_t>(found)] = r.bandwidth_hz;
      const double half = 0.5 * std::max(r.bandwidth_hz, 100.0);
      const double e = band_power_sum(power, bin_hz, r.frequency_hz - half,
                                      r.frequency_hz + half);
      ff.rel_energy_db[static_cast<std::size_t>(found)] =
          10.0 * std::log10(std::max(e, kDbFloor) / total);
      if (++found == 3) break;
    }
    ff.count = found;
    ff.low_confidence = found < 3;
    for (int i = 0; i < found; ++i)
      if (ff.bandwidth_hz[static_cast<std::size_t>(i)] > 400.0)
        ff.low_confidence = true;
  }
  return out;
}

struct VoicingRuns {
  double mean_voiced_s = 0.0;
  double std_voiced_s = 0.0;
  double mean_unvoiced_s = 0.0;
  double voiced_runs_per_s = 0.0;
};

// Runs tile the clip exactly: a run's span starts at its first frame's hop
// boundary and ends at the next run's start (or the clip end), so a fully
// unvoiced clip yields one run of exactly the clip duration.
VoicingRuns segment_voicing(const std::vector<PitchFrame>& pitch, int hop,
                            int sr, Index total_samples) {
  VoicingRuns out;
  const Index frames = static_cast<Index>(pitch.size());
  if (frames == 0) return out;
  const double duration_s = static_cast<double>(total_samples) / sr;

  std::vector<double> voiced_lens, unvoiced_lens;
  Index run_start = 0;
  bool run_voiced = pitch[0].voiced;
  auto close_run = [&](Index end_frame) {
    const double begin_s = static_cast<double>(run_start) * hop / sr;
    const double end_s = end_frame >= frames
                             ? duration_s
                             : static_cast<double>(end_frame) * hop / sr;
    (run_voiced ? voiced_lens : unvoiced_lens).push_back(end_s - begin_s);
  };
  for (Index t = 1; t < frames; ++t) {
    if (pitch[static_cast<std::size_t>(t)].voiced != run_voiced) {
      close_run(t);
      run_start = t;
      run_voiced = pitch[static_cast<std::size_t>(t)].voiced;
    }
  }
  close_run(frames);

  auto mean_of = [](const std::vector<double>& v) {
    return v.empty() ? 0.0
                     : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  };
  out.mean_voiced_s = mean_of(voiced_lens);
  out.mean_unvoiced_s = mean_of(unvoiced_lens);
  if (!voiced_lens.empty()) {
    double acc = 0.0;
    for (double v : voiced_lens) {
      const double d = v - out.mean_voiced_s;
      acc += d * d;
    }
    out.std_voiced_s = std::sqrt(acc / voiced_lens.size());
  }
  out.voiced_runs_per_s =
      duration_s > 0.0 ? static_cast<double>(voiced_lens.size()) / duration_s : 0.0;
  return out;
}

}  // namespace

const std::array<std::string, kNumTapParams>& tap_param_names() {
  static const std::array<std::string, kNumTapParams> kNames = {
      "pitch",
      "jitter",
      "shimmer",
      "loudness",
      "hnr",
      "alpha_ratio",
      "hammarberg_index",
      "spectral_slope_0_500",
      "spectral_slope_500_1500",
      "f1_freq",
      "f1_bandwidth",
      "f1_rel_energy",
      "f2_freq",
      "f2_bandwidth",
      "f2_rel_energy",
      "f3_freq",
      "f3_bandwidth",
      "f3_rel_energy",
      "h1_h2_harmonic_diff",
      "h1_a3_harmonic_diff",
      "rate_loudness_peaks",
      "mean_voiced_len",
      "std_voiced_len",
      "mean_unvoiced_len",
      "continuous_voiced_per_sec"};
  return kNames;
}

const std::string& tap_param_name(TapParamId id) {
  return tap_param_names()[static_cast<std::size_t>(id)];
}

const std::vector<std::string>& functional_names() {
  static const std::vector<std::string> kNames = [] {
    std::vector<std::string> names;
    const char* stats[] = {"mean", "stddev", "pctl20", "pctl50", "pctl80"};
    for (const auto& p : tap_param_names())
      for (const char* s : stats) names.push_back(p + "_" + s);
    names.push_back("mean_voiced_len_scalar");
    names.push_back("std_voiced_len_scalar");
    names.push_back("mean_unvoiced_len_scalar");
    names.push_back("continuous_voiced_per_sec_scalar");
    return names;
  }();
  return kNames;
}

std::vector<PitchFrame> pitch_track(const Waveform& w, const TapConfig& cfg) {
  const Waveform canon = to_canonical(w, cfg);
  const Vec& x = canon.samples;
  const FrameGrid grid = make_grid(cfg, x.size());
  const int sr = cfg.sample_rate_hz;

  const int lag_min = std::max(2, static_cast<int>(std::floor(sr / cfg.pitch_max_hz)));
  const int lag_max = std::min(grid.pitch_win / 2 + grid.pitch_win / 4,
                               static_cast<int>(std::ceil(sr / cfg.pitch_min_hz)));
  const int span = grid.pitch_win - lag_max;

  std::vector<PitchFrame> out(static_cast<std::size_t>(grid.frames));
  if (span <= 8 || lag_max <= lag_min) return out;

  Vec xw(grid.pitch_win);
  Vec ncc(lag_max + 1);
  for (Index t = 0; t < grid.frames; ++t) {
    PitchFrame& pf = out[static_cast<std::size_t>(t)];
    const Index center = t * grid.hop + grid.win / 2;
    const Index pw_start = center - grid.pitch_win / 2;

    pf.rms_db = frame_rms_db(x, t * grid.hop, grid.win);
    if (pf.rms_db < cfg.silence_floor_db) continue;

    double mean = 0.0;
    for (int i = 0; i < grid.pitch_win; ++i) {
      const Index k = pw_start + i;
      xw[i] = (k >= 0 && k < x.size()) ? x[k] : 0.0;
      mean += xw[i];
    }
    xw -= mean / grid.pitch_win;

    int best_lag = 0;
    double best_val = -2.0;
    for (int lag = lag_min; lag <= lag_max; ++lag) {
      ncc[lag] = ncc_at(xw, lag, span);
      if (ncc[lag] > best_val) {
        best_val = ncc[lag];
        best_lag = lag;
      }
    }
    if (best_lag == 0) continue;

    // Prefer the shortest comparably strong lag; undoes octave-down errors.
    for (int divisor = 4; divisor >= 2; --divisor) {
      const int approx = best_lag / divisor;
      if (approx < lag_min) continue;
      int cand = 0;
      double cand_val = -2.0;
      for (int lag = std::max(lag_min, approx - 2);
           lag <= std::min(lag_max, approx + 2); ++lag) {
        if (ncc[lag] > cand_val) {
          cand_val = ncc[lag];
          cand = lag;
        }
      }
      if (cand != 0 && cand_val >= 0.87 * best_val) {
        best_lag = cand;
        best_val = cand_val;
        break;
      }
    }

    double lag_refined = best_lag;
    double val_refined = best_val;
    if (best_lag > lag_min && best_lag < lag_max) {
      const PeakFit fit =
          parabolic_peak(ncc[best_lag - 1], ncc[best_lag], ncc[best_lag + 1]);
      lag_refined = best_lag + fit.offset;
      val_refined = fit.value;
    }

    pf.strength = std::clamp(val_refined, 0.0, 1.0);
    if (pf.strength > cfg.voicing_threshold) {
      pf.voiced = true;
      pf.f0_hz = std::clamp(sr / lag_refined, cfg.pitch_min_hz, cfg.pitch_max_hz);
    }
  }
  return out;
}

std::vector<FormantFrame> formant_estimate(const Waveform& w,
                                           const TapConfig& cfg) {
  const Waveform canon = to_canonical(w, cfg);
  const FrameGrid grid = make_grid(cfg, canon.size());
  const std::vector<PitchFrame> pitch = pitch_track(canon, cfg);
  return formant_frames_impl(canon.samples, cfg, grid, pitch);
}

TapMatrix extract_tap(const Waveform& w, const TapConfig& cfg) {
  const Waveform canon = to_canonical(w, cfg);
  const Vec& x = canon.samples;
  const FrameGrid grid = make_grid(cfg, x.size());
  if (grid.frames < 3)
    throw Error(ErrorCode::kInputTooShort, "need at least 3 analysis frames");
  const int sr = cfg.sample_rate_hz;
  const Index frames = grid.frames;
  const double bin_hz = static_cast<double>(sr) / cfg.fft_size;

  const std::vector<PitchFrame> pitch = pitch_track(canon, cfg);
  const std::vector<FormantFrame> formants =
      formant_frames_impl(x, cfg, grid, pitch);

  // Loudness bank spans more of the spectrum than the metric bank.
  const FilterBank loudness_bank =
      erb_filterbank(sr, cfg.fft_size, 26, 50.0, 0.45 * sr);

  const Vec window = make_window(WindowKind::kHann, grid.win);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> buf(static_cast<std::size_t>(cfg.fft_size));
  std::vector<std::complex<double>> spec_out;

  std::vector<SpectralFrame> spectral(static_cast<std::size_t>(frames));
  for (Index t = 0; t < frames; ++t) {
    SpectralFrame& sf = spectral[static_cast<std::size_t>(t)];
    const Index start = t * grid.hop;
    double peak = 0.0;
    for (int i = 0; i < cfg.fft_size; ++i) {
      double v = 0.0;
      if (i < grid.win) {
        v = x[start + i];
        peak = std::max(peak, std::abs(v));
        v *= window[i];
      }
      buf[static_cast<std::size_t>(i)] = v;
    }
    fft.fwd(spec_out, buf);
    sf.power.resize(static_cast<Index>(spec_out.size()));
    for (Index k = 0; k < sf.power.size(); ++k)
      sf.power[k] = std::norm(spec_out[static_cast<std::size_t>(k)]);
    sf.peak_amp = peak;
    sf.rms_db = pitch[static_cast<std::size_t>(t)].rms_db;
  }

  TapMatrix m;
  m.values = Mat::Zero(frames, kNumTapParams);
  m.valid = BoolMat::Constant(frames, kNumTapParams, false);
  m.frame_rate_hz = cfg.frame_rate_hz;

  auto set = [&](Index t, TapParamId id, double v) {
    m.values(t, static_cast<int>(id)) = v;
    m.valid(t, static_cast<int>(id)) = true;
  };

  Vec loudness_contour = Vec::Zero(frames);
  for (Index t = 0; t < frames; ++t) {
    const PitchFrame& pf = pitch[static_cast<std::size_t>(t)];
    const SpectralFrame& sf = spectral[static_cast<std::size_t>(t)];
    const FormantFrame& ff = formants[static_cast<std::size_t>(t)];
    const bool silent = pf.rms_db < cfg.silence_floor_db;
    if (silent) continue;  // all LLD columns stay invalid/zero

    // Loudness: sum of compressed specific loudness over auditory bands.
    const Vec band_pow =
        (loudness_bank.weights.matrix() * sf.power.matrix()).array().max(0.0);
    const double loudness = band_pow.pow(0.3).sum();
    loudness_contour[t] = loudness;
    set(t, TapParamId::kLoudness, loudness);

    const double e_low = band_power_sum(sf.power, bin_hz, 50.0, 1000.0);
    const double e_high = band_power_sum(sf.power, bin_hz, 1000.0, 5000.0);
    set(t, TapParamId::kAlphaRatio,
        10.0 * std::log10(std::max(e_high, kDbFloor) /
                          std::max(e_low, kDbFloor)));
    set(t, TapParamId::kHammarbergIndex,
        band_peak_db(sf.power, bin_hz, 0.0, 2000.0) -
            band_peak_db(sf.power, bin_hz, 2000.0, 5000.0));
    set(t, TapParamId::kSpectralSlope0_500,
        spectral_slope_db_per_hz(sf.power, bin_hz, 0.0, 500.0));
    set(t, TapParamId::kSpectralSlope500_1500,
        spectral_slope_db_per_hz(sf.power, bin_hz, 500.0, 1500.0));

    if (!pf.voiced) continue;

    set(t, TapParamId::kPitch, pf.f0_hz);
    const double r = std::clamp(pf.strength, 1e-4, 1.0 - 1e-6);
    set(t, TapParamId::kHnr, 10.0 * std::log10(r / (1.0 - r)));

    // Jitter/shimmer: relative frame-to-frame perturbation inside a
    // voiced run; the first frame of a run has no predecessor.
    if (t > 0 && pitch[static_cast<std::size_t>(t - 1)].voiced) {
      const double t0 = 1.0 / pf.f0_hz;
      const double t0_prev = 1.0 / pitch[static_cast<std::size_t>(t - 1)].f0_hz;
      const double mean_t0 = 0.5 * (t0 + t0_prev);
      set(t, TapParamId::kJitter, std::abs(t0 - t0_prev) / mean_t0);

      const double a = sf.peak_amp;
      const double a_prev = spectral[static_cast<std::size_t>(t - 1)].peak_amp;
      const double mean_a = 0.5 * (a + a_prev);
      if (mean_a > 0.0)
        set(t, TapParamId::kShimmer, std::abs(a - a_prev) / mean_a);
    }

    if (ff.count >= 1) {
      set(t, TapParamId::kF1Freq, ff.freq_hz[0]);
      set(t, TapParamId::kF1Bandwidth, ff.bandwidth_hz[0]);
      set(t, TapParamId::kF1RelEnergy, ff.rel_energy_db[0]);
    }
    if (ff.count >= 2) {
      set(t, TapParamId::kF2Freq, ff.freq_hz[1]);
      set(t, TapParamId::kF2Bandwidth, ff.bandwidth_hz[1]);
      set(t, TapParamId::kF2RelEnergy, ff.rel_energy_db[1]);
    }
    if (ff.count >= 3) {
      set(t, TapParamId::kF3Freq, ff.freq_hz[2]);
      set(t, TapParamId::kF3Bandwidth, ff.bandwidth_hz[2]);
      set(t, TapParamId::kF3RelEnergy, ff.rel_energy_db[2]);
    }

    const double search = std::max(2.0 * bin_hz, 0.2 * pf.f0_hz);
    const double h1 = harmonic_amp_db(sf.power, bin_hz, pf.f0_hz, search);
    if (2.0 * pf.f0_hz < 0.5 * sr) {
      const double h2 = harmonic_amp_db(sf.power, bin_hz, 2.0 * pf.f0_hz, search);
      set(t, TapParamId::kH1H2HarmonicDiff, h1 - h2);
    }
    if (ff.count >= 3) {
      const int k3 = std::max(1, static_cast<int>(std::lround(ff.freq_hz[2] / pf.f0_hz)));
      const double f3_harmonic = k3 * pf.f0_hz;
      if (f3_harmonic < 0.5 * sr) {
        const double a3 = harmonic_amp_db(sf.power, bin_hz, f3_harmonic, search);
        set(t, TapParamId::kH1A3HarmonicDiff, h1 - a3);
      }
    }
  }

  // Utterance-level temporal parameters, broadcast over frames.
  const VoicingRuns runs = segment_voicing(pitch, grid.hop, sr, x.size());
  const double duration_s = canon.duration_s();

  // Loudness peaks: local maxima of the lightly smoothed contour.
  Vec smooth = loudness_contour;
  for (Index t = 1; t + 1 < frames; ++t)
    smooth[t] = (loudness_contour[t - 1] + loudness_contour[t] +
                 loudness_contour[t + 1]) / 3.0;
  const double peak_floor = 0.05 * smooth.maxCoeff();
  int peaks = 0;
  for (Index t = 1; t + 1 < frames; ++t)
    if (smooth[t] > smooth[t - 1] && smooth[t] > smooth[t + 1] &&
        smooth[t] > peak_floor)
      ++peaks;
  const double peak_rate = duration_s > 0.0 ? peaks / duration_s : 0.0;

  for (Index t = 0; t < frames; ++t) {
    set(t, TapParamId::kRateLoudnessPeaks, peak_rate);
    set(t, TapParamId::kMeanVoicedLen, runs.mean_voiced_s);
    set(t, TapParamId::kStdVoicedLen, runs.std_voiced_s);
    set(t, TapParamId::kMeanUnvoicedLen, runs.mean_unvoiced_s);
    set(t, TapParamId::kContinuousVoicedPerSec, runs.voiced_runs_per_s);
  }
  return m;
}

FunctionalVector compute_functionals(const TapMatrix& m) {
  m.check_shape();
  if (m.num_frames() < 1)
    throw Error(ErrorCode::kInputTooShort, "need at least one frame");

  auto percentile = [](std::vector<double>& sorted, double q) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double rank = q * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(rank);
    const double frac = rank - static_cast<double>(lo);
    if (lo + 1 >= n) return sorted[n - 1];
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
  };

  FunctionalVector fv;
  fv.values = Vec::Zero(kFunctionalVectorLength);
  fv.valid = BoolVec::Constant(kFunctionalVectorLength, false);

  for (int p = 0; p < kNumTapParams; ++p) {
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(m.num_frames()));
    for (Index t = 0; t < m.num_frames(); ++t)
      if (m.valid(t, p)) vals.push_back(m.values(t, p));
    const Index base = p * kFunctionalsPerParam;
    if (vals.empty()) continue;  // NoValidFrames: entries stay invalid

    const double mean =
        std::accumulate(vals.begin(), vals.end(), 0.0) / vals.size();
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= vals.size();
    std::sort(vals.begin(), vals.end());

    fv.values[base + 0] = mean;
    fv.values[base + 1] = std::sqrt(var);
    fv.values[base + 2] = percentile(vals, 0.20);
    fv.values[base + 3] = percentile(vals, 0.50);
    fv.values[base + 4] = percentile(vals, 0.80);
    for (int s = 0; s < kFunctionalsPerParam; ++s) fv.valid[base + s] = true;
  }

  // The four inherently scalar voicing statistics, passed through.
  const TapParamId scalars[] = {
      TapParamId::kMeanVoicedLen, TapParamId::kStdVoicedLen,
      TapParamId::kMeanUnvoicedLen, TapParamId::kContinuousVoicedPerSec};
  for (int i = 0; i < 4; ++i) {
    const Index idx = kNumTapParams * kFunctionalsPerParam + i;
    fv.values[idx] = m.values(0, static_cast<int>(scalars[i]));
    fv.valid[idx] = m.valid(0, static_cast<int>(scalars[i]));
  }
  return fv;
}

void tap_to_csv(const TapMatrix& m, const std::string& path) {
  m.check_shape();
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error(ErrorCode::kIoError, "cannot open " + path);
  const auto& names = tap_param_names();
  for (int p = 0; p < kNumTapParams; ++p)
    os << names[static_cast<std::size_t>(p)] << (p + 1 < kNumTapParams ? "," : "\n");
  os.precision(10);
  for (Index t = 0; t < m.num_frames(); ++t)
    for (int p = 0; p < kNumTapParams; ++p)
      os << m.values(t, p) << (p + 1 < kNumTapParams ? "," : "\n");
  if (!os) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

void tap_to_binary(const TapMatrix& m, const std::string& path) {
  m.check_shape();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::kIoError, "cannot open " + path);
  const char magic[4] = {'T', 'A', 'P', 'B'};
  const std::uint32_t version = 1;
  const std::uint32_t rows = static_cast<std::uint32_t>(m.num_frames());
  const std::uint32_t cols = kNumTapParams;
  os.write(magic, 4);
  os.write(reinterpret_cast<const char*>(&version), 4);
  os.write(reinterpret_cast<const char*>(&rows), 4);
  os.write(reinterpret_cast<const char*>(&cols), 4);
  os.write(reinterpret_cast<const char*>(&m.frame_rate_hz), 8);
  for (Index t = 0; t < m.num_frames(); ++t)
    for (int p = 0; p < kNumTapParams; ++p) {
      const double v = m.values(t, p);
      os.write(reinterpret_cast<const char*>(&v), 8);
    }
  for (Index t = 0; t < m.num_frames(); ++t)
    for (int p = 0; p < kNumTapParams; ++p) {
      const std::uint8_t v = m.valid(t, p) ? 1 : 0;
      os.write(reinterpret_cast<const char*>(&v), 1);
    }
  if (!os) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

TapMatrix tap_from_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIoError, "cannot open " + path);
  char magic[4];
  std::uint32_t version = 0, rows = 0, cols = 0;
  double frame_rate = 0.0;
  is.read(magic, 4);
  is.read(reinterpret_cast<char*>(&version), 4);
  is.read(reinterpret_cast<char*>(&rows), 4);
  is.read(reinterpret_cast<char*>(&cols), 4);
  is.read(reinterpret_cast<char*>(&frame_rate), 8);
  if (!is || std::memcmp(magic, "TAPB", 4) != 0 || version != 1 ||
      cols != kNumTapParams)
    throw Error(ErrorCode::kMalformedFile, "bad TAPB header in " + path);
  TapMatrix m;
  m.values = Mat::Zero(rows, cols);
  m.valid = BoolMat::Constant(rows, cols, false);
  m.frame_rate_hz = frame_rate;
  for (std::uint32_t t = 0; t < rows; ++t)
    for (std::uint32_t p = 0; p < cols; ++p) {
      double v;
      is.read(reinterpret_cast<char*>(&v), 8);
      m.values(t, p) = v;
    }
  for (std::uint32_t t = 0; t < rows; ++t)
    for (std::uint32_t p = 0; p < cols; ++p) {
      std::uint8_t v;
      is.read(reinterpret_cast<char*>(&v), 1);
      m.valid(t, p) = v != 0;
    }
  if (!is) throw Error(ErrorCode::kMalformedFile, "truncated TAPB in " + path);
  return m;
}

}  // namespace seval
