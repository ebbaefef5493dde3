// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <map>

#include "internal.hpp"
#include "vb/common/log.hpp"
#include "vb/features/feature_store.hpp"
#include "vb/metrics/metrics.hpp"
#include "vb/pipeline/commands.hpp"
#include "vb/signal/fft.hpp"
#include "vb/signal/wav_io.hpp"

namespace fs = std::filesystem;

namespace vb::pipeline {
namespace {

struct SystemData {
  std::string name;
  std::vector<features::AcousticFrameSequence> features;  // one per test utterance
  std::vector<fs::path> wavs;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Analysis frame of the feature track nearest to IF frame m's centre.
std::vector<bool> voiced_mask(const features::F0Track& f0, std::size_t if_frames, const signal::FrameConfig& fc,
                              int sample_rate, const ExperimentConfig& cfg) {
  const auto af = cfg.extraction.frames_for(sample_rate);
  std::vector<bool> mask(if_frames, false);
  for (std::size_t m = 0; m < if_frames; ++m) {
    const double centre = static_cast<double>(m * fc.hop + fc.frame_length / 2);
    const double n = std::round((centre - af.frame_length / 2.0) / af.hop);
    if (n >= 0 && n < static_cast<double>(f0.size())) mask[m] = f0.f0[static_cast<std::size_t>(n)] > 0.0;
  }
  return mask;
}

}  // namespace

CommandResult cmd_report(const ExperimentConfig& cfg, const DatasetManifest& manifest) {
  const Workspace ws{cfg.output_dir};
  const auto dir = ws.report_dir();
  fs::create_directories(dir);
  const auto utts = manifest.in_split(Split::test);
  CommandResult result;

  std::vector<SystemData> systems;
  {
    SystemData nat{"natural", {}, {}};
    for (const Utterance* u : utts) {
      try {
        nat.features.push_back(detail::load_utterance(ws, *u).features);
        nat.wavs.push_back(u->wav);
      } catch (const std::exception& ex) {
        log::warn("report_missing", {{"id", u->id}, {"system", "natural"}, {"error", ex.what()}});
      }
    }
    if (!nat.features.empty()) systems.push_back(std::move(nat));
  }
  for (Method m : all_methods()) {
    const std::string name = to_string(m);
    SystemData s{name, {}, {}};
    bool complete = !utts.empty();
    for (const Utterance* u : utts) {
      const auto gp = ws.gen_path(name, u->id);
      const auto wp = ws.wav_path(name, u->id);
      if (!fs::exists(gp) || !fs::exists(wp)) {
        complete = false;
        break;
      }
      s.features.push_back(features::read_features(gp).features);
      s.wavs.push_back(wp);
    }
    if (complete) systems.push_back(std::move(s));
  }

  nlohmann::json summary = {{"systems", nlohmann::json::object()}, {"test_utterances", utts.size()}};

  // Global variance of the MGC.
  std::map<std::string, std::vector<double>> gv_means;
  std::string gv_csv = "system,dim,variance\n";
  nlohmann::json gv_json = nlohmann::json::object();
  for (const auto& s : systems) {
    std::vector<Matrix> mgc;
    for (const auto& f : s.features) mgc.push_back(f.mgc.coeffs);
    const auto gv = metrics::global_variance(mgc);
    gv_means[s.name] = gv.mean;
    gv_json[s.name] = gv.to_json();
    for (std::size_t d = 0; d < gv.mean.size(); ++d) gv_csv += s.name + "," + std::to_string(d) + "," + fmt(gv.mean[d]) + "\n";
    double avg = 0.0;
    for (double v : gv.mean) avg += v / static_cast<double>(gv.mean.size());
    summary["systems"][s.name]["gv_mean"] = avg;
  }
  detail::write_text(dir / "gv.csv", gv_csv);
  detail::write_text(dir / "gv.json", gv_json.dump(2) + "\n");

  // Modulation spectrum per configured dimension, power averaged over utterances.
  std::size_t longest = 2;
  for (const auto& s : systems)
    for (const auto& f : s.features) longest = std::max(longest, f.frames());
  const std::size_t fft = std::max(cfg.report.ms_fft_size, signal::next_power_of_two(longest));
  std::string ms_csv = "system,dim,bin,freq_hz,log_power_db\n";
  for (const auto& s : systems) {
    for (std::size_t dim : cfg.report.ms_dims) {
      std::vector<double> power(fft / 2 + 1, 0.0);
      std::vector<double> freq;
      std::size_t used = 0;
      for (const auto& f : s.features) {
        if (f.frames() < 2) continue;
        const auto ms = metrics::modulation_spectrum(f.mgc.coeffs, dim, fft, cfg.extraction.frame_rate);
        for (std::size_t k = 0; k < power.size(); ++k) power[k] += ms.power[k];
        freq = ms.freq_hz;
        ++used;
      }
      if (used == 0) continue;
      for (std::size_t k = 0; k < power.size(); ++k) {
        const double p = std::max(power[k] / static_cast<double>(used), metrics::kPowerFloor);
        ms_csv += s.name + "," + std::to_string(dim) + "," + std::to_string(k) + "," + fmt(freq[k]) + "," +
                  fmt(10.0 * std::log10(p)) + "\n";
      }
    }
  }
  detail::write_text(dir / "ms.csv", ms_csv);

  // IF maps for the first utterances, and the voiced-frame deviation spread.
  for (const auto& s : systems) {
    const std::size_t count = std::min(cfg.report.if_utterances, s.wavs.size());
    double spread = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < count; ++i) {
      try {
        const auto wave = signal::read_wav(s.wavs[i]);
        const auto map = metrics::instantaneous_frequency(wave, cfg.report.if_frames);
        metrics::write_if_csv(metrics::report_path(dir / "if" / s.name, utts[i]->id, "if"), map);
        const auto mask =
            voiced_mask(s.features[i].f0, map.deviation_hz.rows(), cfg.report.if_frames, wave.sample_rate, cfg);
        spread += metrics::if_deviation_std(map, mask, cfg.report.if_rel_db);
        ++used;
      } catch (const std::exception& ex) {
        log::warn("report_if_failed", {{"system", s.name}, {"id", utts[i]->id}, {"error", ex.what()}});
      }
    }
    if (used > 0) summary["systems"][s.name]["if_voiced_deviation_std_hz"] = spread / static_cast<double>(used);
  }

  // Soft check: RNN's generated-MGC GV should not exceed SAR's.
  if (gv_means.count("RNN-Wo") && gv_means.count("SAR-Wo")) {
    const auto& rnn = gv_means["RNN-Wo"];
    const auto& sar = gv_means["SAR-Wo"];
    std::size_t ok = 0;
    for (std::size_t d = 0; d < rnn.size(); ++d) ok += rnn[d] <= sar[d] ? 1 : 0;
    const double frac = static_cast<double>(ok) / static_cast<double>(rnn.size());
    summary["gv_order"] = {{"rnn_le_sar_fraction", frac}, {"threshold", 0.7}, {"passed", frac >= 0.7}};
    if (frac < 0.7) log::warn("gv_order_soft_check", {{"rnn_le_sar_fraction", frac}, {"threshold", 0.7}});
  }

  detail::write_text(dir / "report.json", summary.dump(2) + "\n");
  result.processed = systems.size();
  result.written = systems.size();
  // Missing inputs are warnings; the report never fails.
  log::info("report_done", {{"systems", systems.size()}, {"dir", dir.string()}});
  return result;
}

}  // namespace vb::pipeline
