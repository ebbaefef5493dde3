// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/pipeline/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include "internal.hpp"
#include "vb/common/error.hpp"
#include "vb/common/log.hpp"
#include "vb/common/rng.hpp"
#include "vb/features/feature_store.hpp"
#include "vb/nn/checkpoint.hpp"
#include "vb/signal/mulaw.hpp"
#include "vb/signal/wav_io.hpp"
#include "vb/wavenet/conditioning.hpp"

namespace fs = std::filesystem;

namespace vb::pipeline {

fs::path Workspace::feature_path(const std::string& id) const { return root / "features" / (id + ".vbfs"); }
fs::path Workspace::codebook_path() const { return root / "features" / "f0_codebook.json"; }
fs::path Workspace::model_path(const std::string& name) const { return root / "models" / (name + ".ck"); }
fs::path Workspace::loss_path(const std::string& name) const { return root / "models" / (name + ".loss.csv"); }
fs::path Workspace::gen_path(const std::string& system, const std::string& id) const {
  return root / "gen" / system / (id + ".vbfs");
}
fs::path Workspace::wav_path(const std::string& system, const std::string& id) const {
  return root / "wav" / system / (id + ".wav");
}
fs::path Workspace::report_dir() const { return root / "report"; }

std::vector<std::string> required_models(Method m) {
  const std::string ac = detail::acoustic_name(acoustic_kind(m));
  std::vector<std::string> out{ac, "f0"};
  if (uses_gan(m)) out.push_back("gan-" + ac);
  if (wave_path(m) == WavePath::wavenet) out.push_back("wavenet");
  return out;
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t, std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(0, i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(w, i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::uint64_t hash_file(const fs::path& path) {
  const auto bytes = signal::read_file_bytes(path);
  return fnv1a(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

namespace detail {

std::string acoustic_name(acoustic::AcousticKind k) { return k == acoustic::AcousticKind::rnn ? "rnn" : "sar"; }

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

UtteranceData load_utterance(const Workspace& ws, const Utterance& u) {
  const auto path = ws.feature_path(u.id);
  if (!fs::exists(path)) throw InputError("missing features for utterance " + u.id + " (run extract)");
  auto stored = features::read_features(path);
  UtteranceData d;
  d.id = u.id;
  d.features = std::move(stored.features);
  d.sample_rate = stored.sidecar.value("sample_rate", 16000);
  if (d.features.qf0.levels.size() != d.features.frames())
    throw InputError("features for utterance " + u.id + " carry no quantised F0");
  d.linguistic = features::read_linguistic(u.linguistic);
  const std::size_t n = std::min(d.linguistic.rows(), d.features.frames());
  if (n == 0) throw InputError("utterance " + u.id + " has no frames");
  if (d.linguistic.rows() != d.features.frames()) {
    log::debug("frame_count_mismatch",
               {{"id", u.id}, {"linguistic", d.linguistic.rows()}, {"acoustic", d.features.frames()}});
    Matrix l(n, d.linguistic.cols());
    for (std::size_t r = 0; r < n; ++r) std::copy(d.linguistic.row(r).begin(), d.linguistic.row(r).end(), l.row(r).begin());
    d.linguistic = std::move(l);
    auto& f = d.features;
    Matrix mgc(n, f.mgc.order()), bap(n, f.bap.bands());
    for (std::size_t r = 0; r < n; ++r) {
      std::copy(f.mgc.coeffs.row(r).begin(), f.mgc.coeffs.row(r).end(), mgc.row(r).begin());
      std::copy(f.bap.values.row(r).begin(), f.bap.values.row(r).end(), bap.row(r).begin());
    }
    f.mgc.coeffs = std::move(mgc);
    f.bap.values = std::move(bap);
    f.f0.f0.resize(n);
    f.qf0.levels.resize(n);
  }
  return d;
}

Matrix acoustic_matrix(const features::AcousticFrameSequence& f) {
  Matrix a(f.frames(), f.mgc.order() + f.bap.bands());
  a.set_col_block(0, f.mgc.coeffs);
  a.set_col_block(f.mgc.order(), f.bap.values);
  return a;
}

features::F0Codebook load_codebook(const Workspace& ws) {
  std::ifstream in(ws.codebook_path());
  if (!in) throw InputError("missing F0 codebook " + ws.codebook_path().string() + " (run extract)");
  const auto j = nlohmann::json::parse(in);
  return {j.at("log_min").get<double>(), j.at("log_max").get<double>()};
}

std::size_t wavenet_offset(const ExperimentConfig& cfg) {
  const auto fc = cfg.extraction.frames_for(cfg.wavenet.sample_rate);
  return (fc.frame_length - fc.hop) / 2;
}

void save_f0_model(const fs::path& path, acoustic::F0Model& m) { nn::save_checkpoint(path, m.arch_json(), m.params()); }

acoustic::F0Model load_f0_model(const fs::path& path) {
  if (!fs::exists(path)) throw InputError("missing checkpoint for model f0: " + path.string());
  const auto ck = nn::load_checkpoint(path);
  auto m = acoustic::F0Model::from_arch_json(ck.arch);
  nn::restore_params(ck, m.params());
  return m;
}

void save_gan(const fs::path& path, acoustic::GanPostfilter& g) { nn::save_checkpoint(path, g.arch_json(), g.params()); }

acoustic::GanPostfilter load_gan(const fs::path& path) {
  if (!fs::exists(path)) throw InputError("missing checkpoint for model " + path.stem().string() + ": " + path.string());
  const auto ck = nn::load_checkpoint(path);
  auto g = acoustic::GanPostfilter::from_arch_json(ck.arch);
  nn::restore_params(ck, g.params());
  return g;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// extract

namespace {

struct Extracted {
  const Utterance* utt = nullptr;
  std::string source_hash;
  std::optional<features::AcousticFrameSequence> seq;
  int sample_rate = 0;
  bool reused = false;  // features came from an up-to-date store file
};

std::vector<double> as_float32(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i]);
  return out;
}

}  // namespace

CommandResult cmd_extract(const ExperimentConfig& cfg, const DatasetManifest& manifest) {
  const Workspace ws{cfg.output_dir};
  fs::create_directories(ws.root / "features");
  const std::string settings = cfg.extraction.to_json().dump();
  CommandResult result;
  std::vector<Extracted> items(manifest.utterances.size());
  std::mutex mu;

  parallel_for(items.size(), cfg.workers, [&](std::size_t, std::size_t i) {
    const Utterance& u = manifest.utterances[i];
    Extracted& e = items[i];
    e.utt = &u;
    try {
      const auto bytes = signal::read_file_bytes(u.wav);
      e.source_hash = hash_hex(
          fnv1a(settings, fnv1a(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()))));
      const auto path = ws.feature_path(u.id);
      if (fs::exists(path) && fs::exists(features::sidecar_path(path))) {
        auto stored = features::read_features(path);
        if (stored.sidecar.value("source_hash", std::string()) == e.source_hash) {
          e.sample_rate = stored.sidecar.value("sample_rate", 0);
          e.seq = std::move(stored.features);
          e.reused = true;
          return;
        }
      }
      const auto wave = signal::parse_wav(bytes);
      e.sample_rate = wave.sample_rate;
      auto seq = features::analyze(wave, cfg.extraction);
      if (seq.frames() == 0) throw InputError("shorter than one analysis frame");
      seq.f0.f0 = as_float32(seq.f0.f0);
      e.seq = std::move(seq);
    } catch (const std::exception& ex) {
      std::lock_guard lock(mu);
      result.failures.push_back({u.id, ex.what()});
      log::error("extract_failed", {{"id", u.id}, {"error", ex.what()}});
    }
  });

  // The codebook spans the training split (all utterances if it is empty).
  std::vector<features::F0Track> tracks;
  for (const auto& e : items)
    if (e.seq && e.utt->split == Split::train) tracks.push_back(e.seq->f0);
  if (tracks.empty())
    for (const auto& e : items)
      if (e.seq) tracks.push_back(e.seq->f0);
  if (tracks.empty()) {
    log::error("extract_no_features", {});
    return result;
  }
  const auto codebook = features::F0Codebook::from_tracks(tracks);
  const nlohmann::json cb_json = {{"log_min", codebook.log_min}, {"log_max", codebook.log_max}};
  const std::string cb_text = cb_json.dump(2) + "\n";
  bool cb_same = false;
  if (fs::exists(ws.codebook_path())) {
    std::ifstream in(ws.codebook_path());
    std::stringstream ss;
    ss << in.rdbuf();
    cb_same = ss.str() == cb_text;
  }
  if (!cb_same) detail::write_text(ws.codebook_path(), cb_text);
  const std::string cb_hash = hash_hex(fnv1a(cb_json.dump()));

  for (auto& e : items) {
    if (!e.seq) continue;
    ++result.processed;
    const auto path = ws.feature_path(e.utt->id);
    if (e.reused) {
      const auto side = features::read_features(path).sidecar;
      if (side.value("codebook_hash", std::string()) == cb_hash) {
        ++result.skipped;
        log::debug("extract_skip", {{"id", e.utt->id}});
        continue;
      }
    }
    features::attach_quantized_f0(*e.seq, codebook);
    const nlohmann::json side = {{"source_hash", e.source_hash},
                                 {"codebook_hash", cb_hash},
                                 {"sample_rate", e.sample_rate},
                                 {"extraction", cfg.extraction.to_json()}};
    features::write_features(path, *e.seq, side);
    ++result.written;
    log::info("extract_written", {{"id", e.utt->id}, {"frames", e.seq->frames()}});
  }

  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : result.failures) failures.push_back({{"id", f.id}, {"error", f.error}});
  detail::write_text(ws.root / "features" / "failures.json", failures.dump(2) + "\n");
  log::info("extract_done", {{"processed", result.processed},
                             {"written", result.written},
                             {"skipped", result.skipped},
                             {"failed", result.failures.size()}});
  return result;
}

// ---------------------------------------------------------------------------
// train

namespace {

struct Stamp {
  fs::path path;
  nlohmann::json value;

  bool current() const {
    if (!fs::exists(path)) return false;
    std::ifstream in(path);
    try {
      return nlohmann::json::parse(in) == value;
    } catch (const nlohmann::json::exception&) {
      return false;
    }
  }
  void write() const { detail::write_text(path, value.dump(2) + "\n"); }
};

Stamp stamp_for(const Workspace& ws, const std::string& name, nlohmann::json settings, nlohmann::json inputs) {
  const fs::path ck = ws.model_path(name);
  if (!fs::exists(ck)) return {fs::path(ck).concat(".json"), {{"settings", settings}, {"inputs", inputs}, {"missing", true}}};
  inputs["checkpoint"] = hash_hex(hash_file(ck));
  return {fs::path(ck).concat(".json"), {{"settings", std::move(settings)}, {"inputs", std::move(inputs)}}};
}

void finish_stamp(const Workspace& ws, const std::string& name, nlohmann::json settings, nlohmann::json inputs) {
  stamp_for(ws, name, std::move(settings), std::move(inputs)).write();
}

std::string loss_csv(const std::string& header, const std::vector<std::vector<double>>& rows) {
  std::string out = header + "\n";
  char buf[64];
  for (std::size_t s = 0; s < rows.size(); ++s) {
    out += std::to_string(s);
    for (double v : rows[s]) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

std::vector<std::size_t> epoch_order(std::size_t n, std::size_t epoch, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, "epoch" + std::to_string(epoch)));
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  return order;
}

}  // namespace

CommandResult cmd_train(const ExperimentConfig& cfg, const DatasetManifest& manifest) {
  const Workspace ws{cfg.output_dir};
  fs::create_directories(ws.root / "models");
  CommandResult result;

  const auto train_utts = manifest.in_split(Split::train);
  if (train_utts.empty()) throw InputError("train: the manifest has no training utterances");
  std::vector<detail::UtteranceData> data;
  nlohmann::json feature_hashes = nlohmann::json::object();
  for (const Utterance* u : train_utts) {
    data.push_back(detail::load_utterance(ws, *u));
    feature_hashes[u->id] = hash_hex(hash_file(ws.feature_path(u->id)) ^ hash_file(u->linguistic));
  }
  const std::size_t ling_dim = data.front().linguistic.cols();
  for (const auto& d : data)
    if (d.linguistic.cols() != ling_dim) throw InputError("utterance " + d.id + ": linguistic dimension differs");

  // Acoustic model.
  const std::string ac_name = detail::acoustic_name(cfg.acoustic.kind);
  const nlohmann::json ac_settings = cfg.acoustic.to_json();
  if (stamp_for(ws, ac_name, ac_settings, feature_hashes).current()) {
    log::info("train_up_to_date", {{"model", ac_name}});
    ++result.skipped;
  } else {
    std::vector<acoustic::TrainingPair> pairs;
    for (const auto& d : data) pairs.push_back({d.linguistic, detail::acoustic_matrix(d.features)});
    acoustic::AcousticModel model(ling_dim, cfg.acoustic);
    const auto curve = model.train(pairs, [&](std::size_t step, double loss) {
      if ((step + 1) % 50 == 0) log::info("train_progress", {{"model", ac_name}, {"step", step + 1}, {"loss", loss}});
    });
    std::vector<std::vector<double>> rows;
    for (double v : curve) rows.push_back({v});
    detail::write_text(ws.loss_path(ac_name), loss_csv("step,loss", rows));
    model.save(ws.model_path(ac_name));
    finish_stamp(ws, ac_name, ac_settings, feature_hashes);
    ++result.written;
    log::info("train_done", {{"model", ac_name}, {"steps", curve.size()}, {"final_loss", curve.empty() ? 0.0 : curve.back()}});
  }
  ++result.processed;

  // F0 model.
  const nlohmann::json f0_settings = {{"steps", cfg.f0.steps}, {"seed", cfg.f0.seed}, {"model", cfg.f0.model.to_json()}};
  if (stamp_for(ws, "f0", f0_settings, feature_hashes).current()) {
    log::info("train_up_to_date", {{"model", "f0"}});
    ++result.skipped;
  } else {
    acoustic::F0Model f0(ling_dim, cfg.f0.model, cfg.f0.seed);
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> order;
    for (std::size_t s = 0; s < cfg.f0.steps; ++s) {
      if (s % data.size() == 0) order = epoch_order(data.size(), s / data.size(), cfg.f0.seed);
      const auto& d = data[order[s % data.size()]];
      const double loss = acoustic::f0_model_train(f0, d.linguistic, d.features.qf0);
      rows.push_back({loss});
      if ((s + 1) % 50 == 0) log::info("train_progress", {{"model", "f0"}, {"step", s + 1}, {"loss", loss}});
    }
    detail::write_text(ws.loss_path("f0"), loss_csv("step,loss", rows));
    detail::save_f0_model(ws.model_path("f0"), f0);
    finish_stamp(ws, "f0", f0_settings, feature_hashes);
    ++result.written;
    log::info("train_done", {{"model", "f0"}, {"steps", rows.size()}});
  }
  ++result.processed;

  // GAN postfilter on the acoustic model's own outputs.
  if (uses_gan(cfg.method)) {
    const std::string name = "gan-" + ac_name;
    const nlohmann::json settings = {{"steps", cfg.gan.steps}, {"seed", cfg.gan.seed}, {"model", cfg.gan.model.to_json()}};
    nlohmann::json inputs = feature_hashes;
    inputs["acoustic"] = hash_hex(hash_file(ws.model_path(ac_name)));
    if (stamp_for(ws, name, settings, inputs).current()) {
      log::info("train_up_to_date", {{"model", name}});
      ++result.skipped;
    } else {
      auto model = acoustic::AcousticModel::load(ws.model_path(ac_name));
      std::vector<Matrix> real, fake;
      for (const auto& d : data) {
        real.push_back(detail::acoustic_matrix(d.features));
        fake.push_back(model.generate(d.linguistic));
      }
      acoustic::GanPostfilter pf(cfg.gan.model, cfg.gan.seed);
      std::vector<std::vector<double>> rows;
      std::vector<std::size_t> order;
      for (std::size_t s = 0; s < cfg.gan.steps; ++s) {
        if (s % data.size() == 0) order = epoch_order(data.size(), s / data.size(), cfg.gan.seed);
        const std::size_t k = order[s % data.size()];
        const auto losses = acoustic::gan_train_step(pf, real[k], fake[k]);
        rows.push_back({losses.g_loss, losses.d_loss});
        if ((s + 1) % 50 == 0)
          log::info("train_progress", {{"model", name}, {"step", s + 1}, {"g_loss", losses.g_loss}, {"d_loss", losses.d_loss}});
      }
      detail::write_text(ws.loss_path(name), loss_csv("step,g_loss,d_loss", rows));
      detail::save_gan(ws.model_path(name), pf);
      finish_stamp(ws, name, settings, inputs);
      ++result.written;
      log::info("train_done", {{"model", name}, {"steps", rows.size()}});
    }
    ++result.processed;
  }

  // Wavenet on natural features and natural audio.
  if (wave_path(cfg.method) == WavePath::wavenet) {
    const nlohmann::json settings = {{"config", cfg.wavenet.to_json()},
                                     {"train", cfg.wavenet_train.to_json()},
                                     {"extraction", cfg.extraction.to_json()}};
    nlohmann::json inputs = feature_hashes;
    for (const Utterance* u : train_utts) inputs["wav:" + u->id] = hash_hex(hash_file(u->wav));
    if (stamp_for(ws, "wavenet", settings, inputs).current()) {
      log::info("train_up_to_date", {{"model", "wavenet"}});
      ++result.skipped;
    } else {
      const std::size_t off = detail::wavenet_offset(cfg);
      std::vector<wavenet::WavenetExample> examples;
      for (std::size_t i = 0; i < data.size(); ++i) {
        auto wave = signal::read_wav(train_utts[i]->wav);
        if (wave.sample_rate != cfg.wavenet.sample_rate) wave = signal::resample_linear(wave, cfg.wavenet.sample_rate);
        const auto& f = data[i].features;
        const std::size_t n = f.frames() * cfg.wavenet.upsample;
        signal::Waveform seg{std::vector<double>(n, 0.0), wave.sample_rate};
        for (std::size_t t = 0; t < n && off + t < wave.size(); ++t) seg.samples[t] = wave.samples[off + t];
        auto q = signal::mu_law_encode(seg, cfg.wavenet.levels, cfg.wavenet.mu);
        wavenet::ConditioningTrack cond{f.mgc.coeffs, f.qf0.levels, cfg.wavenet.upsample};
        examples.push_back(wavenet::make_example(std::move(q), std::move(cond)));
      }
      wavenet::Wavenet net(cfg.wavenet, cfg.wavenet_train.seed);
      const auto curve = wavenet::wavenet_train(net, examples, cfg.wavenet_train, [&](std::size_t step, double loss) {
        if ((step + 1) % 25 == 0) log::info("train_progress", {{"model", "wavenet"}, {"step", step + 1}, {"loss", loss}});
      });
      std::vector<std::vector<double>> rows;
      for (double v : curve) rows.push_back({v});
      detail::write_text(ws.loss_path("wavenet"), loss_csv("step,loss", rows));
      net.save(ws.model_path("wavenet"));
      finish_stamp(ws, "wavenet", settings, inputs);
      ++result.written;
      log::info("train_done", {{"model", "wavenet"}, {"steps", curve.size()}});
    }
    ++result.processed;
  }
  return result;
}

}  // namespace vb::pipeline
