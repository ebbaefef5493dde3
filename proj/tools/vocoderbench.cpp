// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

// vocoderbench extract|train|synthesize|normalize|report --config <path>
//              [--method M] [--workers N] [--seed S]
// vocoderbench make-toy --out <dir> [--utterances N] [--seed S]
//
// Exit codes: 0 success, 1 partial or total failure, 2 usage error.

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <optional>
#include <string>

#include "vb/common/error.hpp"
#include "vb/common/log.hpp"
#include "vb/pipeline/commands.hpp"
#include "vb/pipeline/config.hpp"
#include "vb/pipeline/manifest.hpp"
#include "vb/pipeline/toy_corpus.hpp"

namespace vp = vb::pipeline;

namespace {

constexpr int kUsage = 2;

struct CommonOptions {
  std::string config;
  std::string method;
  std::optional<std::size_t> workers;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("--config", o.config, "Experiment config (key = value text or JSON)")->required();
  sub->add_option("--method", o.method, "RNN-Wo, RGA-Wo, SAR-Wo, SGA-Wo, SAR-Pr or SAR-Wa");
  sub->add_option("--workers", o.workers, "Utterance-level worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--seed", o.seed, "Re-derive every seed from this value");
}

vp::ExperimentConfig resolve(const CommonOptions& o) {
  auto loaded = vp::load_config(o.config);
  auto& cfg = loaded.config;
  if (!o.method.empty()) {
    cfg.method = vp::parse_method(o.method);
    cfg.acoustic.kind = vp::acoustic_kind(cfg.method);
  }
  if (o.workers) cfg.workers = *o.workers;
  if (o.seed) cfg.reseed(*o.seed);
  cfg.validate();
  if (!loaded.audit.hidden.empty())
    vb::log::warn("hidden_defaults", {{"config", o.config}, {"keys", loaded.audit.hidden}});
  vb::log::info("config", {{"path", o.config}, {"method", vp::to_string(cfg.method)}, {"workers", cfg.workers},
                           {"effective", cfg.to_json()}});
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale vocoder and acoustic-model workbench"};
  app.require_subcommand(1);
  CommonOptions common;
  const char* names[] = {"extract", "train", "synthesize", "normalize", "report"};
  const char* help[] = {"Analyse the corpus into the feature store", "Train the models the method needs",
                        "Synthesize the test split", "Level-normalise the test references",
                        "Write GV, modulation spectrum and IF reports"};
  for (int i = 0; i < 5; ++i) add_common(app.add_subcommand(names[i], help[i]), common);

  std::string toy_out;
  vp::ToyCorpusConfig toy;
  auto* make_toy = app.add_subcommand("make-toy", "Write a synthetic corpus, manifest and complete config");
  make_toy->add_option("--out", toy_out, "Output directory")->required();
  make_toy->add_option("--utterances", toy.utterances, "Utterance count")->check(CLI::PositiveNumber);
  make_toy->add_option("--seed", toy.seed, "Corpus seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (make_toy->parsed()) {
      auto cfg = vp::toy_experiment_config();
      toy.test = std::min<std::size_t>(toy.test, toy.utterances);
      toy.validation = std::min(toy.validation, toy.utterances - toy.test);
      const auto m = vp::write_toy_corpus(toy_out, toy, cfg.extraction);
      vp::save_config(std::filesystem::path(toy_out) / "experiment.conf", cfg);
      vb::log::info("toy_corpus", {{"dir", toy_out}, {"utterances", m.utterances.size()}});
      return 0;
    }

    const auto cfg = resolve(common);
    const auto manifest = vp::load_manifest(cfg.manifest);
    vp::CommandResult r;
    if (app.got_subcommand("extract"))
      r = vp::cmd_extract(cfg, manifest);
    else if (app.got_subcommand("train"))
      r = vp::cmd_train(cfg, manifest);
    else if (app.got_subcommand("synthesize"))
      r = vp::cmd_synthesize(cfg, manifest);
    else if (app.got_subcommand("normalize"))
      r = vp::cmd_normalize(cfg, manifest);
    else
      r = vp::cmd_report(cfg, manifest);
    nlohmann::json failed = nlohmann::json::array();
    for (const auto& f : r.failures) failed.push_back({{"id", f.id}, {"error", f.error}});
    vb::log::info("done", {{"command", app.get_subcommands().front()->get_name()},
                           {"processed", r.processed},
                           {"written", r.written},
                           {"skipped", r.skipped},
                           {"failures", failed}});
    return r.exit_code();
  } catch (const vb::ConfigError& e) {
    vb::log::error("usage", {{"error", e.what()}});
    return kUsage;
  } catch (const std::exception& e) {
    vb::log::error("failed", {{"error", e.what()}});
    return 1;
  }
}
