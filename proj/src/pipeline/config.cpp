// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/pipeline/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "vb/common/error.hpp"
#include "vb/common/rng.hpp"

namespace vb::pipeline {
namespace {

struct MethodName {
  Method method;
  const char* id;
};

constexpr MethodName kMethods[] = {
    {Method::rnn_wo, "RNN-Wo"}, {Method::rga_wo, "RGA-Wo"}, {Method::sar_wo, "SAR-Wo"},
    {Method::sga_wo, "SGA-Wo"}, {Method::sar_pr, "SAR-Pr"}, {Method::sar_wa, "SAR-Wa"},
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Drops a trailing # comment that is not inside a string.
std::string strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && quoted) {
      ++i;
    } else if (line[i] == '"') {
      quoted = !quoted;
    } else if (line[i] == '#' && !quoted) {
      return std::string(line.substr(0, i));
    }
  }
  return std::string(line);
}

std::vector<std::string> split_top_level(std::string_view s, char sep) {
  std::vector<std::string> out;
  bool quoted = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && quoted) {
      ++i;
    } else if (s[i] == '"') {
      quoted = !quoted;
    } else if (s[i] == sep && !quoted) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  out.push_back(trim(s.substr(start)));
  return out;
}

nlohmann::json parse_scalar(const std::string& v, std::size_t line) {
  const auto fail = [&](const std::string& why) {
    return ConfigError("config line " + std::to_string(line) + ": " + why);
  };
  if (v.empty()) throw fail("missing value");
  if (v.front() == '"') {
    // JSON string escapes are a superset of the ones we write.
    try {
      return nlohmann::json::parse(v);
    } catch (const nlohmann::json::exception&) {
      throw fail("bad string " + v);
    }
  }
  if (v == "true") return true;
  if (v == "false") return false;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  if (v.find_first_of(".eE") == std::string::npos &&
      v.find("inf") == std::string::npos && v.find("nan") == std::string::npos) {
    std::int64_t i = 0;
    if (auto r = std::from_chars(first, last, i); r.ec == std::errc() && r.ptr == last) return i;
    std::uint64_t u = 0;
    if (auto r = std::from_chars(first, last, u); r.ec == std::errc() && r.ptr == last) return u;
  }
  double d = 0.0;
  if (auto r = std::from_chars(first, last, d); r.ec == std::errc() && r.ptr == last && std::isfinite(d)) return d;
  throw fail("cannot parse value '" + v + "'");
}

nlohmann::json parse_value(const std::string& v, std::size_t line) {
  if (!v.empty() && v.front() == '[') {
    if (v.back() != ']') throw ConfigError("config line " + std::to_string(line) + ": unterminated array");
    nlohmann::json arr = nlohmann::json::array();
    const std::string inner = trim(std::string_view(v).substr(1, v.size() - 2));
    if (inner.empty()) return arr;
    for (const auto& item : split_top_level(inner, ',')) arr.push_back(parse_scalar(item, line));
    return arr;
  }
  return parse_scalar(v, line);
}

std::vector<std::string> split_key(const std::string& key, std::size_t line) {
  auto parts = split_top_level(key, '.');
  for (const auto& p : parts)
    if (p.empty() || p.find_first_of(" \t\"[]=") != std::string::npos)
      throw ConfigError("config line " + std::to_string(line) + ": bad key '" + key + "'");
  return parts;
}

void format_section(std::ostringstream& out, const nlohmann::json& j, const std::string& prefix) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!it.value().is_object()) out << it.key() << " = " << it.value().dump() << "\n";
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_object()) continue;
    const std::string name = prefix.empty() ? it.key() : prefix + "." + it.key();
    out << "\n[" << name << "]\n";
    format_section(out, it.value(), name);
  }
}

void flatten(const nlohmann::json& j, const std::string& prefix, std::set<std::string>& keys) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string name = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it.value().is_object())
      flatten(it.value(), name, keys);
    else
      keys.insert(name);
  }
}

nlohmann::json section(const nlohmann::json& j, const char* key) {
  return j.contains(key) ? j.at(key) : nlohmann::json::object();
}

}  // namespace

Method parse_method(std::string_view id) {
  for (const auto& m : kMethods)
    if (id == m.id) return m.method;
  if (id == "SAR-Pm") throw ConfigError("method SAR-Pm (PML vocoder) is not supported");
  throw ConfigError("unknown method '" + std::string(id) +
                    "' (expected RNN-Wo, RGA-Wo, SAR-Wo, SGA-Wo, SAR-Pr or SAR-Wa)");
}

std::string to_string(Method m) {
  for (const auto& e : kMethods)
    if (e.method == m) return e.id;
  return "?";
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> v = {Method::rnn_wo, Method::rga_wo, Method::sar_wo,
                                        Method::sga_wo, Method::sar_pr, Method::sar_wa};
  return v;
}

acoustic::AcousticKind acoustic_kind(Method m) {
  return m == Method::rnn_wo || m == Method::rga_wo ? acoustic::AcousticKind::rnn : acoustic::AcousticKind::sar;
}

bool uses_gan(Method m) { return m == Method::rga_wo || m == Method::sga_wo; }

WavePath wave_path(Method m) {
  if (m == Method::sar_pr) return WavePath::phase_recovery;
  if (m == Method::sar_wa) return WavePath::wavenet;
  return WavePath::source_filter;
}

void ExperimentConfig::validate() const {
  if (workers == 0) throw ConfigError("workers must be at least 1");
  if (acoustic.mgc_dims != extraction.mgc_order)
    throw ConfigError("acoustic.mgc_dims must equal extraction.mgc_order");
  if (acoustic.bap_dims != extraction.bap_bands)
    throw ConfigError("acoustic.bap_dims must equal extraction.bap_bands");
  if (uses_gan(method) &&
      (acoustic.mgc_dims != acoustic::kGanMgcDims || acoustic.bap_dims != acoustic::kGanBapDims))
    throw ConfigError("GAN postfilter needs 60 MGC and 25 BAP dimensions");
  if (wave_path(method) == WavePath::wavenet) {
    wavenet.validate();
    if (wavenet.mgc_dims != extraction.mgc_order) throw ConfigError("wavenet.mgc_dims must equal extraction.mgc_order");
    if (std::abs(static_cast<double>(wavenet.upsample) * extraction.frame_rate - wavenet.sample_rate) > 1e-9)
      throw ConfigError("wavenet.upsample * frame_rate must equal wavenet.sample_rate");
  }
  griffin_lim.validate();
  if (!signal::is_cola(report.if_frames)) throw ConfigError("report IF frames must be COLA");
  for (std::size_t d : report.ms_dims)
    if (d >= extraction.mgc_order) throw ConfigError("report.ms_dims entry " + std::to_string(d) + " out of range");
  if (!std::isfinite(target_dbov) || target_dbov > 0.0) throw ConfigError("target_dbov must be <= 0");
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json ac = acoustic.to_json();
  ac.erase("kind");
  nlohmann::json gl = griffin_lim.to_json();
  gl.erase("sample_rate");
  return {
      {"method", to_string(method)},
      {"manifest", manifest.generic_string()},
      {"output_dir", output_dir.generic_string()},
      {"target_dbov", target_dbov},
      {"wav_format", wav_format == signal::WavFormat::pcm16 ? "pcm16" : "float32"},
      {"extraction", extraction.to_json()},
      {"acoustic", ac},
      {"f0", {{"steps", f0.steps}, {"seed", f0.seed}, {"model", f0.model.to_json()}}},
      {"gan", {{"steps", gan.steps}, {"seed", gan.seed}, {"model", gan.model.to_json()}}},
      {"wavenet", wavenet.to_json()},
      {"wavenet_train", wavenet_train.to_json()},
      {"griffin_lim", gl},
      {"synthesis", {{"seed", synthesis_seed}}},
      {"report",
       {{"ms_dims", report.ms_dims},
        {"ms_fft_size", report.ms_fft_size},
        {"if_utterances", report.if_utterances},
        {"if_frame_length", report.if_frames.frame_length},
        {"if_hop", report.if_frames.hop},
        {"if_window", signal::to_string(report.if_frames.window)},
        {"if_rel_db", report.if_rel_db}}},
  };
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be an object");
  ExperimentConfig c;
  try {
    c.method = parse_method(j.value("method", to_string(c.method)));
    c.manifest = j.value("manifest", c.manifest.generic_string());
    c.output_dir = j.value("output_dir", c.output_dir.generic_string());
    c.workers = j.value("workers", c.workers);
    c.target_dbov = j.value("target_dbov", c.target_dbov);
    const std::string fmt = j.value("wav_format", std::string("pcm16"));
    if (fmt == "pcm16")
      c.wav_format = signal::WavFormat::pcm16;
    else if (fmt == "float32")
      c.wav_format = signal::WavFormat::float32;
    else
      throw ConfigError("wav_format must be pcm16 or float32");

    c.extraction = features::ExtractionConfig::from_json(section(j, "extraction"));
    c.acoustic = acoustic::AcousticTrainConfig::from_json(section(j, "acoustic"));
    c.acoustic.kind = acoustic_kind(c.method);
    const auto f0 = section(j, "f0");
    c.f0.steps = f0.value("steps", c.f0.steps);
    c.f0.seed = f0.value("seed", c.f0.seed);
    c.f0.model = acoustic::F0ModelConfig::from_json(section(f0, "model"));
    const auto gan = section(j, "gan");
    c.gan.steps = gan.value("steps", c.gan.steps);
    c.gan.seed = gan.value("seed", c.gan.seed);
    c.gan.model = acoustic::GanConfig::from_json(section(gan, "model"));
    c.wavenet = wavenet::WavenetConfig::from_json(section(j, "wavenet"));
    c.wavenet_train = wavenet::WavenetTrainConfig::from_json(section(j, "wavenet_train"));
    c.griffin_lim = vocoder::GriffinLimConfig::from_json(section(j, "griffin_lim"));
    c.synthesis_seed = section(j, "synthesis").value("seed", c.synthesis_seed);
    const auto rep = section(j, "report");
    c.report.ms_dims = rep.value("ms_dims", c.report.ms_dims);
    c.report.ms_fft_size = rep.value("ms_fft_size", c.report.ms_fft_size);
    c.report.if_utterances = rep.value("if_utterances", c.report.if_utterances);
    c.report.if_frames.frame_length = rep.value("if_frame_length", c.report.if_frames.frame_length);
    c.report.if_frames.hop = rep.value("if_hop", c.report.if_frames.hop);
    c.report.if_frames.window =
        signal::parse_window(rep.value("if_window", signal::to_string(c.report.if_frames.window)));
    c.report.if_rel_db = rep.value("if_rel_db", c.report.if_rel_db);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

void ExperimentConfig::reseed(std::uint64_t seed) {
  acoustic.seed = derive_seed(seed, "acoustic");
  f0.seed = derive_seed(seed, "f0");
  gan.seed = derive_seed(seed, "gan");
  wavenet_train.seed = derive_seed(seed, "wavenet_train");
  griffin_lim.seed = derive_seed(seed, "griffin_lim");
  synthesis_seed = derive_seed(seed, "synthesis");
}

nlohmann::json parse_config_text(std::string_view text) {
  nlohmann::json root = nlohmann::json::object();
  std::vector<std::string> current;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config line " + std::to_string(line_no) + ": bad section header");
      current = split_key(trim(std::string_view(line).substr(1, line.size() - 2)), line_no);
      nlohmann::json* node = &root;
      for (const auto& k : current) {
        node = &(*node)[k];
        if (node->is_null()) *node = nlohmann::json::object();
        if (!node->is_object()) throw ConfigError("config line " + std::to_string(line_no) + ": section clashes with a value");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    auto path = current;
    for (auto& k : split_key(trim(std::string_view(line).substr(0, eq)), line_no)) path.push_back(k);
    nlohmann::json* node = &root;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      node = &(*node)[path[i]];
      if (node->is_null()) *node = nlohmann::json::object();
      if (!node->is_object()) throw ConfigError("config line " + std::to_string(line_no) + ": key clashes with a value");
    }
    if (node->contains(path.back()))
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + path.back() + "'");
    (*node)[path.back()] = parse_value(trim(std::string_view(line).substr(eq + 1)), line_no);
  }
  return root;
}

std::string format_config_text(const nlohmann::json& j) {
  std::ostringstream out;
  format_section(out, j, "");
  return out.str();
}

ConfigAudit audit_config(const nlohmann::json& file, const nlohmann::json& effective) {
  std::set<std::string> have, want;
  flatten(file, "", have);
  flatten(effective, "", want);
  ConfigAudit a;
  std::set_difference(want.begin(), want.end(), have.begin(), have.end(), std::back_inserter(a.hidden));
  std::set_difference(have.begin(), have.end(), want.begin(), want.end(), std::back_inserter(a.unknown));
  std::erase(a.unknown, "workers");
  return a;
}

LoadedConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  LoadedConfig out;
  if (first != std::string::npos && text[first] == '{') {
    try {
      out.file = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config " + path.string() + ": " + e.what());
    }
  } else {
    out.file = parse_config_text(text);
  }
  out.config = ExperimentConfig::from_json(out.file);
  out.audit = audit_config(out.file, out.config.to_json());
  if (!out.audit.unknown.empty()) {
    std::string keys;
    for (const auto& k : out.audit.unknown) keys += (keys.empty() ? "" : ", ") + k;
    throw ConfigError("config " + path.string() + ": unknown keys " + keys);
  }
  const auto base = path.parent_path();
  if (out.config.manifest.is_relative()) out.config.manifest = base / out.config.manifest;
  if (out.config.output_dir.is_relative()) out.config.output_dir = base / out.config.output_dir;
  return out;
}

void save_config(const std::filesystem::path& path, const ExperimentConfig& cfg) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << format_config_text(cfg.to_json());
}

}  // namespace vb::pipeline
