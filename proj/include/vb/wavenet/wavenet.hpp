// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "vb/acoustic/standardizer.hpp"
#include "vb/common/matrix.hpp"
#include "vb/common/rng.hpp"
#include "vb/nn/layers.hpp"
#include "vb/nn/optimizer.hpp"
#include "vb/signal/mulaw.hpp"
#include "vb/wavenet/conditioning.hpp"

namespace vb::wavenet {

/// Block k has dilation 2^(k mod 10).
struct WavenetConfig {
  std::size_t blocks = 20;
  std::size_t residual = 64;
  std::size_t skip = 64;
  std::size_t post = 64;  // hidden width between the two output 1x1 layers
  int levels = 256;
  double mu = 255.0;
  std::size_t mgc_dims = 60;
  std::size_t f0_embedding = 64;
  std::size_t upsample = 80;
  int sample_rate = 16000;

  /// 40 blocks, 1024 classes.
  static WavenetConfig full();

  std::size_t dilation(std::size_t k) const { return std::size_t{1} << (k % 10); }
  std::size_t cond_dim() const { return mgc_dims + f0_embedding; }
  void validate() const;
  nlohmann::json to_json() const;
  static WavenetConfig from_json(const nlohmann::json& j);
};

/// 1 + sum of dilations.
std::size_t receptive_field(const WavenetConfig& cfg);

enum class VoicedMode { greedy, random };

/// Unvoiced samples are always drawn at random.
struct GenerationPolicy {
  VoicedMode voiced_mode = VoicedMode::greedy;
  std::uint64_t seed = 0;
};

VoicedMode parse_voiced_mode(const std::string& s);

struct WavenetTrainConfig {
  std::size_t steps = 500;
  std::size_t segment = 4000;  // samples per step, rounded down to whole frames
  nn::OptimizerConfig opt{nn::OptimizerKind::adam, 1e-3};
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  static WavenetTrainConfig from_json(const nlohmann::json& j);
};

struct WavenetExample {
  signal::QuantizedWave q;
  ConditioningTrack cond;
};

/// Truncates both parts to the whole frames they share.
WavenetExample make_example(signal::QuantizedWave q, ConditioningTrack cond);

/// Input: embedding of o_{t-1} (o_{-1} = the zero level). Each block gets the
/// frame conditioning [standardised MGC | embedding(qF0)]. Output: skip sum ->
/// ReLU -> 1x1 -> ReLU -> 1x1 -> log-softmax. The last 1x1 starts at zero, so
/// a fresh model predicts the uniform distribution.
class Wavenet {
 public:
  Wavenet() = default;
  Wavenet(const WavenetConfig& cfg, std::uint64_t seed);

  const WavenetConfig& config() const noexcept { return cfg_; }

  /// Teacher-forced log-probabilities, samples x L. `prev` is o_{-1}.
  Matrix log_probs(const std::vector<int>& levels, const ConditioningTrack& cond, int prev = -1);
  /// As log_probs and backpropagates the mean cross-entropy; returns it.
  double nll_backward(const std::vector<int>& levels, const ConditioningTrack& cond, int prev = -1);

  /// Sequential generation with per-step state reuse.
  signal::QuantizedWave generate(const ConditioningTrack& cond, const GenerationPolicy& policy);
  /// Log-probabilities of each generated step, kept from the last generate().
  const Matrix& last_generation_log_probs() const noexcept { return gen_logp_; }
  void keep_generation_log_probs(bool keep) { keep_gen_logp_ = keep; }

  void fit_conditioning(const std::vector<WavenetExample>& data);
  void set_optimizer(const nn::OptimizerConfig& opt);
  /// One optimiser step on frames [first_frame, first_frame + frames) of one example.
  double train_step(const WavenetExample& ex, std::size_t first_frame, std::size_t frames);

  /// Re-draws the output layer so that outputs depend on the inputs.
  void randomize_output_layer(std::uint64_t seed);

  nn::ParamList params();
  nlohmann::json arch_json() const;
  void save(const std::filesystem::path& path);
  static Wavenet load(const std::filesystem::path& path);

 private:
  void build(std::uint64_t seed);
  Matrix frame_conditioning(const ConditioningTrack& cond) const;
  void check_levels(const std::vector<int>& levels) const;

  WavenetConfig cfg_;
  nn::Tensor input_emb_, f0_emb_;
  std::vector<std::unique_ptr<nn::DilatedCausalBlock>> blocks_;
  std::unique_ptr<nn::Linear> post_;
  std::unique_ptr<nn::SoftmaxHead> head_;
  acoustic::Standardizer mgc_norm_;
  std::unique_ptr<nn::Optimizer> opt_;

  // forward caches
  std::vector<int> inputs_;
  std::vector<int> cond_levels_;
  Matrix skip_sum_, post_in_;
  Matrix gen_logp_;
  bool keep_gen_logp_ = false;
};

/// Mean teacher-forced cross-entropy. Throws ShapeError unless the
/// conditioning covers exactly the waveform's samples.
double wavenet_nll(Wavenet& model, const signal::QuantizedWave& q, const ConditioningTrack& cond);
/// Argmax on voiced samples (ties to the lower class), a draw from the
/// categorical on unvoiced samples.
signal::QuantizedWave wavenet_generate(Wavenet& model, const ConditioningTrack& cond, const GenerationPolicy& policy);
/// Per-sample argmax agreement with the true next level, teacher-forced.
double wavenet_accuracy(Wavenet& model, const signal::QuantizedWave& q, const ConditioningTrack& cond);

/// Random frame-aligned segments, one per step, examples visited uniformly.
/// Returns the per-step training loss.
std::vector<double> wavenet_train(Wavenet& model, const std::vector<WavenetExample>& data,
                                  const WavenetTrainConfig& cfg,
                                  const std::function<void(std::size_t, double)>& on_step = {});

/// Inverse-CDF draw from exp(logp) using 53 random bits.
int sample_categorical(std::span<const double> logp, Rng& rng);
/// Lowest index of the maximum.
int argmax(std::span<const double> v);

}  // namespace vb::wavenet
