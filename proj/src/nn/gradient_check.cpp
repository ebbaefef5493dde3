// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/nn/gradient_check.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "vb/common/error.hpp"

namespace vb::nn {
namespace {

double dot(const Matrix& a, const Matrix& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.values()[i] * b.values()[i];
  return s;
}

void fill_uniform(Matrix& m, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : m.values()) v = u(rng);
}

class Checker {
 public:
  Checker(Layer& layer, const Matrix& r, const GradientCheckOptions& opts) : layer_(layer), r_(r), opts_(opts) {}

  double loss(const Matrix& x) { return dot(layer_.forward(x), r_); }

  // Central difference of the loss w.r.t. `slot`, compared with `analytic`.
  double compare(double& slot, double analytic, const Matrix& x) {
    const double saved = slot;
    slot = saved + opts_.epsilon;
    const double lp = loss(x);
    slot = saved - opts_.epsilon;
    const double lm = loss(x);
    slot = saved;
    const double numeric = (lp - lm) / (2.0 * opts_.epsilon);
    const double denom = std::max({std::abs(analytic), std::abs(numeric), opts_.denominator_floor});
    return std::abs(analytic - numeric) / denom;
  }

 private:
  Layer& layer_;
  const Matrix& r_;
  const GradientCheckOptions& opts_;
};

void record(std::vector<GradientCheckEntry>& entries, const std::string& name, double err) {
  auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return e.name == name; });
  if (it == entries.end()) {
    entries.push_back({name, 0, 0.0});
    it = entries.end() - 1;
  }
  ++it->checked;
  it->max_rel_error = std::max(it->max_rel_error, err);
}

}  // namespace

double GradientCheckReport::max_rel_error() const {
  double m = 0.0;
  for (const auto& e : entries) m = std::max(m, e.max_rel_error);
  return m;
}

nlohmann::json GradientCheckReport::to_json() const {
  nlohmann::json j{{"layer", spec.to_json()}, {"trials", trials}, {"max_rel_error", max_rel_error()}};
  for (const auto& e : entries)
    j["entries"].push_back({{"name", e.name}, {"checked", e.checked}, {"max_rel_error", e.max_rel_error}});
  return j;
}

GradientCheckReport gradient_check(const LayerSpec& spec, std::size_t trials, std::uint64_t seed,
                                   const GradientCheckOptions& opts) {
  spec.validate();
  if (opts.min_steps < 1 || opts.max_steps < opts.min_steps)
    throw ConfigError("gradient_check: bad step range");
  GradientCheckReport report{spec, trials, {}};
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> steps(opts.min_steps, opts.max_steps);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    auto layer = make_layer(spec);
    layer->init(rng);
    // Randomise every parameter, biases included, so no entry sits at a
    // special value such as zero.
    for (Tensor* p : layer->params()) fill_uniform(p->value, rng);

    const std::size_t T = steps(rng);
    Matrix x(T, spec.in);
    fill_uniform(x, rng);
    Matrix r(T, layer->output_dim());
    fill_uniform(r, rng);

    auto* block = dynamic_cast<DilatedCausalBlock*>(layer.get());
    Matrix cond;
    if (block && spec.cond > 0) {
      cond.resize((T + spec.upsample - 1) / spec.upsample, spec.cond);
      fill_uniform(cond, rng);
      block->set_conditioning(cond);
    }

    zero_grad(layer->params());
    layer->forward(x);
    const Matrix dx = layer->backward(r);
    const Matrix dcond = block && spec.cond > 0 ? block->cond_gradient() : Matrix();

    Checker check(*layer, r, opts);
    for (Tensor* p : layer->params()) {
      const Matrix analytic = p->grad;
      for (std::size_t i = 0; i < p->size(); ++i)
        record(report.entries, p->name, check.compare(p->value.values()[i], analytic.values()[i], x));
    }
    for (std::size_t i = 0; i < x.size(); ++i)
      record(report.entries, "input", check.compare(x.values()[i], dx.values()[i], x));
    if (block && spec.cond > 0) {
      for (std::size_t i = 0; i < cond.size(); ++i) {
        double& slot = cond.values()[i];
        const double saved = slot;
        slot = saved + opts.epsilon;
        block->set_conditioning(cond);
        const double lp = check.loss(x);
        slot = saved - opts.epsilon;
        block->set_conditioning(cond);
        const double lm = check.loss(x);
        slot = saved;
        block->set_conditioning(cond);
        const double numeric = (lp - lm) / (2.0 * opts.epsilon);
        const double a = dcond.values()[i];
        record(report.entries, "cond",
               std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), opts.denominator_floor}));
      }
    }
  }
  return report;
}

}  // namespace vb::nn
