#pragma once
// Adversarial block coordinate descent: per inner iteration, a small gradient
// ascent step on a random coordinate block, then a standard descent step on
// the complementary block, gradients recomputed between the two sub-steps on
// the same batch. Plain SGD lives here too so both share one update kernel.

#include "smoothnet/mlp.hpp"

#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace smoothnet {

struct AbcdConfig {
  double eta_ascent = 1e-5;      // eta_A, deliberately small
  double eta_descent = 0.1;      // eta_D >> eta_A
  int inner_iters = 1;           // L
  double ascent_fraction = 0.5;  // Bernoulli probability a coordinate ascends

  void validate() const {
    if (!(eta_ascent >= 0.0) || !(eta_descent >= 0.0))
      throw std::invalid_argument("AbcdConfig: learning rates must be nonnegative");
    if (inner_iters < 1) throw std::invalid_argument("AbcdConfig: inner_iters must be >= 1");
    if (!(ascent_fraction >= 0.0 && ascent_fraction <= 1.0))
      throw std::invalid_argument("AbcdConfig: ascent_fraction must be in [0,1]");
  }
};

// Gamma over all parameters, entries in {0,-1}. Ascent block: Gamma_i == -1;
// descent block: Gamma_i == 0 (i.e. Gamma+1 == 1). Complementary by construction.
struct Mask {
  std::vector<std::int8_t> gamma;

  bool ascends(std::size_t i) const { return gamma[i] == -1; }
  bool descends(std::size_t i) const { return gamma[i] == 0; }
  std::size_t ascent_count() const {
    std::size_t n = 0;
    for (auto g : gamma) n += (g == -1);
    return n;
  }
};

inline Mask sample_mask(std::size_t param_count, double ascent_fraction, std::mt19937_64& rng) {
  if (!(ascent_fraction >= 0.0 && ascent_fraction <= 1.0))
    throw std::invalid_argument("sample_mask: ascent_fraction must be in [0,1]");
  Mask m;
  m.gamma.resize(param_count);
  std::bernoulli_distribution coin(ascent_fraction);
  for (std::size_t i = 0; i < param_count; ++i) m.gamma[i] = coin(rng) ? -1 : 0;
  return m;
}

// Exactly `ascent_count` coordinates ascend; used by tests that need a
// deterministic half-split rather than Bernoulli sampling.
inline Mask exact_split_mask(std::size_t param_count, std::size_t ascent_count,
                             std::mt19937_64& rng) {
  if (ascent_count > param_count)
    throw std::invalid_argument("exact_split_mask: ascent_count > param_count");
  Mask m;
  m.gamma.assign(param_count, 0);
  for (std::size_t i = 0; i < ascent_count; ++i) m.gamma[i] = -1;
  for (std::size_t i = param_count; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(m.gamma[i - 1], m.gamma[pick(rng)]);
  }
  return m;
}

// GradFn: (const Vector& w) -> std::pair<double, Vector> giving loss and
// gradient at w. Coordinates outside a sub-step's block are left untouched
// (not multiplied by zero), so they are bitwise unchanged.
template <typename GradFn>
double abcd_step(Vector& w, GradFn&& grad_fn, const AbcdConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  const std::size_t n = static_cast<std::size_t>(w.size());
  double entry_loss = 0.0;
  for (int l = 0; l < cfg.inner_iters; ++l) {
    const Mask mask = sample_mask(n, cfg.ascent_fraction, rng);

    const std::pair<double, Vector> ascent_eval = grad_fn(w);
    if (l == 0) entry_loss = ascent_eval.first;
    for (std::size_t i = 0; i < n; ++i)
      if (mask.ascends(i)) w[static_cast<Eigen::Index>(i)] += cfg.eta_ascent * ascent_eval.second[static_cast<Eigen::Index>(i)];

    const std::pair<double, Vector> descent_eval = grad_fn(w);
    for (std::size_t i = 0; i < n; ++i)
      if (mask.descends(i)) w[static_cast<Eigen::Index>(i)] -= cfg.eta_descent * descent_eval.second[static_cast<Eigen::Index>(i)];
  }
  return entry_loss;
}

// Full-parameter descent on the mean batch loss; optional heavy-ball momentum
// for baselines (velocity must then persist across calls).
template <typename GradFn>
double sgd_step(Vector& w, GradFn&& grad_fn, double eta, double momentum = 0.0,
                Vector* velocity = nullptr) {
  if (!(eta >= 0.0)) throw std::invalid_argument("sgd_step: eta must be nonnegative");
  const std::pair<double, Vector> eval = grad_fn(w);
  const Eigen::Index n = w.size();
  if (momentum == 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) w[i] -= eta * eval.second[i];
  } else {
    if (velocity == nullptr) throw std::invalid_argument("sgd_step: momentum needs a velocity");
    if (velocity->size() == 0) *velocity = Vector::Zero(n);
    if (velocity->size() != n) throw std::invalid_argument("sgd_step: velocity size mismatch");
    for (Eigen::Index i = 0; i < n; ++i) {
      (*velocity)[i] = momentum * (*velocity)[i] + eval.second[i];
      w[i] -= eta * (*velocity)[i];
    }
  }
  return eval.first;
}

// Loss selector for the network-facing steps; target empty unless the kind
// needs one.
struct LossSpec {
  LossKind kind = LossKind::CrossEntropy;
  Matrix target;

  const Matrix* target_ptr() const { return target.size() > 0 ? &target : nullptr; }
};

namespace detail {

inline Vector flatten_grads(const GradientBundle& gb) {
  std::size_t total = 0;
  for (std::size_t l = 0; l < gb.weight_grads.size(); ++l)
    total += static_cast<std::size_t>(gb.weight_grads[l].size()) +
             static_cast<std::size_t>(gb.bias_grads[l].size());
  Vector flat(static_cast<Eigen::Index>(total));
  Eigen::Index idx = 0;
  for (std::size_t l = 0; l < gb.weight_grads.size(); ++l) {
    const Matrix& g = gb.weight_grads[l];
    for (Eigen::Index r = 0; r < g.rows(); ++r)
      for (Eigen::Index c = 0; c < g.cols(); ++c) flat[idx++] = g(r, c);
    for (Eigen::Index r = 0; r < gb.bias_grads[l].size(); ++r)
      flat[idx++] = gb.bias_grads[l][r];
  }
  return flat;
}

// Shared network-to-flat-space adapter so SGD and ABCD updates run through
// the exact same kernels.
template <typename Step>
double step_network(MlpNetwork& net, const Matrix& x, const LossSpec& spec, Step&& step) {
  FlatParams flat = flatten(net);
  const std::vector<int> dims = net.dims;
  auto grad_fn = [&](const Vector& w) {
    const MlpNetwork candidate = unflatten(FlatParams{w}, dims);
    GradientBundle gb = backward(candidate, x, spec.kind, spec.target_ptr());
    return std::pair<double, Vector>(gb.loss_value, flatten_grads(gb));
  };
  const double loss = step(flat.values, grad_fn);
  net = unflatten(flat, dims);
  return loss;
}

}  // namespace detail

// Returns the batch loss at entry (before any sub-step).
inline double abcd_step(MlpNetwork& net, const Matrix& x, const LossSpec& spec,
                        const AbcdConfig& cfg, std::mt19937_64& rng) {
  return detail::step_network(net, x, spec, [&](Vector& w, auto& grad_fn) {
    return abcd_step(w, grad_fn, cfg, rng);
  });
}

inline double sgd_step(MlpNetwork& net, const Matrix& x, const LossSpec& spec, double eta,
                       double momentum = 0.0, Vector* velocity = nullptr) {
  return detail::step_network(net, x, spec, [&](Vector& w, auto& grad_fn) {
    return sgd_step(w, grad_fn, eta, momentum, velocity);
  });
}

}  // namespace smoothnet
