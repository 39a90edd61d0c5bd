#pragma once
// Input-space smoothing: virtual adversarial perturbations (one power
// iteration from a random probe direction), the VAT regularization loss, and
// the supervised FGSM-style variant.

#include "smoothnet/losses.hpp"
#include "smoothnet/mlp.hpp"

#include <random>
#include <stdexcept>

namespace smoothnet {

enum class Divergence { Kl, CrossEntropy };

struct VatConfig {
  double epsilon_x = 0.25;  // perturbation radius, input units
  double xi = 1e-3;         // probe scale for the second-order approximation
  Divergence divergence = Divergence::Kl;

  void validate() const {
    if (!(epsilon_x > 0.0)) throw std::invalid_argument("VatConfig: epsilon_x must be > 0");
    if (!(xi > 0.0)) throw std::invalid_argument("VatConfig: xi must be > 0");
  }
};

// Batch of input-shaped rows; each row has norm epsilon_x except where the
// probe gradient vanished exactly (random-direction fallback keeps the norm).
struct Perturbation {
  Matrix delta;
};

namespace detail {

inline LossKind divergence_loss(Divergence d) {
  return d == Divergence::Kl ? LossKind::KlToFixedTarget : LossKind::CrossEntropy;
}

// Unit Gaussian rows normalized to unit Euclidean norm.
inline Matrix random_unit_rows(Eigen::Index n, Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix out(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) out(i, j) = gauss(rng);
    double norm = out.row(i).norm();
    if (norm == 0.0) {  // all-zero draw; pick an axis direction
      out(i, 0) = 1.0;
      norm = 1.0;
    }
    out.row(i) /= norm;
  }
  return out;
}

}  // namespace detail

// Eq.-4-style perturbation: evaluate g = grad_dx l(f(x), f(x+dx)) at dx = xi*d
// with d a random unit direction, then return eps * g/||g|| per row. Rows with
// g exactly zero fall back to eps * d.
inline Perturbation vat_perturbation(const MlpNetwork& net, const Matrix& x,
                                     const VatConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  const Matrix d = detail::random_unit_rows(x.rows(), x.cols(), rng);
  const Matrix clean = forward(net, x);
  const Matrix probe_point = x + cfg.xi * d;
  const GradientBundle gb =
      backward(net, probe_point, detail::divergence_loss(cfg.divergence), &clean);

  Perturbation p;
  p.delta.resize(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double norm = gb.input_grads.row(i).norm();
    if (norm > 0.0)
      p.delta.row(i) = cfg.epsilon_x * gb.input_grads.row(i) / norm;
    else
      p.delta.row(i) = cfg.epsilon_x * d.row(i);
  }
  return p;
}

struct VatLossResult {
  double loss = 0.0;
  GradientBundle grads;  // weight/bias gradients of the VAT loss
};

// l_VAT = l(stop_grad(f(x)), f(x + delta)); the clean prediction and the
// perturbation are both treated as constants.
inline VatLossResult vat_loss(const MlpNetwork& net, const Matrix& x, const VatConfig& cfg,
                              std::mt19937_64& rng) {
  const Perturbation p = vat_perturbation(net, x, cfg, rng);
  const Matrix clean = forward(net, x);
  const Matrix adversarial = x + p.delta;
  VatLossResult r;
  r.grads = backward(net, adversarial, detail::divergence_loss(cfg.divergence), &clean);
  r.loss = r.grads.loss_value;
  return r;
}

// Supervised adversarial direction: g = grad_x CE(labels, f(x)), normalized to
// radius eps per row. Rows with zero gradient stay zero.
inline Perturbation fgsm_perturbation(const MlpNetwork& net, const Matrix& x,
                                      const DistributionBatch& labels, double epsilon_x) {
  if (!(epsilon_x > 0.0)) throw std::invalid_argument("fgsm_perturbation: epsilon_x must be > 0");
  const GradientBundle gb = backward(net, x, LossKind::CrossEntropy, &labels);
  Perturbation p;
  p.delta.resize(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double norm = gb.input_grads.row(i).norm();
    if (norm > 0.0)
      p.delta.row(i) = epsilon_x * gb.input_grads.row(i) / norm;
    else
      p.delta.row(i).setZero();
  }
  return p;
}

}  // namespace smoothnet
