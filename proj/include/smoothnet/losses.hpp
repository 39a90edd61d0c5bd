#pragma once
// Scalar losses over batches of probability rows. Natural log, mean over the
// batch. Probabilities are floored at 1e-30 inside logarithms; 0*log(0) = 0.

#include "smoothnet/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace smoothnet {

inline constexpr double kLogFloor = 1e-30;

namespace detail {
inline void check_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string(what) + ": shape mismatch");
}
}  // namespace detail

inline bool is_distribution_batch(const Matrix& m, double tol = 1e-9) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!(m(i, j) >= 0.0)) return false;
      sum += m(i, j);
    }
    if (std::abs(sum - 1.0) > tol) return false;
  }
  return true;
}

// Mean over rows of -<target, log pred>.
inline double cross_entropy(const DistributionBatch& target, const DistributionBatch& pred) {
  detail::check_same_shape(target, pred, "cross_entropy");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < target.rows(); ++i)
    for (Eigen::Index j = 0; j < target.cols(); ++j) {
      const double t = target(i, j);
      if (t != 0.0) acc -= t * std::log(std::max(pred(i, j), kLogFloor));
    }
  return acc / static_cast<double>(target.rows());
}

// Mean over rows of -<pred, log pred>.
inline double entropy(const DistributionBatch& pred) {
  if (pred.rows() < 1) throw std::invalid_argument("entropy: empty batch");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < pred.rows(); ++i)
    for (Eigen::Index j = 0; j < pred.cols(); ++j) {
      const double p = pred(i, j);
      if (p != 0.0) acc -= p * std::log(std::max(p, kLogFloor));
    }
  return acc / static_cast<double>(pred.rows());
}

// Mean over rows of sum p log(p/q); >= 0, 0 iff p == q row-wise.
inline double kl_divergence(const DistributionBatch& p, const DistributionBatch& q) {
  detail::check_same_shape(p, q, "kl_divergence");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      const double pi = p(i, j);
      if (pi != 0.0)
        acc += pi * (std::log(std::max(pi, kLogFloor)) - std::log(std::max(q(i, j), kLogFloor)));
    }
  return acc / static_cast<double>(p.rows());
}

inline DistributionBatch one_hot(const std::vector<int>& labels, int class_count) {
  DistributionBatch out = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), class_count);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= class_count)
      throw std::invalid_argument("one_hot: label out of range");
    out(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  }
  return out;
}

}  // namespace smoothnet
