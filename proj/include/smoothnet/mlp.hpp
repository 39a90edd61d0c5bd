#pragma once
// Dense multilayer perceptron with ReLU hidden layers and a softmax head.
// Exact reverse-mode gradients with respect to both weights and inputs,
// double precision throughout. Batches are row-per-sample matrices.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace smoothnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Batch of K-dimensional probability rows (each row sums to 1).
using DistributionBatch = Matrix;

enum class LossKind { CrossEntropy, Entropy, KlToFixedTarget };

struct MlpNetwork {
  std::vector<int> dims;          // layer widths: input, hidden..., K
  std::vector<Matrix> weights;    // weights[l]: dims[l+1] x dims[l]
  std::vector<Vector> biases;     // biases[l]: dims[l+1]

  int layer_count() const { return static_cast<int>(weights.size()); }
  int input_dim() const { return dims.front(); }
  int output_dim() const { return dims.back(); }

  std::size_t param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      n += static_cast<std::size_t>(dims[l + 1]) * static_cast<std::size_t>(dims[l]);
      n += static_cast<std::size_t>(dims[l + 1]);
    }
    return n;
  }

  friend bool operator==(const MlpNetwork& a, const MlpNetwork& b) {
    if (a.dims != b.dims) return false;
    for (std::size_t l = 0; l < a.weights.size(); ++l) {
      if ((a.weights[l].array() != b.weights[l].array()).any()) return false;
      if ((a.biases[l].array() != b.biases[l].array()).any()) return false;
    }
    return true;
  }
};

struct GradientBundle {
  std::vector<Matrix> weight_grads;  // same shapes as MlpNetwork::weights
  std::vector<Vector> bias_grads;    // same shapes as MlpNetwork::biases
  Matrix input_grads;                // same shape as the input batch
  double loss_value = 0.0;
};

// Canonical parameter layout: layer-major, weights before biases,
// row-major within each weight matrix.
struct FlatParams {
  Vector values;
};

namespace detail {

inline void check_dims(const std::vector<int>& dims) {
  if (dims.size() < 2)
    throw std::invalid_argument("MlpNetwork needs at least input and output widths");
  for (int d : dims)
    if (d < 1) throw std::invalid_argument("MlpNetwork layer widths must be >= 1");
}

inline void check_input(const MlpNetwork& net, const Matrix& x) {
  if (x.cols() != net.input_dim())
    throw std::invalid_argument("input width " + std::to_string(x.cols()) +
                                " does not match network input dim " +
                                std::to_string(net.input_dim()));
  if (x.rows() < 1) throw std::invalid_argument("empty input batch");
}

struct ForwardTrace {
  std::vector<Matrix> inputs;    // inputs[l]: activation fed into layer l
  std::vector<Matrix> preacts;   // preacts[l]: x*W[l]^T + b[l]
  Matrix log_probs;              // n x K, fused log-softmax of the last preact
  Matrix probs;                  // exp(log_probs)
};

// Row-wise log-softmax with max subtraction; never produces -inf for finite z.
inline void log_softmax_rows(const Matrix& z, Matrix& log_probs, Matrix& probs) {
  const Eigen::Index n = z.rows(), k = z.cols();
  log_probs.resize(n, k);
  probs.resize(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = z.row(i).maxCoeff();
    double sum = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) sum += std::exp(z(i, j) - m);
    const double lse = m + std::log(sum);
    for (Eigen::Index j = 0; j < k; ++j) {
      log_probs(i, j) = z(i, j) - lse;
      probs(i, j) = std::exp(log_probs(i, j));
    }
  }
}

inline ForwardTrace run_forward(const MlpNetwork& net, const Matrix& x) {
  check_input(net, x);
  ForwardTrace t;
  const int layers = net.layer_count();
  t.inputs.resize(layers);
  t.preacts.resize(layers);
  t.inputs[0] = x;
  for (int l = 0; l < layers; ++l) {
    t.preacts[l].noalias() = t.inputs[l] * net.weights[l].transpose();
    t.preacts[l].rowwise() += net.biases[l].transpose();
    if (l + 1 < layers) t.inputs[l + 1] = t.preacts[l].cwiseMax(0.0);
  }
  log_softmax_rows(t.preacts[layers - 1], t.log_probs, t.probs);
  return t;
}

}  // namespace detail

// Weights ~ N(0, 2/fan_in), biases zero; draw order is canonical layout order.
inline MlpNetwork init_network(const std::vector<int>& dims, std::uint64_t seed) {
  detail::check_dims(dims);
  MlpNetwork net;
  net.dims = dims;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const double scale = std::sqrt(2.0 / static_cast<double>(dims[l]));
    Matrix w(dims[l + 1], dims[l]);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = scale * gauss(rng);
    net.weights.push_back(std::move(w));
    net.biases.push_back(Vector::Zero(dims[l + 1]));
  }
  return net;
}

// Batch of softmax rows: entries in (0,1], each row sums to 1.
inline Matrix forward(const MlpNetwork& net, const Matrix& x) {
  return detail::run_forward(net, x).probs;
}

inline Matrix forward_log_probs(const MlpNetwork& net, const Matrix& x) {
  return detail::run_forward(net, x).log_probs;
}

// Mean-over-batch loss plus exact gradients wrt every weight, bias and input.
// `target` is required for CrossEntropy and KlToFixedTarget and must be absent
// for Entropy. No gradient flows through the target.
inline GradientBundle backward(const MlpNetwork& net, const Matrix& x, LossKind kind,
                               const Matrix* target = nullptr) {
  const bool needs_target = kind != LossKind::Entropy;
  if (needs_target && target == nullptr)
    throw std::invalid_argument("loss kind requires a target batch");
  if (!needs_target && target != nullptr)
    throw std::invalid_argument("entropy loss takes no target");

  detail::ForwardTrace t = detail::run_forward(net, x);
  const Eigen::Index n = x.rows();
  const Eigen::Index k = net.output_dim();
  if (target != nullptr && (target->rows() != n || target->cols() != k))
    throw std::invalid_argument("target shape does not match batch/output dims");

  const double inv_n = 1.0 / static_cast<double>(n);
  double loss = 0.0;
  Matrix delta(n, k);  // dLoss/dZ at the softmax preactivation
  switch (kind) {
    case LossKind::CrossEntropy: {
      loss = -(target->array() * t.log_probs.array()).sum() * inv_n;
      delta = (t.probs - *target) * inv_n;
      break;
    }
    case LossKind::Entropy: {
      // H = -sum p log p per row; dH/dz_j = p_j * (sum_k p_k log p_k - log p_j)
      const Matrix plogp = t.probs.array() * t.log_probs.array();
      loss = -plogp.sum() * inv_n;
      const Vector row_sums = plogp.rowwise().sum();
      delta = t.probs.array() * (row_sums.replicate(1, k).array() - t.log_probs.array());
      delta *= inv_n;
      break;
    }
    case LossKind::KlToFixedTarget: {
      // KL(q || p) with q constant; 0 log 0 := 0.
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < k; ++j) {
          const double q = (*target)(i, j);
          if (q > 0.0) acc += q * (std::log(q) - t.log_probs(i, j));
        }
      loss = acc * inv_n;
      delta = (t.probs - *target) * inv_n;
      break;
    }
  }

  GradientBundle gb;
  gb.loss_value = loss;
  const int layers = net.layer_count();
  gb.weight_grads.resize(layers);
  gb.bias_grads.resize(layers);
  for (int l = layers - 1; l >= 0; --l) {
    gb.weight_grads[l].noalias() = delta.transpose() * t.inputs[l];
    gb.bias_grads[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      // ReLU subgradient at 0 is 0: strict comparison.
      Matrix next = delta * net.weights[l];
      delta = next.cwiseProduct(
          (t.preacts[l - 1].array() > 0.0).cast<double>().matrix());
    } else {
      gb.input_grads.noalias() = delta * net.weights[0];
    }
  }
  return gb;
}

inline FlatParams flatten(const MlpNetwork& net) {
  FlatParams flat;
  flat.values.resize(static_cast<Eigen::Index>(net.param_count()));
  Eigen::Index idx = 0;
  for (int l = 0; l < net.layer_count(); ++l) {
    const Matrix& w = net.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat.values[idx++] = w(r, c);
    for (Eigen::Index r = 0; r < net.biases[l].size(); ++r)
      flat.values[idx++] = net.biases[l][r];
  }
  return flat;
}

inline MlpNetwork unflatten(const FlatParams& flat, const std::vector<int>& dims) {
  detail::check_dims(dims);
  MlpNetwork net;
  net.dims = dims;
  std::size_t expected = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l)
    expected += static_cast<std::size_t>(dims[l + 1]) * (dims[l] + 1);
  if (static_cast<std::size_t>(flat.values.size()) != expected)
    throw std::invalid_argument("flat parameter vector has length " +
                                std::to_string(flat.values.size()) + ", dims need " +
                                std::to_string(expected));
  Eigen::Index idx = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Matrix w(dims[l + 1], dims[l]);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = flat.values[idx++];
    Vector b(dims[l + 1]);
    for (Eigen::Index r = 0; r < b.size(); ++r) b[r] = flat.values[idx++];
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

// Checkpoint format: line "SMOOTHNET v1", a comma-separated dims line, then
// one parameter scalar per line in canonical FlatParams order at 17
// significant digits. Round trip is bit-exact.
inline void save_checkpoint(const MlpNetwork& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  out << "SMOOTHNET v1\n";
  for (std::size_t i = 0; i < net.dims.size(); ++i)
    out << (i ? "," : "") << net.dims[i];
  out << "\n";
  const FlatParams flat = flatten(net);
  char buf[40];
  for (Eigen::Index i = 0; i < flat.values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", flat.values[i]);
    out << buf << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline MlpNetwork load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "SMOOTHNET v1")
    throw std::runtime_error(path + ": missing SMOOTHNET v1 header");
  if (!std::getline(in, line)) throw std::runtime_error(path + ": missing dims line");
  std::vector<int> dims;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t comma = line.find(',', pos);
    const std::string tok = line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                        : comma - pos);
    try {
      dims.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw std::runtime_error(path + ": bad dims entry '" + tok + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  detail::check_dims(dims);
  std::size_t expected = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l)
    expected += static_cast<std::size_t>(dims[l + 1]) * (dims[l] + 1);
  FlatParams flat;
  flat.values.resize(static_cast<Eigen::Index>(expected));
  for (std::size_t i = 0; i < expected; ++i) {
    if (!std::getline(in, line))
      throw std::runtime_error(path + ": truncated, expected " + std::to_string(expected) +
                               " parameters, got " + std::to_string(i));
    char* end = nullptr;
    const double v = std::strtod(line.c_str(), &end);
    if (end == line.c_str())
      throw std::runtime_error(path + ": bad parameter at line " + std::to_string(i + 3));
    flat.values[static_cast<Eigen::Index>(i)] = v;
  }
  return unflatten(flat, dims);
}

}  // namespace smoothnet
