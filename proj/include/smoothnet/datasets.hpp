#pragma once
// Synthetic data generation, labeled/unlabeled splitting, CSV ingest/export,
// and feature standardization.
//
// CSV format: comma separated, '.' decimal, optional final integer label
// column, optional header row (auto-detected when the first row is not
// numeric). Values are written with 17 significant digits so a round trip is
// exact.

#include "smoothnet/mlp.hpp"
#include "smoothnet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace smoothnet {

struct PointSet {
  Matrix features;          // one row per point
  std::vector<int> labels;  // empty when unlabeled
  int class_count = 0;

  Eigen::Index size() const { return features.rows(); }
  bool has_labels() const { return !labels.empty(); }
};

struct SslDataset {
  PointSet labeled;
  PointSet unlabeled;  // labels stripped
  PointSet test;
};

// Two interleaved arcs: class 0 on the upper unit arc centered at the origin,
// class 1 on the lower arc of the unit circle centered at (1, 0.5). Angles are
// evenly spaced; isotropic Gaussian noise of scale noise_sigma is added.
inline PointSet half_moons(int n_per_class, double noise_sigma, std::uint64_t seed) {
  if (n_per_class < 1) throw std::invalid_argument("half_moons: n_per_class must be >= 1");
  if (noise_sigma < 0.0) throw std::invalid_argument("half_moons: noise_sigma must be >= 0");
  PointSet ps;
  ps.class_count = 2;
  ps.features.resize(2 * n_per_class, 2);
  ps.labels.resize(2 * n_per_class);
  std::mt19937_64 rng(derive_seed(seed, Stream::DataNoise));
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double pi = std::numbers::pi;
  for (int c = 0; c < 2; ++c) {
    for (int j = 0; j < n_per_class; ++j) {
      const double theta = n_per_class == 1 ? 0.0 : pi * j / (n_per_class - 1);
      double px, py;
      if (c == 0) {
        px = std::cos(theta);
        py = std::sin(theta);
      } else {
        px = 1.0 - std::cos(theta);
        py = 0.5 - std::sin(theta);
      }
      const Eigen::Index row = c * n_per_class + j;
      ps.features(row, 0) = px + noise_sigma * gauss(rng);
      ps.features(row, 1) = py + noise_sigma * gauss(rng);
      ps.labels[static_cast<std::size_t>(row)] = c;
    }
  }
  return ps;
}

// K Gaussian clusters with centers at radius `center_radius` along seeded
// random unit directions (evenly spaced on the circle when dim == 2).
inline PointSet gaussian_blobs(int n_per_class, int class_count, int dim, double center_radius,
                               double noise_sigma, std::uint64_t seed) {
  if (n_per_class < 1 || class_count < 2 || dim < 1)
    throw std::invalid_argument("gaussian_blobs: invalid counts");
  if (noise_sigma < 0.0) throw std::invalid_argument("gaussian_blobs: noise_sigma must be >= 0");
  PointSet ps;
  ps.class_count = class_count;
  ps.features.resize(static_cast<Eigen::Index>(n_per_class) * class_count, dim);
  ps.labels.resize(static_cast<std::size_t>(n_per_class) * class_count);
  std::mt19937_64 rng(derive_seed(seed, Stream::DataNoise));
  std::normal_distribution<double> gauss(0.0, 1.0);

  Matrix centers(class_count, dim);
  if (dim == 2) {
    const double pi = std::numbers::pi;
    for (int c = 0; c < class_count; ++c) {
      centers(c, 0) = center_radius * std::cos(2.0 * pi * c / class_count);
      centers(c, 1) = center_radius * std::sin(2.0 * pi * c / class_count);
    }
  } else {
    for (int c = 0; c < class_count; ++c) {
      Vector dir(dim);
      for (int j = 0; j < dim; ++j) dir[j] = gauss(rng);
      const double norm = dir.norm();
      centers.row(c) = center_radius * (norm > 0.0 ? dir / norm : Vector::Unit(dim, 0)).transpose();
    }
  }
  for (int c = 0; c < class_count; ++c)
    for (int j = 0; j < n_per_class; ++j) {
      const Eigen::Index row = static_cast<Eigen::Index>(c) * n_per_class + j;
      for (int k = 0; k < dim; ++k)
        ps.features(row, k) = centers(c, k) + noise_sigma * gauss(rng);
      ps.labels[static_cast<std::size_t>(row)] = c;
    }
  return ps;
}

// Class-uniform labeled subset: exactly n_labeled_per_class random rows per
// class stay labeled, the rest become the unlabeled split with labels
// stripped. No row is duplicated or dropped.
inline SslDataset split_labeled(const PointSet& data, int n_labeled_per_class,
                                std::uint64_t seed) {
  if (!data.has_labels()) throw std::invalid_argument("split_labeled: data has no labels");
  if (n_labeled_per_class < 1)
    throw std::invalid_argument("split_labeled: n_labeled_per_class must be >= 1");

  std::vector<std::vector<Eigen::Index>> by_class(data.class_count);
  for (Eigen::Index i = 0; i < data.size(); ++i)
    by_class[static_cast<std::size_t>(data.labels[static_cast<std::size_t>(i)])].push_back(i);
  for (int c = 0; c < data.class_count; ++c)
    if (by_class[c].size() < static_cast<std::size_t>(n_labeled_per_class))
      throw std::invalid_argument("split_labeled: class " + std::to_string(c) + " has only " +
                                  std::to_string(by_class[c].size()) + " rows, need " +
                                  std::to_string(n_labeled_per_class));

  std::mt19937_64 rng(derive_seed(seed, Stream::LabelSplit));
  std::vector<Eigen::Index> labeled_rows, unlabeled_rows;
  for (int c = 0; c < data.class_count; ++c) {
    std::shuffle(by_class[c].begin(), by_class[c].end(), rng);
    for (std::size_t j = 0; j < by_class[c].size(); ++j)
      (j < static_cast<std::size_t>(n_labeled_per_class) ? labeled_rows : unlabeled_rows)
          .push_back(by_class[c][j]);
  }

  SslDataset out;
  out.labeled.class_count = data.class_count;
  out.unlabeled.class_count = data.class_count;
  out.test.class_count = data.class_count;
  out.labeled.features.resize(static_cast<Eigen::Index>(labeled_rows.size()), data.features.cols());
  out.unlabeled.features.resize(static_cast<Eigen::Index>(unlabeled_rows.size()),
                                data.features.cols());
  for (std::size_t i = 0; i < labeled_rows.size(); ++i) {
    out.labeled.features.row(static_cast<Eigen::Index>(i)) = data.features.row(labeled_rows[i]);
    out.labeled.labels.push_back(data.labels[static_cast<std::size_t>(labeled_rows[i])]);
  }
  for (std::size_t i = 0; i < unlabeled_rows.size(); ++i)
    out.unlabeled.features.row(static_cast<Eigen::Index>(i)) =
        data.features.row(unlabeled_rows[i]);
  return out;
}

enum class CsvSchema { FeaturesOnly, TrailingLabel };

namespace detail {

inline bool parse_double(const std::string& cell, double& out) {
  const char* s = cell.c_str();
  char* end = nullptr;
  out = std::strtod(s, &end);
  if (end == s) return false;
  while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
  return *end == '\0';
}

inline std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    cells.push_back(line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return cells;
}

}  // namespace detail

inline PointSet load_csv(const std::string& path, CsvSchema schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open csv: " + path);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  int line_no = 0;
  std::size_t width = 0;
  bool first_content_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = detail::split_cells(line);
    std::vector<double> parsed(cells.size());
    bool all_numeric = true;
    std::size_t bad_cell = 0;
    for (std::size_t j = 0; j < cells.size(); ++j)
      if (!detail::parse_double(cells[j], parsed[j])) {
        all_numeric = false;
        bad_cell = j;
        break;
      }
    if (!all_numeric) {
      if (first_content_row) {  // header row
        first_content_row = false;
        width = cells.size();
        continue;
      }
      throw std::runtime_error(path + ": non-numeric cell '" + cells[bad_cell] + "' at line " +
                               std::to_string(line_no));
    }
    if (first_content_row) {
      first_content_row = false;
      width = cells.size();
    } else if (cells.size() != width) {
      throw std::runtime_error(path + ": ragged row at line " + std::to_string(line_no) +
                               " (expected " + std::to_string(width) + " cells, got " +
                               std::to_string(cells.size()) + ")");
    }
    if (schema == CsvSchema::TrailingLabel) {
      if (parsed.size() < 2)
        throw std::runtime_error(path + ": need at least one feature plus label at line " +
                                 std::to_string(line_no));
      const double raw = parsed.back();
      if (raw != std::floor(raw) || raw < 0)
        throw std::runtime_error(path + ": label is not a nonnegative integer at line " +
                                 std::to_string(line_no));
      labels.push_back(static_cast<int>(raw));
      parsed.pop_back();
    }
    rows.push_back(std::move(parsed));
  }
  if (rows.empty()) throw std::runtime_error(path + ": no data rows");

  PointSet ps;
  ps.features.resize(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      ps.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  ps.labels = std::move(labels);
  if (ps.has_labels())
    ps.class_count = *std::max_element(ps.labels.begin(), ps.labels.end()) + 1;
  return ps;
}

inline void save_csv(const PointSet& ps, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open csv for writing: " + path);
  for (Eigen::Index j = 0; j < ps.features.cols(); ++j) out << (j ? "," : "") << "x" << j;
  if (ps.has_labels()) out << ",label";
  out << "\n";
  char buf[40];
  for (Eigen::Index i = 0; i < ps.features.rows(); ++i) {
    for (Eigen::Index j = 0; j < ps.features.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", ps.features(i, j));
      out << (j ? "," : "") << buf;
    }
    if (ps.has_labels()) out << "," << ps.labels[static_cast<std::size_t>(i)];
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

enum class NormalizeMode { None, Standardize };

struct NormalizeTransform {
  Vector mean;
  Vector inv_std;               // 1/sqrt(max(var, 1e-12))
  std::vector<int> floored;     // features whose variance hit the floor
};

inline PointSet apply_transform(const NormalizeTransform& t, const PointSet& data) {
  if (t.mean.size() != data.features.cols())
    throw std::invalid_argument("apply_transform: feature width mismatch");
  PointSet out = data;
  for (Eigen::Index j = 0; j < out.features.cols(); ++j)
    out.features.col(j) = (out.features.col(j).array() - t.mean[j]) * t.inv_std[j];
  return out;
}

struct NormalizeResult {
  PointSet data;
  NormalizeTransform transform;
};

// Standardize maps each feature to zero mean and unit variance over this
// split (population variance). Variances below 1e-12 are floored and the
// feature index recorded.
inline NormalizeResult normalize(const PointSet& data, NormalizeMode mode) {
  NormalizeResult r;
  const Eigen::Index d = data.features.cols();
  r.transform.mean = Vector::Zero(d);
  r.transform.inv_std = Vector::Ones(d);
  if (mode == NormalizeMode::None) {
    r.data = data;
    return r;
  }
  if (data.size() < 1) throw std::invalid_argument("normalize: empty point set");
  for (Eigen::Index j = 0; j < d; ++j) {
    const double mean = data.features.col(j).mean();
    const double var = (data.features.col(j).array() - mean).square().mean();
    r.transform.mean[j] = mean;
    if (var < 1e-12) {
      r.transform.floored.push_back(static_cast<int>(j));
      r.transform.inv_std[j] = 1.0 / std::sqrt(1e-12);
    } else {
      r.transform.inv_std[j] = 1.0 / std::sqrt(var);
    }
  }
  r.data = apply_transform(r.transform, data);
  return r;
}

}  // namespace smoothnet
