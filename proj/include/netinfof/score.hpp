#pragma once

// NetInfoF_Score = 2^{-H(Y|X)} for discrete X (a bin or cluster id) and
// labels Y, plus the quantile discretizer and k-means used to make X
// discrete.

#include "netinfof/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace netinfof {

/// Co-occurrence counts, rows indexed by x and columns by y.
class JointCounts {
 public:
  JointCounts(Index rows, Index cols) : rows_(rows), cols_(cols), table_(rows * cols, 0) {
    if (rows < 1 || cols < 1) throw InputError("joint count table must be non-empty");
  }

  static JointCounts from_pairs(std::span<const int> x, std::span<const int> y, Index rows,
                                Index cols) {
    if (x.size() != y.size()) throw InputError("x and y must have equal length");
    JointCounts t(rows, cols);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] < 0 || x[i] >= rows || y[i] < 0 || y[i] >= cols)
        throw InputError("joint count index out of range");
      t.add(x[i], y[i]);
    }
    return t;
  }

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  std::int64_t operator()(Index x, Index y) const { return table_[x * cols_ + y]; }
  std::int64_t& operator()(Index x, Index y) { return table_[x * cols_ + y]; }
  void add(Index x, Index y, std::int64_t n = 1) { table_[x * cols_ + y] += n; }

  std::int64_t total() const {
    std::int64_t t = 0;
    for (auto v : table_) t += v;
    return t;
  }
  std::int64_t row_total(Index x) const {
    std::int64_t t = 0;
    for (Index y = 0; y < cols_; ++y) t += (*this)(x, y);
    return t;
  }

 private:
  Index rows_;
  Index cols_;
  std::vector<std::int64_t> table_;
};

/// H(Y|X) in bits from raw counts (plug-in estimator, 0 log 0 = 0).
inline double conditional_entropy(const JointCounts& t) {
  const std::int64_t n = t.total();
  if (n < 1) throw InputError("conditional entropy of an empty table");
  const double total = static_cast<double>(n);
  double h = 0.0;
  for (Index x = 0; x < t.rows(); ++x) {
    const auto nx = static_cast<double>(t.row_total(x));
    if (nx == 0.0) continue;
    for (Index y = 0; y < t.cols(); ++y) {
      const auto nxy = static_cast<double>(t(x, y));
      if (nxy > 0.0) h -= (nxy / total) * std::log2(nxy / nx);
    }
  }
  return std::max(h, 0.0);
}

/// sum_x max_y p(x, y): accuracy of predicting the majority label per x.
inline double accuracy_bound(const JointCounts& t) {
  const std::int64_t n = t.total();
  if (n < 1) throw InputError("accuracy bound of an empty table");
  std::int64_t hits = 0;
  for (Index x = 0; x < t.rows(); ++x) {
    std::int64_t best = 0;
    for (Index y = 0; y < t.cols(); ++y) best = std::max(best, t(x, y));
    hits += best;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

/// 2^{-H(Y|X)}. Never exceeds accuracy_bound; a violation means a bug and
/// throws std::logic_error.
inline double netinfof_score(const JointCounts& t) {
  const double score = std::exp2(-conditional_entropy(t));
  const double bound = accuracy_bound(t);
  if (score > bound + 1e-12) {
    throw std::logic_error("score " + std::to_string(score) + " exceeds accuracy bound " +
                           std::to_string(bound));
  }
  return score;
}

/// Shannon entropy of a marginal distribution given by counts, in bits.
inline double entropy(std::span<const std::int64_t> counts) {
  double n = 0.0;
  for (auto c : counts) n += static_cast<double>(c);
  if (n <= 0.0) throw InputError("entropy of an empty distribution");
  double h = 0.0;
  for (auto c : counts)
    if (c > 0) h -= (static_cast<double>(c) / n) * std::log2(static_cast<double>(c) / n);
  return std::max(h, 0.0);
}

/// Quantile bin edges (linear interpolation between order statistics at
/// position q (n - 1)). Values equal to an edge fall in the upper bin.
class Discretizer {
 public:
  Discretizer() = default;

  static Discretizer fit(std::span<const double> values, int k) {
    if (k < 1) throw InputError("discretizer needs k >= 1");
    if (values.empty()) throw InputError("discretizer needs at least one value");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    Discretizer d;
    d.k_ = k;
    const double last = static_cast<double>(sorted.size() - 1);
    for (int i = 1; i < k; ++i) {
      const double pos = last * static_cast<double>(i) / static_cast<double>(k);
      const auto lo = static_cast<std::size_t>(std::floor(pos));
      const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
      const double frac = pos - static_cast<double>(lo);
      const double edge = sorted[lo] + frac * (sorted[hi] - sorted[lo]);
      // Edges at the minimum would create an always-empty first bin.
      if (edge <= sorted.front()) continue;
      if (d.edges_.empty() || edge > d.edges_.back()) d.edges_.push_back(edge);
    }
    return d;
  }

  int transform(double v) const {
    return static_cast<int>(std::upper_bound(edges_.begin(), edges_.end(), v) - edges_.begin());
  }
  std::vector<int> transform(std::span<const double> values) const {
    std::vector<int> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = transform(values[i]);
    return out;
  }

  const std::vector<double>& edges() const noexcept { return edges_; }
  int requested_bins() const noexcept { return k_; }
  int effective_bins() const noexcept { return static_cast<int>(edges_.size()) + 1; }

 private:
  int k_ = 1;
  std::vector<double> edges_;
};

struct KMeansResult {
  Matrix centers;  // k x d
  std::vector<int> labels;
  std::vector<double> inertia_history;
  int iterations = 0;

  double inertia() const { return inertia_history.empty() ? 0.0 : inertia_history.back(); }
};

/// Index of the nearest center for every row.
inline std::vector<int> assign_clusters(const Matrix& rows, const Matrix& centers,
                                        double* inertia = nullptr) {
  const Vector center_sq = centers.rowwise().squaredNorm();
  const Matrix cross = rows * centers.transpose();
  std::vector<int> labels(static_cast<std::size_t>(rows.rows()));
  double total = 0.0;
  for (Index i = 0; i < rows.rows(); ++i) {
    const double row_sq = rows.row(i).squaredNorm();
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (Index c = 0; c < centers.rows(); ++c) {
      const double dist = std::max(0.0, row_sq - 2.0 * cross(i, c) + center_sq(c));
      if (dist < best) {
        best = dist;
        arg = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = arg;
    total += best;
  }
  if (inertia) *inertia = total;
  return labels;
}

/// k-means++ seeding followed by Lloyd iterations. Empty clusters are
/// re-seeded with the point farthest from its center.
inline KMeansResult kmeans(const Matrix& rows, int k, std::uint64_t seed, int max_iter = 300,
                           double tol = 1e-10) {
  const Index n = rows.rows();
  const Index d = rows.cols();
  if (k < 1) throw InputError("kmeans needs k >= 1");
  if (n < 1) throw InputError("kmeans needs at least one row");
  Rng rng = make_rng(seed, "kmeans");
  KMeansResult res;
  res.centers.resize(k, d);

  std::vector<double> closest(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  auto update_closest = [&](Index c) {
    for (Index i = 0; i < n; ++i)
      closest[i] = std::min(closest[i], (rows.row(i) - res.centers.row(c)).squaredNorm());
  };
  res.centers.row(0) = rows.row(static_cast<Index>(uniform_index(rng, static_cast<std::uint64_t>(n))));
  update_closest(0);
  for (int c = 1; c < k; ++c) {
    double sum = 0.0;
    for (double v : closest) sum += v;
    Index pick = 0;
    if (sum > 0.0) {
      double r = uniform_unit(rng) * sum;
      pick = n - 1;
      for (Index i = 0; i < n; ++i) {
        r -= closest[i];
        if (r < 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Index>(uniform_index(rng, static_cast<std::uint64_t>(n)));
    }
    res.centers.row(c) = rows.row(pick);
    update_closest(c);
  }

  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    double inertia = 0.0;
    res.labels = assign_clusters(rows, res.centers, &inertia);
    res.inertia_history.push_back(inertia);
    res.iterations = it + 1;
    if (prev - inertia <= tol * std::max(1.0, prev) && it > 0) break;
    prev = inertia;

    Matrix sums = Matrix::Zero(k, d);
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      sums.row(res.labels[i]) += rows.row(i);
      ++counts[res.labels[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        res.centers.row(c) = sums.row(c) / static_cast<double>(counts[c]);
        continue;
      }
      Index far = 0;
      double best = -1.0;
      for (Index i = 0; i < n; ++i) {
        const double dist = (rows.row(i) - res.centers.row(res.labels[i])).squaredNorm();
        if (dist > best) {
          best = dist;
          far = i;
        }
      }
      res.centers.row(c) = rows.row(far);
    }
  }
  return res;
}

}  // namespace netinfof
