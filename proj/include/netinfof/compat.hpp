#pragma once

// Compatibility matrices. H maps one endpoint's embedding onto the other's
// (multi-target ridge regression over edges); H* additionally pushes the
// adjusted similarity z_i H* z_j^T of sampled non-edges toward zero. H* is
// solved over the upper triangle selected by an energy criterion on H, warm
// started from H, on positives drawn from the 2-core of the training edges.

#include "netinfof/graph.hpp"
#include "netinfof/lsqr.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

namespace netinfof {

using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

enum class CompatKind { PlainH, NegativeAwareHStar, Identity };

inline std::string_view compat_kind_name(CompatKind k) {
  switch (k) {
    case CompatKind::PlainH: return "plain_H";
    case CompatKind::NegativeAwareHStar: return "negative_aware_Hstar";
    case CompatKind::Identity: return "identity";
  }
  return "unknown";
}

struct CompatMatrix {
  Matrix values;  // d x d
  Mask mask;      // active coefficients, upper triangle (a <= b)
  CompatKind kind = CompatKind::PlainH;
  double energy_kept = 1.0;
  bool converged = true;
  int iterations = 0;

  Index dim() const noexcept { return values.rows(); }
  Index active_count() const { return mask.count(); }
  double mask_density() const {
    const double d = static_cast<double>(dim());
    return d > 0 ? static_cast<double>(active_count()) / (d * (d + 1) / 2) : 0.0;
  }

  static CompatMatrix identity(Index d) {
    CompatMatrix c;
    c.values = Matrix::Identity(d, d);
    c.mask = Mask::Constant(d, d, false);
    c.mask.matrix().diagonal().setConstant(true);
    c.kind = CompatKind::Identity;
    return c;
  }
};

inline Mask full_upper_mask(Index d) {
  Mask m = Mask::Constant(d, d, false);
  for (Index b = 0; b < d; ++b)
    for (Index a = 0; a <= b; ++a) m(a, b) = true;
  return m;
}

namespace detail {

inline Matrix gather_endpoint(const Matrix& z, std::span<const Edge> edges, bool second) {
  Matrix out(static_cast<Index>(edges.size()), z.cols());
  for (std::size_t e = 0; e < edges.size(); ++e)
    out.row(static_cast<Index>(e)) = z.row(second ? edges[e].v : edges[e].u);
  return out;
}

}  // namespace detail

/// z_i H z_j^T.
inline double adjusted_similarity(const Eigen::Ref<const Eigen::RowVectorXd>& zi,
                                  const Eigen::Ref<const Eigen::RowVectorXd>& zj,
                                  const Matrix& h) {
  return (zi * h).dot(zj);
}

/// Adjusted similarity of every listed pair.
inline Vector adjusted_similarities(const Matrix& z, std::span<const Edge> edges, const Matrix& h) {
  const Matrix zu = detail::gather_endpoint(z, edges, false);
  const Matrix zv = detail::gather_endpoint(z, edges, true);
  return (zu * h).cwiseProduct(zv).rowwise().sum();
}

/// Ridge solution of min_H sum ||z_i H - z_j||^2 + ridge ||H||^2 with every
/// edge used in both orientations.
inline CompatMatrix estimate_H(const Matrix& z_hat, std::span<const Edge> edges, double ridge) {
  if (edges.empty()) throw InputError("estimate_H needs at least one edge");
  const Index d = z_hat.cols();
  const Matrix zu = detail::gather_endpoint(z_hat, edges, false);
  const Matrix zv = detail::gather_endpoint(z_hat, edges, true);
  Matrix gram = Matrix::Zero(d, d);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(zu.transpose());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(zv.transpose());
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  gram.diagonal().array() += ridge;
  const Matrix cross = zu.transpose() * zv;
  const Matrix rhs = cross + cross.transpose();
  CompatMatrix h;
  h.values = gram.ldlt().solve(rhs);
  h.mask = Mask::Constant(d, d, true);
  h.kind = CompatKind::PlainH;
  return h;
}

/// Upper-triangle coefficients of H to keep. Off-diagonal entries of the
/// symmetric part of H are sorted by magnitude and the shortest prefix
/// holding `energy` of their absolute mass is kept; nonzero diagonal entries
/// are always kept. Returns the mask and writes the kept off-diagonal mass
/// fraction to `kept_fraction` when given.
inline Mask select_coefficients(const Matrix& h, double energy, double* kept_fraction = nullptr) {
  if (!(energy > 0.0 && energy <= 1.0)) throw InputError("energy must lie in (0, 1]");
  const Index d = h.rows();
  const Matrix sym = 0.5 * (h + h.transpose());
  Mask mask = Mask::Constant(d, d, false);
  for (Index a = 0; a < d; ++a) mask(a, a) = sym(a, a) != 0.0;

  struct Entry {
    double mag;
    Index a, b;
  };
  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(d * (d - 1) / 2));
  double total = 0.0;
  for (Index b = 0; b < d; ++b)
    for (Index a = 0; a < b; ++a) {
      const double m = std::abs(sym(a, b));
      entries.push_back({m, a, b});
      total += m;
    }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& x, const Entry& y) { return x.mag > y.mag; });
  double kept = 0.0;
  const double target = energy * total;
  for (const Entry& e : entries) {
    if (kept >= target || e.mag == 0.0) break;
    mask(e.a, e.b) = true;
    kept += e.mag;
  }
  if (kept_fraction) *kept_fraction = total > 0 ? kept / total : 1.0;
  return mask;
}

/// Training pairs for H*: positives from the 2-core of the training edges
/// (all training edges when the core is too small), capped at S, and twice as
/// many sampled non-edges.
struct EdgeSample {
  EdgeList core;  // edges H is estimated on
  EdgeList pos;   // at most S of `core`
  EdgeList neg;   // 2 |pos| non-edges, fewer when the graph runs out
  std::uint64_t seed = 0;
  bool used_fallback = false;
  std::vector<std::string> warnings;
};

inline EdgeSample sample_edges_for_compat(const SparseGraph& g, std::span<const Edge> train_edges,
                                          std::size_t sample_size, std::uint64_t seed,
                                          std::size_t min_core_edges = 1) {
  EdgeSample s;
  s.seed = seed;
  s.core = two_core(train_edges);
  if (s.core.size() < std::max<std::size_t>(1, min_core_edges)) {
    s.used_fallback = true;
    s.core.clear();
    for (const Edge& e : train_edges) s.core.push_back(Edge::canonical(e.u, e.v));
    s.warnings.push_back("2-core has too few edges; using all " +
                         std::to_string(s.core.size()) + " training edges");
  }
  Rng rng = make_rng(seed, "compat-sample");
  s.pos = s.core;
  if (s.pos.size() > sample_size) {
    for (std::size_t i = 0; i < sample_size; ++i)
      std::swap(s.pos[i], s.pos[i + uniform_index(rng, s.pos.size() - i)]);
    s.pos.resize(sample_size);
  }
  std::unordered_set<std::uint64_t> taken;
  s.neg = sample_non_edges(g, 2 * s.pos.size(), rng, taken, /*allow_short=*/true);
  if (s.neg.size() < 2 * s.pos.size()) {
    s.warnings.push_back("only " + std::to_string(s.neg.size()) + " of " +
                         std::to_string(2 * s.pos.size()) + " negative pairs available");
  }
  return s;
}

/// Regression for H*: one equation per sampled pair with target 1 (positive)
/// or 0 (negative), unknowns are the active upper-triangle coefficients.
/// Negative rows are scaled by sqrt(neg_weight).
inline CompatMatrix estimate_H_star(const Matrix& z_hat, const EdgeSample& sample,
                                    const CompatMatrix& warm, const Mask& mask, double ridge,
                                    int max_iter, double tol, double neg_weight = 1.0) {
  const Index d = z_hat.cols();
  std::vector<std::pair<Index, Index>> active;
  for (Index b = 0; b < d; ++b)
    for (Index a = 0; a <= b; ++a)
      if (mask(a, b)) active.emplace_back(a, b);

  EdgeList pairs = sample.pos;
  pairs.insert(pairs.end(), sample.neg.begin(), sample.neg.end());
  const auto m = static_cast<Index>(pairs.size());
  const auto n_pos = static_cast<Index>(sample.pos.size());
  Matrix zs = detail::gather_endpoint(z_hat, pairs, false);
  const Matrix zd = detail::gather_endpoint(z_hat, pairs, true);
  Vector target = Vector::Zero(m);
  target.head(n_pos).setOnes();
  if (neg_weight != 1.0) zs.bottomRows(m - n_pos) *= std::sqrt(neg_weight);

  auto to_matrix = [&](const Vector& x, Matrix& c) {
    c.setZero(d, d);
    for (std::size_t k = 0; k < active.size(); ++k) {
      const auto [a, b] = active[k];
      c(a, b) = x(static_cast<Index>(k));
      c(b, a) = x(static_cast<Index>(k));
    }
  };
  // Buffers reused across iterations; the products are m x d.
  Matrix coef(d, d);
  Matrix prod(m, d);
  Matrix gram(d, d);
  auto apply_a = [&](const Vector& x) -> Vector {
    to_matrix(x, coef);
    prod.noalias() = zs * coef;
    return prod.cwiseProduct(zd).rowwise().sum();
  };
  auto apply_at = [&](const Vector& y) -> Vector {
    prod = zd.array().colwise() * y.array();
    gram.noalias() = zs.transpose() * prod;
    Vector out(static_cast<Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) {
      const auto [a, b] = active[k];
      out(static_cast<Index>(k)) = a == b ? gram(a, a) : gram(a, b) + gram(b, a);
    }
    return out;
  };

  Vector x0(static_cast<Index>(active.size()));
  for (std::size_t k = 0; k < active.size(); ++k) {
    const auto [a, b] = active[k];
    x0(static_cast<Index>(k)) = 0.5 * (warm.values(a, b) + warm.values(b, a));
  }
  const LsqrResult sol = lsqr(apply_a, apply_at, target, x0, std::sqrt(ridge), max_iter, tol);

  CompatMatrix h;
  to_matrix(sol.x, h.values);
  h.mask = mask;
  h.kind = CompatKind::NegativeAwareHStar;
  h.converged = sol.converged;
  h.iterations = sol.iterations;
  return h;
}

struct CompatConfig {
  std::size_t sample_size = 200000;  // S
  double energy = 0.95;
  double ridge = 1e-6;
  int max_iter = 100;
  double tol = 1e-8;
  double neg_weight = 1.0;
};

struct CompatEstimate {
  CompatMatrix h;
  CompatMatrix h_star;
  EdgeSample sample;
};

/// Full estimation chain for one preprocessed component: 2-core sample, H on
/// the core, coefficient selection, H* warm started from H.
inline CompatEstimate estimate_compatibility(const Matrix& z_hat, const SparseGraph& g,
                                             std::span<const Edge> train_edges,
                                             const CompatConfig& cfg, std::uint64_t seed) {
  const auto d = static_cast<std::size_t>(z_hat.cols());
  const std::size_t n_coef = d * (d + 1) / 2;
  CompatEstimate out;
  out.sample = sample_edges_for_compat(g, train_edges, cfg.sample_size, seed, n_coef);
  if (cfg.sample_size < 20 * n_coef) {
    out.sample.warnings.push_back("sample size " + std::to_string(cfg.sample_size) +
                                  " is below 20 d(d+1)/2 = " + std::to_string(20 * n_coef));
  }
  out.h = estimate_H(z_hat, out.sample.core, cfg.ridge);
  double kept = 1.0;
  const Mask mask = select_coefficients(out.h.values, cfg.energy, &kept);
  out.h_star = estimate_H_star(z_hat, out.sample, out.h, mask, cfg.ridge, cfg.max_iter, cfg.tol,
                               cfg.neg_weight);
  out.h_star.energy_kept = kept;
  return out;
}

}  // namespace netinfof
