#pragma once

// NetInfoF_Act: concatenated component features, logistic regression with a
// sparse-group LASSO penalty trained by full-batch proximal gradient, and the
// Hits@K / accuracy metrics.

#include "netinfof/probe.hpp"

#include <functional>
#include <limits>

namespace netinfof {

// ---------------------------------------------------------------- features

/// (z_i H) ⊙ z_j for one component.
inline Eigen::RowVectorXd lp_block(const Matrix& z_hat, const Matrix& h, const Edge& e) {
  return (z_hat.row(e.u) * h).cwiseProduct(z_hat.row(e.v));
}

/// Link feature of one pair: the per-component blocks in U, R, F, P, S order.
inline Eigen::RowVectorXd build_lp_features(std::span<const Matrix> z_hats,
                                            std::span<const Matrix> compat, const Edge& e) {
  if (z_hats.size() != compat.size()) throw InputError("one compatibility matrix per component");
  Index width = 0;
  for (const Matrix& z : z_hats) width += z.cols();
  Eigen::RowVectorXd out(width);
  Index off = 0;
  for (std::size_t c = 0; c < z_hats.size(); ++c) {
    const Index d = z_hats[c].cols();
    out.segment(off, d) = lp_block(z_hats[c], compat[c], e);
    off += d;
  }
  return out;
}

/// Batched link features. Each component's z H is computed once per node, so
/// a pair costs O(width).
class LinkFeatureBuilder {
 public:
  LinkFeatureBuilder() = default;
  LinkFeatureBuilder(std::span<const Matrix> z_hats, std::span<const Matrix> compat) {
    if (z_hats.size() != compat.size()) throw InputError("one compatibility matrix per component");
    if (z_hats.empty()) return;
    const Index n = z_hats[0].rows();
    for (const Matrix& z : z_hats) width_ += z.cols();
    left_.resize(n, width_);
    right_.resize(n, width_);
    Index off = 0;
    for (std::size_t c = 0; c < z_hats.size(); ++c) {
      const Index d = z_hats[c].cols();
      left_.middleCols(off, d) = z_hats[c] * compat[c];
      right_.middleCols(off, d) = z_hats[c];
      off += d;
    }
  }

  Index width() const noexcept { return width_; }

  Matrix build(std::span<const Edge> pairs) const {
    RowMatrix out(static_cast<Index>(pairs.size()), width_);
    for (std::size_t p = 0; p < pairs.size(); ++p)
      out.row(static_cast<Index>(p)) = left_.row(pairs[p].u).cwiseProduct(right_.row(pairs[p].v));
    return out;
  }

 private:
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMatrix left_;
  RowMatrix right_;
  Index width_ = 0;
};

/// l(U) ⊕ l(R) ⊕ l(F) ⊕ l(P) ⊕ l(S) for every node.
inline Matrix build_nc_features(const EmbeddingSet& emb,
                                std::span<const Component> comps = kAllComponents) {
  Index width = 0;
  for (Component c : comps) width += emb[c].cols();
  Matrix out(emb.num_nodes(), width);
  Index off = 0;
  for (Component c : comps) {
    out.middleCols(off, emb[c].cols()) = l2_normalize_columns(emb[c]);
    off += emb[c].cols();
  }
  return out;
}

inline Matrix take_rows(const Matrix& m, std::span<const NodeId> ids) {
  Matrix out(static_cast<Index>(ids.size()), m.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) out.row(static_cast<Index>(i)) = m.row(ids[i]);
  return out;
}

// ---------------------------------------------------------------- penalty

struct FeatureGroup {
  Index start = 0;
  Index size = 0;
};

inline std::vector<FeatureGroup> equal_groups(Index width, Index group_size) {
  if (group_size < 1 || width % group_size != 0)
    throw InputError("feature width must be a multiple of the group size");
  std::vector<FeatureGroup> g;
  for (Index s = 0; s < width; s += group_size) g.push_back({s, group_size});
  return g;
}

/// wd1 sum|w| + wd2 sum_g sqrt(|g|) ||w_g||, |g| counting every coefficient
/// in the group's rows.
inline double sgl_penalty(const Matrix& w, std::span<const FeatureGroup> groups, double wd1,
                          double wd2) {
  double p = wd1 * w.cwiseAbs().sum();
  if (wd2 != 0.0) {
    for (const FeatureGroup& g : groups) {
      const auto blk = w.middleRows(g.start, g.size);
      p += wd2 * std::sqrt(static_cast<double>(blk.size())) * blk.norm();
    }
  }
  return p;
}

/// prox of step * penalty: elementwise soft-threshold, then group shrinkage.
inline Matrix sgl_prox(Matrix w, std::span<const FeatureGroup> groups, double wd1, double wd2,
                       double step) {
  const double t1 = step * wd1;
  if (t1 > 0.0) w = w.unaryExpr([t1](double v) { return std::copysign(std::max(std::abs(v) - t1, 0.0), v); });
  if (wd2 > 0.0) {
    for (const FeatureGroup& g : groups) {
      auto blk = w.middleRows(g.start, g.size);
      const double norm = blk.norm();
      const double t2 = step * wd2 * std::sqrt(static_cast<double>(blk.size()));
      if (norm <= t2) blk.setZero();
      else blk *= 1.0 - t2 / norm;
    }
  }
  return w;
}

// ---------------------------------------------------------------- model

/// Logistic regression. Binary tasks use one output column (the log-odds of
/// label 1); c > 2 classes use c softmax columns. Weights act on features
/// centered by feature_mean and divided by feature_scale (both empty when
/// standardization is off).
struct LinearModel {
  Matrix weights;  // p x outputs
  Eigen::RowVectorXd bias;
  Eigen::RowVectorXd feature_mean;
  Eigen::RowVectorXd feature_scale;
  std::vector<FeatureGroup> groups;
  int num_classes = 2;

  Index num_features() const { return weights.rows(); }
  Index num_outputs() const { return weights.cols(); }

  /// Weights and bias acting on raw features.
  std::pair<Matrix, Eigen::RowVectorXd> raw_weights() const {
    if (feature_scale.size() == 0) return {weights, bias};
    Matrix w = weights.array().colwise() / feature_scale.transpose().array();
    Eigen::RowVectorXd b = bias - feature_mean * w;
    return {std::move(w), std::move(b)};
  }
  /// Logits (binary: n x 1).
  Matrix decision(const Matrix& x) const {
    const auto [w, b] = raw_weights();
    return (x * w).rowwise() + b;
  }
  Vector scores(const Matrix& x) const { return decision(x).col(0); }
  std::vector<int> predict(const Matrix& x) const {
    const Matrix z = decision(x);
    std::vector<int> out(static_cast<std::size_t>(z.rows()));
    for (Index i = 0; i < z.rows(); ++i) {
      if (z.cols() == 1) {
        out[static_cast<std::size_t>(i)] = z(i, 0) > 0.0 ? 1 : 0;
      } else {
        Index arg = 0;
        z.row(i).maxCoeff(&arg);
        out[static_cast<std::size_t>(i)] = static_cast<int>(arg);
      }
    }
    return out;
  }
  std::vector<double> group_norms() const {
    std::vector<double> n;
    for (const FeatureGroup& g : groups) n.push_back(weights.middleRows(g.start, g.size).norm());
    return n;
  }
};

namespace detail {

inline double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }
inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// Mean loss from logits; fills d loss / d logits (times n) when given.
template <class Logits>
double loss_from_logits(const Logits& z, std::span<const int> y, Matrix* resid) {
  const Index n = z.rows();
  double loss = 0.0;
  if (resid) resid->resize(n, z.cols());
  if (z.cols() == 1) {
    for (Index i = 0; i < n; ++i) {
      const double yi = y[static_cast<std::size_t>(i)];
      loss += softplus(z(i, 0)) - yi * z(i, 0);
      if (resid) (*resid)(i, 0) = sigmoid(z(i, 0)) - yi;
    }
  } else {
    for (Index i = 0; i < n; ++i) {
      const double m = z.row(i).maxCoeff();
      const Eigen::RowVectorXd e = (z.row(i).array() - m).exp().matrix();
      const double s = e.sum();
      const int yi = y[static_cast<std::size_t>(i)];
      loss += m + std::log(s) - z(i, yi);
      if (resid) {
        resid->row(i) = e / s;
        (*resid)(i, yi) -= 1.0;
      }
    }
  }
  return loss / static_cast<double>(n);
}

}  // namespace detail

/// Mean logistic (binary, one column) or softmax cross-entropy loss of
/// logits x w + b. Writes the gradients of w and b when requested.
inline double logistic_loss(const Matrix& x, std::span<const int> y, const Matrix& w,
                            const Eigen::RowVectorXd& b, Matrix* grad_w = nullptr,
                            Eigen::RowVectorXd* grad_b = nullptr) {
  const Index n = x.rows();
  if (n == 0) throw InputError("loss over an empty batch");
  if (static_cast<std::size_t>(n) != y.size()) throw InputError("feature and target counts differ");
  const Matrix z = (x * w).rowwise() + b;
  Matrix resid;
  const double loss = detail::loss_from_logits(z, y, grad_w || grad_b ? &resid : nullptr);
  const double inv_n = 1.0 / static_cast<double>(n);
  if (grad_w) *grad_w = x.transpose() * resid * inv_n;
  if (grad_b) *grad_b = resid.colwise().sum() * inv_n;
  return loss;
}

struct TrainConfig {
  double lr = 0.1;
  double wd1 = 1e-4;
  double wd2 = 1e-4;
  int epochs = 100;
  int inner_steps = 1;  // proximal steps per epoch on the same batch
  int patience = 5;
  std::uint64_t seed = 0;
  bool negative_resampling = true;
  bool standardize = true;  // center and scale features on the first batch
  int max_backtracks = 40;
};

struct TrainResult {
  LinearModel model;
  std::vector<double> objective;     // loss + penalty after each epoch, on that epoch's batch
  std::vector<double> valid_metric;  // starting point, then per epoch, when a metric is given
  int best_epoch = 0;                // epochs completed by the kept model (0: starting point)
  int epochs_run = 0;
  bool early_stopped = false;
};

/// Called before every epoch after the first; may replace rows of x / y
/// (e.g. fresh negatives). Must keep the shape.
using BatchRefresh = std::function<void(int epoch, Matrix& x, std::vector<int>& y)>;
using ValidationMetric = std::function<double(const LinearModel&)>;

/// Starting weights and bias in raw feature space.
struct InitialWeights {
  Matrix weights;  // p x outputs
  Eigen::RowVectorXd bias;
};

/// Trains one model per config on a shared batch. Each model takes full-batch
/// proximal gradient steps with backtracking: the step starts at lr and
/// halves until the quadratic upper bound holds, so the objective never
/// increases on a fixed batch. Early stopping keeps each model's best
/// validation state, the starting point included. Models advance in lockstep
/// so every epoch reads the batch once for all of them. Without `init` the
/// weights start at zero and the bias at the log prior.
inline std::vector<TrainResult> train_many(Matrix x, std::vector<int> y, int num_classes,
                                           const std::vector<FeatureGroup>& groups,
                                           std::span<const TrainConfig> cfgs,
                                           const ValidationMetric& metric = {},
                                           const BatchRefresh& refresh = {},
                                           const InitialWeights* init = nullptr) {
  if (cfgs.empty()) return {};
  for (const TrainConfig& c : cfgs)
    if (!(c.lr > 0.0) || c.wd1 < 0.0 || c.wd2 < 0.0 || c.epochs < 1 || c.inner_steps < 1)
      throw InputError("train needs lr > 0, epochs >= 1, inner_steps >= 1 and non-negative penalties");
  if (static_cast<std::size_t>(x.rows()) != y.size()) throw InputError("feature and target counts differ");
  if (x.rows() == 0) throw InputError("train needs at least one row");
  if (num_classes < 2) throw InputError("train needs at least two classes");
  for (int v : y)
    if (v < 0 || v >= num_classes) throw InputError("target label out of range");
  for (const FeatureGroup& g : groups)
    if (g.start < 0 || g.size < 0 || g.start + g.size > x.cols()) throw InputError("feature group out of range");
  const Index p = x.cols();
  const Index k = num_classes == 2 ? 1 : num_classes;

  LinearModel base;
  base.num_classes = num_classes;
  base.groups = groups;
  base.weights = Matrix::Zero(p, k);
  if (cfgs[0].standardize) {
    base.feature_mean = x.colwise().mean();
    base.feature_scale =
        ((x.rowwise() - base.feature_mean).colwise().squaredNorm() / static_cast<double>(x.rows()))
            .cwiseSqrt();
    for (Index j = 0; j < p; ++j)
      if (!(base.feature_scale(j) > 1e-12)) base.feature_scale(j) = 1.0;
  }
  // Bias starts at the log prior, so a model without usable features already
  // predicts the class frequencies.
  {
    std::vector<double> freq(static_cast<std::size_t>(num_classes), 0.0);
    for (int v : y) freq[static_cast<std::size_t>(v)] += 1.0;
    base.bias = Eigen::RowVectorXd::Zero(k);
    const double eps = 1e-12;
    if (k == 1) {
      base.bias(0) = std::log((freq[1] + eps) / (freq[0] + eps));
    } else {
      for (Index c = 0; c < k; ++c) base.bias(c) = std::log(freq[static_cast<std::size_t>(c)] + eps);
      base.bias.array() -= base.bias.mean();
    }
  }

  if (init) {
    if (init->weights.rows() != p || init->weights.cols() != k || init->bias.size() != k)
      throw InputError("initial weights have the wrong shape");
    base.weights = init->weights;
    base.bias = init->bias;
    if (cfgs[0].standardize) {
      base.bias += base.feature_mean * init->weights;
      base.weights.array().colwise() *= base.feature_scale.transpose().array();
    }
  }

  struct State {
    LinearModel model;
    double step = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    int since_best = 0;
    bool done = false;
    Matrix grad_w;
    Eigen::RowVectorXd grad_b;
    double f0 = 0.0;
    LinearModel trial;
    LinearModel anchor;  // extrapolated point the step is taken from
    Matrix prev_w;
    Eigen::RowVectorXd prev_b;
    double t = 1.0;
    bool momentum = false;
    double obj = 0.0;
  };
  std::vector<State> st(cfgs.size());
  std::vector<TrainResult> res(cfgs.size());
  const double start_metric = metric ? metric(base) : 0.0;
  for (std::size_t m = 0; m < cfgs.size(); ++m) {
    st[m].model = base;
    st[m].step = cfgs[m].lr;
    res[m].model = base;
    if (metric) {
      st[m].best = start_metric;
      res[m].valid_metric.push_back(start_metric);
    }
  }
  const bool standardized = base.feature_scale.size() > 0;
  const double inv_n = 1.0 / static_cast<double>(x.rows());

  // Logits of several models at once: one pass over x.
  auto stacked_logits = [&](const std::vector<const LinearModel*>& models) {
    Matrix w(p, static_cast<Index>(models.size()) * k);
    Eigen::RowVectorXd b(w.cols());
    for (std::size_t i = 0; i < models.size(); ++i) {
      auto [wr, br] = models[i]->raw_weights();
      w.middleCols(static_cast<Index>(i) * k, k) = wr;
      b.segment(static_cast<Index>(i) * k, k) = br;
    }
    Matrix z = x * w;
    z.rowwise() += b;
    return z;
  };

  int max_epochs = 0;
  for (const TrainConfig& c : cfgs) max_epochs = std::max(max_epochs, c.epochs);
  for (int epoch = 0; epoch < max_epochs; ++epoch) {
    std::vector<std::size_t> active;
    for (std::size_t m = 0; m < cfgs.size(); ++m)
      if (!st[m].done && epoch < cfgs[m].epochs) active.push_back(m);
    if (active.empty()) break;
    if (epoch > 0 && refresh) refresh(epoch, x, y);
    for (std::size_t m : active) {
      st[m].prev_w = st[m].model.weights;
      st[m].prev_b = st[m].model.bias;
      st[m].t = 1.0;
    }

    // Accelerated proximal steps from an extrapolated point; a step that
    // raises the objective is discarded and the momentum restarted.
    for (int inner = 0;; ++inner) {
      // Loss and gradient of every model still stepping.
      std::vector<std::size_t> stepping;
      for (std::size_t m : active)
        if (inner < cfgs[m].inner_steps) stepping.push_back(m);
      if (stepping.empty()) break;
      std::vector<const LinearModel*> cur;
      for (std::size_t m : stepping) {
        State& s = st[m];
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * s.t * s.t));
        const double beta = (s.t - 1.0) / t_next;
        s.momentum = beta > 0.0;
        s.anchor = s.model;
        if (s.momentum) {
          s.anchor.weights += beta * (s.model.weights - s.prev_w);
          s.anchor.bias += beta * (s.model.bias - s.prev_b);
        }
        cur.push_back(&s.anchor);
      }
      const Matrix z = stacked_logits(cur);
      Matrix resid_all(x.rows(), static_cast<Index>(stepping.size()) * k);
      for (std::size_t i = 0; i < stepping.size(); ++i) {
        Matrix resid;
        State& s = st[stepping[i]];
        s.f0 = detail::loss_from_logits(z.middleCols(static_cast<Index>(i) * k, k), y, &resid);
        if (!std::isfinite(s.f0))
          throw NumericalError("training loss is not finite at epoch " + std::to_string(epoch));
        const TrainConfig& c = cfgs[stepping[i]];
        if (inner == 0) s.obj = s.f0 + sgl_penalty(s.model.weights, groups, c.wd1, c.wd2);
        resid_all.middleCols(static_cast<Index>(i) * k, k) = resid;
      }
      const Matrix g_raw = x.transpose() * resid_all * inv_n;
      const Eigen::RowVectorXd r_sum = resid_all.colwise().sum() * inv_n;
      for (std::size_t i = 0; i < stepping.size(); ++i) {
        State& s = st[stepping[i]];
        Matrix gw = g_raw.middleCols(static_cast<Index>(i) * k, k);
        const Eigen::RowVectorXd gb = r_sum.segment(static_cast<Index>(i) * k, k);
        if (standardized) {
          gw -= base.feature_mean.transpose() * gb;
          gw.array().colwise() /= base.feature_scale.transpose().array();
        }
        s.grad_w = std::move(gw);
        s.grad_b = gb;
      }

      // Backtracking, batched over the models still searching.
      std::vector<std::size_t> pending = stepping;
      for (int tries = 0; !pending.empty(); ++tries) {
        std::vector<const LinearModel*> trials;
        for (std::size_t m : pending) {
          State& s = st[m];
          s.trial = s.anchor;
          s.trial.weights = sgl_prox(s.anchor.weights - s.step * s.grad_w, groups, cfgs[m].wd1,
                                     cfgs[m].wd2, s.step);
          s.trial.bias = s.anchor.bias - s.step * s.grad_b;
          trials.push_back(&s.trial);
        }
        const Matrix zt = stacked_logits(trials);
        std::vector<std::size_t> retry;
        for (std::size_t i = 0; i < pending.size(); ++i) {
          const std::size_t m = pending[i];
          State& s = st[m];
          const double f1 = detail::loss_from_logits(zt.middleCols(static_cast<Index>(i) * k, k), y, nullptr);
          const Matrix dw = s.trial.weights - s.anchor.weights;
          const Eigen::RowVectorXd db = s.trial.bias - s.anchor.bias;
          const double lin = dw.cwiseProduct(s.grad_w).sum() + db.dot(s.grad_b);
          const double quad = (dw.squaredNorm() + db.squaredNorm()) / (2.0 * s.step);
          if (std::isfinite(f1) && f1 <= s.f0 + lin + quad + 1e-15 * std::abs(s.f0)) {
            const double obj = f1 + sgl_penalty(s.trial.weights, groups, cfgs[m].wd1, cfgs[m].wd2);
            s.prev_w = s.model.weights;
            s.prev_b = s.model.bias;
            if (s.momentum && obj > s.obj) {
              s.t = 1.0;
            } else {
              s.model.weights = std::move(s.trial.weights);
              s.model.bias = std::move(s.trial.bias);
              s.t = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * s.t * s.t));
              s.obj = obj;
            }
            if (inner + 1 == cfgs[m].inner_steps) res[m].objective.push_back(s.obj);
          } else {
            if (tries >= cfgs[m].max_backtracks)
              throw NumericalError("line search failed at epoch " + std::to_string(epoch));
            s.step *= 0.5;
            retry.push_back(m);
          }
        }
        pending = std::move(retry);
      }
    }

    for (std::size_t m : active) {
      State& s = st[m];
      TrainResult& r = res[m];
      r.epochs_run = epoch + 1;
      if (!metric) {
        r.model = s.model;
        r.best_epoch = epoch + 1;
        continue;
      }
      const double v = metric(s.model);
      r.valid_metric.push_back(v);
      if (v > s.best) {
        s.best = v;
        s.since_best = 0;
        r.model = s.model;
        r.best_epoch = epoch + 1;
      } else if (++s.since_best >= cfgs[m].patience) {
        r.early_stopped = true;
        s.done = true;
      }
    }
  }
  return res;
}

inline TrainResult train(Matrix x, std::vector<int> y, int num_classes,
                         const std::vector<FeatureGroup>& groups, const TrainConfig& cfg,
                         const ValidationMetric& metric = {}, const BatchRefresh& refresh = {},
                         const InitialWeights* init = nullptr) {
  return std::move(train_many(std::move(x), std::move(y), num_classes, groups,
                              std::span<const TrainConfig>(&cfg, 1), metric, refresh, init)[0]);
}

/// Binary logistic regression on a few dense columns by damped Newton steps.
/// Returns the column coefficients followed by the intercept.
inline Vector newton_logistic(const Matrix& s, std::span<const int> y, double ridge = 1e-8,
                              int max_iter = 50) {
  const Index n = s.rows();
  if (n == 0 || static_cast<std::size_t>(n) != y.size()) throw InputError("newton_logistic: bad shapes");
  Matrix a(n, s.cols() + 1);
  a << s, Vector::Ones(n);
  const Index q = a.cols();
  Eigen::Map<const Eigen::VectorXi> yi(y.data(), n);
  const Vector yd = yi.cast<double>();
  auto objective = [&](const Vector& th) {
    const Vector z = a * th;
    double f = 0.0;
    for (Index i = 0; i < n; ++i) f += detail::softplus(z(i)) - yd(i) * z(i);
    return f / static_cast<double>(n) + 0.5 * ridge * th.head(q - 1).squaredNorm();
  };
  Vector th = Vector::Zero(q);
  double f = objective(th);
  for (int it = 0; it < max_iter; ++it) {
    const Vector z = a * th;
    Vector p(n);
    Vector w(n);
    for (Index i = 0; i < n; ++i) {
      p(i) = detail::sigmoid(z(i));
      w(i) = p(i) * (1.0 - p(i));
    }
    Vector g = a.transpose() * (p - yd) / static_cast<double>(n);
    Matrix h = a.transpose() * w.asDiagonal() * a / static_cast<double>(n);
    g.head(q - 1) += ridge * th.head(q - 1);
    h.diagonal().head(q - 1).array() += ridge;
    h.diagonal().array() += 1e-12;
    const Vector step = h.ldlt().solve(g);
    double t = 1.0;
    double f_new = objective(th - step);
    while (!(f_new <= f) && t > 1e-10) {
      t *= 0.5;
      f_new = objective(th - t * step);
    }
    if (!(f_new <= f)) break;
    th -= t * step;
    const double gain = f - f_new;
    f = f_new;
    if (gain <= 1e-14 * std::max(1.0, f)) break;
  }
  return th;
}

// ---------------------------------------------------------------- metrics

/// Fraction of positives scoring strictly above the K-th largest negative.
inline double hits_at_k(std::span<const double> pos, std::span<const double> neg, std::size_t k) {
  if (k < 1) throw InputError("hits_at_k needs K >= 1");
  if (neg.size() < k) throw InputError("hits_at_k needs at least K negative scores");
  if (pos.empty()) throw InputError("hits_at_k needs at least one positive score");
  std::vector<double> n(neg.begin(), neg.end());
  std::nth_element(n.begin(), n.begin() + static_cast<std::ptrdiff_t>(k - 1), n.end(),
                   std::greater<>());
  const double threshold = n[k - 1];
  std::size_t hits = 0;
  for (double s : pos) hits += s > threshold ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(pos.size());
}

inline double hits_at_k(const Vector& pos, const Vector& neg, std::size_t k) {
  return hits_at_k(std::span<const double>(pos.data(), static_cast<std::size_t>(pos.size())),
                   std::span<const double>(neg.data(), static_cast<std::size_t>(neg.size())), k);
}

inline double accuracy(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size()) throw InputError("prediction and label counts differ");
  if (pred.empty()) throw InputError("accuracy of an empty set");
  std::size_t ok = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) ok += pred[i] == truth[i] ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(pred.size());
}

// ---------------------------------------------------------------- pipelines

struct GridCell {
  double wd1 = 0.0;
  double wd2 = 0.0;
  double valid = 0.0;
  double test = 0.0;
  int best_epoch = 0;
  int epochs_run = 0;
};

struct ActConfig {
  TrainConfig train;
  std::vector<double> wd1_grid{1e-4, 1e-5};
  std::vector<double> wd2_grid{1e-3, 1e-4, 1e-5, 1e-6};
  std::size_t hits_k = 100;
  /// Proximal steps per epoch for node classification, whose batch is fixed.
  int nc_inner_steps = 500;
  std::uint64_t seed = 0;
  /// Link prediction starts from a per-component rescaling of the adjusted
  /// similarities instead of zero weights.
  bool similarity_init = true;

  std::vector<TrainConfig> cells() const {
    std::vector<TrainConfig> out;
    for (double a : wd1_grid)
      for (double b : wd2_grid) {
        TrainConfig t = train;
        t.wd1 = a;
        t.wd2 = b;
        out.push_back(t);
      }
    if (out.empty()) throw InputError("empty regularization grid");
    return out;
  }
};

struct ActResult {
  LinearModel model;
  double valid_metric = 0.0;
  double test_metric = 0.0;
  GridCell selected;
  std::vector<GridCell> grid;
  std::map<std::string, double> timings;
};

enum class CompatChoice { HStar, H, None };

namespace detail {

/// Scores every trained cell and keeps the first with the best validation value.
template <class Valid, class Test>
ActResult select_cell(std::vector<TrainResult>& trained, std::span<const TrainConfig> cells,
                      Valid&& valid, Test&& test) {
  ActResult out;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trained.size(); ++i) {
    GridCell cell;
    cell.wd1 = cells[i].wd1;
    cell.wd2 = cells[i].wd2;
    cell.valid = valid(trained[i].model);
    cell.test = test(trained[i].model);
    cell.best_epoch = trained[i].best_epoch;
    cell.epochs_run = trained[i].epochs_run;
    out.grid.push_back(cell);
    if (cell.valid > best) {
      best = cell.valid;
      out.model = trained[i].model;
      out.selected = cell;
    }
  }
  out.valid_metric = out.selected.valid;
  out.test_metric = out.selected.test;
  return out;
}

}  // namespace detail

/// Link prediction on prepared data: features for the chosen components and
/// compatibility matrices, 1:1 negatives (fresh each epoch when enabled),
/// model selected on validation Hits@K, reported on test Hits@K.
inline ActResult act_link_prediction(const LinkPredictionData& data, const ActConfig& cfg,
                                     std::span<const Component> comps = kAllComponents,
                                     CompatChoice choice = CompatChoice::HStar) {
  if (comps.empty()) throw InputError("at least one component required");
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Matrix> zs;
  std::vector<Matrix> hs;
  for (Component c : comps) {
    const int i = static_cast<int>(c);
    zs.push_back(data.z_hat[i]);
    switch (choice) {
      case CompatChoice::HStar: hs.push_back(data.compat[i].h_star.values); break;
      case CompatChoice::H: hs.push_back(data.compat[i].h.values); break;
      case CompatChoice::None: hs.push_back(Matrix::Identity(zs.back().cols(), zs.back().cols())); break;
    }
  }
  const LinkFeatureBuilder builder(zs, hs);
  const auto& sp = data.split;
  const Matrix xv = builder.build(sp.valid_pos);
  const Matrix xvn = builder.build(sp.valid_neg);
  const Matrix xt = builder.build(sp.test_pos);
  const Matrix xtn = builder.build(sp.test_neg);
  const std::size_t n_pos = sp.train_pos.size();
  if (n_pos == 0) throw InputError("link prediction needs training edges");

  auto negatives = [&](int epoch) {
    Rng rng(derive_seed(cfg.seed, "train-neg", static_cast<std::uint64_t>(epoch)));
    std::unordered_set<std::uint64_t> taken;
    return sample_non_edges(*data.graph, n_pos, rng, taken, true);
  };
  const EdgeList neg0 = negatives(0);
  EdgeList pairs0 = sp.train_pos;
  pairs0.insert(pairs0.end(), neg0.begin(), neg0.end());
  Matrix x0 = builder.build(pairs0);
  std::vector<int> y0(pairs0.size(), 0);
  std::fill(y0.begin(), y0.begin() + static_cast<std::ptrdiff_t>(n_pos), 1);
  BatchRefresh refresh;
  if (cfg.train.negative_resampling) {
    refresh = [&](int epoch, Matrix& x, std::vector<int>&) {
      const EdgeList neg = negatives(epoch);
      x.bottomRows(static_cast<Index>(neg.size())) = builder.build(neg);
    };
  }
  const auto groups = equal_groups(builder.width(), builder.width() / static_cast<Index>(comps.size()));
  auto valid_hits = [&](const LinearModel& m) {
    return hits_at_k(m.scores(xv), m.scores(xvn), cfg.hits_k);
  };
  auto test_hits = [&](const LinearModel& m) {
    return hits_at_k(m.scores(xt), m.scores(xtn), cfg.hits_k);
  };
  const double feature_time = detail::seconds_since(t0);

  const auto t1 = std::chrono::steady_clock::now();
  // Each block of a pair's features sums to that component's adjusted
  // similarity, so a constant weight per block reproduces a weighted sum of
  // similarities. The block weights come from a small logistic fit.
  InitialWeights init;
  if (cfg.similarity_init) {
    Matrix sims(x0.rows(), static_cast<Index>(groups.size()));
    for (std::size_t c = 0; c < groups.size(); ++c)
      sims.col(static_cast<Index>(c)) = x0.middleCols(groups[c].start, groups[c].size).rowwise().sum();
    const Vector th = newton_logistic(sims, y0);
    init.weights = Matrix::Zero(x0.cols(), 1);
    for (std::size_t c = 0; c < groups.size(); ++c)
      init.weights.middleRows(groups[c].start, groups[c].size).setConstant(th(static_cast<Index>(c)));
    init.bias = Eigen::RowVectorXd::Constant(1, th(th.size() - 1));
  }
  const std::vector<TrainConfig> cells = cfg.cells();
  std::vector<TrainResult> trained = train_many(std::move(x0), std::move(y0), 2, groups, cells, valid_hits,
                                                refresh, cfg.similarity_init ? &init : nullptr);
  ActResult r = detail::select_cell(trained, cells, valid_hits, test_hits);
  r.timings = data.timings;
  r.timings["features"] = feature_time;
  r.timings["train"] = detail::seconds_since(t1);
  return r;
}

/// End to end from the graph, features and split.
inline ActResult act_link_prediction(const SparseGraph& g, const FeatureMatrix& x,
                                     const EdgeSplit& split, const LinkConfig& lcfg,
                                     const ActConfig& cfg) {
  return act_link_prediction(prepare_link_prediction(g, x, split, lcfg), cfg);
}

/// Node classification on the concatenated column-normalized components,
/// selected on validation accuracy, reported on test accuracy.
inline ActResult act_node_classification(const EmbeddingSet& emb, std::span<const int> labels,
                                         int num_classes, const NodeSplit& split,
                                         const ActConfig& cfg,
                                         std::span<const Component> comps = kAllComponents) {
  if (labels.size() != static_cast<std::size_t>(emb.num_nodes()))
    throw InputError("one label per node required");
  if (comps.empty()) throw InputError("at least one component required");
  if (split.train.empty() || split.valid.empty() || split.test.empty())
    throw InputError("node classification needs non-empty train, valid and test sets");
  const auto t0 = std::chrono::steady_clock::now();
  const Matrix feats = build_nc_features(emb, comps);
  auto gather = [&](std::span<const NodeId> ids) {
    std::vector<int> y;
    for (NodeId i : ids) y.push_back(labels[static_cast<std::size_t>(i)]);
    return y;
  };
  const Matrix xtr = take_rows(feats, split.train);
  const Matrix xva = take_rows(feats, split.valid);
  const Matrix xte = take_rows(feats, split.test);
  const std::vector<int> ytr = gather(split.train);
  const std::vector<int> yva = gather(split.valid);
  const std::vector<int> yte = gather(split.test);
  const auto groups = equal_groups(feats.cols(), feats.cols() / static_cast<Index>(comps.size()));
  auto valid_acc = [&](const LinearModel& m) { return accuracy(m.predict(xva), yva); };
  auto test_acc = [&](const LinearModel& m) { return accuracy(m.predict(xte), yte); };
  const double feature_time = detail::seconds_since(t0);

  const auto t1 = std::chrono::steady_clock::now();
  std::vector<TrainConfig> cells = cfg.cells();
  for (TrainConfig& c : cells) {
    c.negative_resampling = false;
    c.inner_steps = cfg.nc_inner_steps;
  }
  ActResult r;
  if (std::all_of(ytr.begin(), ytr.end(), [&](int v) { return v == ytr[0]; })) {
    // One observed class: predict it everywhere.
    LinearModel m;
    m.num_classes = std::max(num_classes, 2);
    const Index k = m.num_classes == 2 ? 1 : m.num_classes;
    m.weights = Matrix::Zero(feats.cols(), k);
    m.bias = Eigen::RowVectorXd::Constant(k, -1e3);
    m.groups = groups;
    if (k == 1) m.bias(0) = ytr[0] == 1 ? 1e3 : -1e3;
    else m.bias(ytr[0]) = 1e3;
    std::vector<TrainResult> trained(cells.size());
    for (auto& t : trained) t.model = m;
    r = detail::select_cell(trained, cells, valid_acc, test_acc);
  } else {
    std::vector<TrainResult> trained =
        train_many(xtr, ytr, std::max(num_classes, 2), groups, cells, valid_acc);
    r = detail::select_cell(trained, cells, valid_acc, test_acc);
  }
  r.timings = emb.timings;
  r.timings["features"] = feature_time;
  r.timings["train"] = detail::seconds_since(t1);
  return r;
}

}  // namespace netinfof
