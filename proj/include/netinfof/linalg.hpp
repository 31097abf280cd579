#pragma once

// Randomized truncated SVD, PCA and the row/column normalizations used to
// prepare embeddings.

#include "netinfof/core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace netinfof {

struct SvdOptions {
  Index oversample = 10;
  int power_iterations = 2;
};

struct SvdResult {
  Matrix left;          // rows x d, orthonormal columns (zero columns when padded)
  Vector singular;      // d, non-increasing
  Index rank = 0;       // number of numerically nonzero singular values kept
  bool padded = false;  // d exceeded the numerical rank
};

namespace detail {

inline Matrix orthonormal_basis(const Matrix& y) {
  Eigen::HouseholderQR<Matrix> qr(y);
  return qr.householderQ() * Matrix::Identity(y.rows(), y.cols());
}

/// Flips column signs so the largest-magnitude entry of each column is
/// positive. Applies the same flips to `partner` when given.
inline void fix_signs(Matrix& m, Matrix* partner = nullptr) {
  for (Index j = 0; j < m.cols(); ++j) {
    Index arg = 0;
    double best = -1.0;
    for (Index i = 0; i < m.rows(); ++i) {
      const double a = std::abs(m(i, j));
      // Ties resolved toward the first index for determinism.
      if (a > best * (1.0 + 1e-9)) {
        best = a;
        arg = i;
      }
    }
    if (best > 0 && m(arg, j) < 0) {
      m.col(j) = -m.col(j);
      if (partner) partner->col(j) = -partner->col(j);
    }
  }
}

}  // namespace detail

/// Randomized truncated SVD (range finder with power iterations). Works on
/// dense or sparse inputs. When the sketch width reaches min(rows, cols) the
/// result is exact up to floating point.
template <class Mat>
SvdResult truncated_svd(const Mat& m, Index d, std::uint64_t seed, SvdOptions opts = {}) {
  if (d < 1) throw InputError("truncated_svd: d must be >= 1");
  const Index rows = m.rows();
  const Index cols = m.cols();
  const Index full = std::min(rows, cols);
  SvdResult out;
  out.left = Matrix::Zero(rows, d);
  out.singular = Vector::Zero(d);
  if (full == 0) {
    out.padded = true;
    return out;
  }
  const Index keep = std::min(d, full);
  const Index width = std::min(keep + opts.oversample, full);

  Matrix basis;  // rows x width
  if (width == full && rows <= cols) {
    basis = Matrix::Identity(rows, rows);
  } else {
    Rng rng = make_rng(seed, "randomized-svd");
    const Matrix omega = gaussian_matrix(cols, width, rng);
    basis = detail::orthonormal_basis(m * omega);
    for (int it = 0; it < opts.power_iterations; ++it) {
      const Matrix z = detail::orthonormal_basis(Matrix(m.transpose() * basis));
      basis = detail::orthonormal_basis(m * z);
    }
  }
  // Small problem: B^T = M^T Q (cols x width); B = U_b S V_b^T.
  const Matrix bt = m.transpose() * basis;
  Eigen::BDCSVD<Matrix> svd(bt, Eigen::ComputeThinU | Eigen::ComputeThinV);
  // bt = V_b S U_b^T, so the left vectors of B are svd.matrixV().
  const Vector s = svd.singularValues();
  Matrix left = basis * svd.matrixV().leftCols(keep);
  const double tol = (s.size() > 0 ? s(0) : 0.0) * static_cast<double>(std::max(rows, cols)) *
                     std::numeric_limits<double>::epsilon();
  Index rank = 0;
  for (Index j = 0; j < keep; ++j) {
    if (s(j) > tol && s(j) > 0) {
      ++rank;
    } else {
      left.col(j).setZero();
    }
  }
  detail::fix_signs(left);
  out.left.leftCols(keep) = left;
  out.singular.head(keep) = s.head(keep);
  for (Index j = rank; j < keep; ++j) out.singular(j) = 0.0;
  out.rank = rank;
  out.padded = rank < d;
  return out;
}

struct PcaResult {
  Matrix scores;     // rows x d
  Matrix loadings;   // cols x d, orthonormal
  Vector means;      // cols
  Vector explained;  // d, variance along each component (n-1 denominator)
};

/// PCA on the full row set. Columns are centered; scores are projections on
/// the top-d principal directions, with the largest-magnitude loading of
/// each direction made positive. Uses the covariance eigendecomposition
/// when the column count is moderate and a randomized SVD otherwise; `seed`
/// only matters for the latter.
inline PcaResult pca(const Matrix& x, Index d, std::uint64_t seed, Index exact_limit = 4096) {
  if (d < 1) throw InputError("pca: d must be >= 1");
  const Index n = x.rows();
  const Index f = x.cols();
  PcaResult out;
  out.means = n > 0 ? Vector(x.colwise().mean().transpose()) : Vector::Zero(f);
  out.scores = Matrix::Zero(n, d);
  out.loadings = Matrix::Zero(f, d);
  out.explained = Vector::Zero(d);
  if (n == 0 || f == 0) return out;
  const Matrix centered = x.rowwise() - out.means.transpose();
  const Index keep = std::min(d, f);
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  Matrix loadings;
  Vector variance;
  if (f <= exact_limit) {
    Matrix cov = Matrix::Zero(f, f);
    cov.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose(), 1.0 / denom);
    cov.triangularView<Eigen::StrictlyUpper>() = cov.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    // Ascending order from Eigen; take the tail reversed.
    loadings = eig.eigenvectors().rightCols(keep).rowwise().reverse();
    variance = eig.eigenvalues().tail(keep).reverse().cwiseMax(0.0);
  } else {
    SvdResult svd = truncated_svd(Matrix(centered.transpose()), keep, seed);
    loadings = svd.left;
    variance = svd.singular.array().square() / denom;
  }
  detail::fix_signs(loadings);
  out.loadings.leftCols(keep) = loadings;
  out.explained.head(keep) = variance;
  out.scores.leftCols(keep) = centered * loadings;
  return out;
}

/// Column-wise L2 normalization; zero columns stay zero.
inline Matrix l2_normalize_columns(Matrix z) {
  for (Index j = 0; j < z.cols(); ++j) {
    const double norm = z.col(j).norm();
    if (norm > 0) z.col(j) /= norm;
  }
  return z;
}

/// Row-wise L2 normalization; zero rows stay zero.
inline Matrix l2_normalize_rows(Matrix z) {
  for (Index i = 0; i < z.rows(); ++i) {
    const double norm = z.row(i).norm();
    if (norm > 0) z.row(i) /= norm;
  }
  return z;
}

/// Column standardization (mean 0, population std 1; constant columns become
/// 0) followed by row L2 normalization.
inline Matrix preprocess_hat(const Matrix& z) {
  const Index n = z.rows();
  Matrix out = z;
  if (n == 0) return out;
  for (Index j = 0; j < z.cols(); ++j) {
    const double mean = z.col(j).mean();
    out.col(j).array() -= mean;
    const double sd = std::sqrt(out.col(j).squaredNorm() / static_cast<double>(n));
    const double scale = std::max(std::abs(mean), 1.0);
    if (sd > 1e-12 * scale) {
      out.col(j) /= sd;
    } else {
      out.col(j).setZero();
    }
  }
  return l2_normalize_rows(std::move(out));
}

}  // namespace netinfof
