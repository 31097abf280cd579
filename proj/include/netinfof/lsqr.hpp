#pragma once

// LSQR (Paige & Saunders) on a matrix given only through products with A and
// A^T. Damping with a nonzero starting point is handled by solving for the
// correction on the augmented system [A; damp*I] dx = [b - A x0; -damp*x0],
// which makes the result independent of x0 at convergence.

#include "netinfof/core.hpp"

#include <cmath>
#include <vector>

namespace netinfof {

struct LsqrResult {
  Vector x;
  int iterations = 0;
  bool converged = false;
  double residual_norm = 0.0;         // ||[b - A x; -damp x]||
  double normal_residual_norm = 0.0;  // ||A^T r - damp^2 x||
  std::vector<double> residual_history;  // residual after each iteration (index 0 = start)
};

template <class ApplyA, class ApplyAt>
LsqrResult lsqr(ApplyA&& apply_a, ApplyAt&& apply_at, const Vector& b, const Vector& x0,
                double damp, int max_iter, double tol) {
  const Index n = x0.size();
  LsqrResult res;
  res.x = x0;

  // Augmented right-hand side.
  Vector u_top = b - apply_a(x0);
  Vector u_bot = -damp * x0;
  auto aug_t = [&](const Vector& top, const Vector& bot) -> Vector {
    Vector v = apply_at(top);
    if (damp != 0.0) v += damp * bot;
    return v;
  };
  const double bnorm = b.norm();
  double beta = std::sqrt(u_top.squaredNorm() + u_bot.squaredNorm());
  res.residual_history.push_back(beta);
  res.residual_norm = beta;
  if (beta == 0.0) {
    res.converged = true;
    return res;
  }
  u_top /= beta;
  u_bot /= beta;
  Vector v = aug_t(u_top, u_bot);
  double alpha = v.norm();
  res.normal_residual_norm = alpha * beta;
  if (alpha == 0.0) {
    res.converged = true;
    return res;
  }
  v /= alpha;

  Vector w = v;
  Vector dx = Vector::Zero(n);
  double phibar = beta;
  double rhobar = alpha;
  double anorm = 0.0;
  double xnorm_sq = 0.0;

  for (int it = 1; it <= max_iter; ++it) {
    // Bidiagonalization step.
    Vector next_top = apply_a(v) - alpha * u_top;
    Vector next_bot = damp * v - alpha * u_bot;
    beta = std::sqrt(next_top.squaredNorm() + next_bot.squaredNorm());
    anorm = std::sqrt(anorm * anorm + alpha * alpha + beta * beta);
    if (beta > 0.0) {
      u_top = next_top / beta;
      u_bot = next_bot / beta;
      Vector next_v = aug_t(u_top, u_bot) - beta * v;
      alpha = next_v.norm();
      if (alpha > 0.0) v = next_v / alpha;
    } else {
      alpha = 0.0;
    }

    // Plane rotation.
    const double rho = std::hypot(rhobar, beta);
    const double c = rhobar / rho;
    const double s = beta / rho;
    const double theta = s * alpha;
    rhobar = -c * alpha;
    const double phi = c * phibar;
    phibar = s * phibar;

    dx += (phi / rho) * w;
    w = v - (theta / rho) * w;
    xnorm_sq = (x0 + dx).squaredNorm();

    res.iterations = it;
    const double rnorm = phibar;
    const double arnorm = phibar * alpha * std::abs(c);
    res.residual_history.push_back(rnorm);
    res.residual_norm = rnorm;
    res.normal_residual_norm = arnorm;

    // Stopping rules: consistent system, or least-squares optimality.
    const double xnorm = std::sqrt(xnorm_sq);
    const bool small_residual = rnorm <= tol * (bnorm + anorm * xnorm);
    const bool normal_ok = anorm > 0.0 && rnorm > 0.0 && arnorm / (anorm * rnorm) <= tol;
    if (small_residual || normal_ok || alpha == 0.0 || beta == 0.0) {
      res.converged = true;
      break;
    }
  }
  res.x = x0 + dx;
  return res;
}

}  // namespace netinfof
