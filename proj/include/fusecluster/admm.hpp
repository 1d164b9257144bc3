#pragma once

// ADMM solver for the centroid subproblem with memberships held fixed:
//
//   min_U  1/2 sum_ij mu_ij^2 |x_i - u_j|^2 + gamma sum_{k<l} |u_k - u_l|_2
//
// split as u_k - u_l - v_kl = 0 with scaled duals lambda_kl. One iteration is
// a Gauss-Seidel sweep over centroid columns, then a proximal update of every
// difference variable v_kl followed by its dual ascent step.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "fusecluster/dataset.hpp"
#include "fusecluster/error.hpp"
#include "fusecluster/fuzzy.hpp"

namespace fusecluster {

/// Canonical lexicographic enumeration of centroid pairs (k, l), k < l.
class PairIndex {
 public:
  explicit PairIndex(Index k = 0) : k_(k) {
    detail::require(k >= 0, ErrorCode::invalid_argument, "cluster count must be nonnegative");
    pairs_.reserve(static_cast<std::size_t>(k * (k - 1) / 2));
    for (Index a = 0; a + 1 < k; ++a) {
      for (Index b = a + 1; b < k; ++b) pairs_.emplace_back(a, b);
    }
  }

  Index clusters() const { return k_; }
  Index size() const { return static_cast<Index>(pairs_.size()); }
  const std::pair<Index, Index>& pair(Index p) const { return pairs_[static_cast<std::size_t>(p)]; }

  /// Flat index of (k, l) with k < l.
  Index index(Index k, Index l) const {
    detail::require(0 <= k && k < l && l < k_, ErrorCode::invalid_argument, "pair index requires 0 <= k < l < K");
    // Pairs preceding row k: sum_{a<k} (K-1-a).
    return k * (2 * k_ - k - 1) / 2 + (l - k - 1);
  }

 private:
  Index k_;
  std::vector<std::pair<Index, Index>> pairs_;
};

/// Difference variables V and multipliers Lambda, both d x P.
struct AdmmState {
  Eigen::MatrixXd v;
  Eigen::MatrixXd lambda;
  double beta = 1.0;

  static AdmmState zeros(Index d, Index clusters, double beta) {
    const Index p = clusters * (clusters - 1) / 2;
    return {Eigen::MatrixXd::Zero(d, p), Eigen::MatrixXd::Zero(d, p), beta};
  }
};

struct AdmmParams {
  double beta = 1.0;
  double tol_primal = 1e-5;
  double tol_dual = 1e-5;
  int max_iter = 500;

  void validate() const {
    detail::require(beta > 0.0, ErrorCode::invalid_argument, "beta must be positive");
    detail::require(tol_primal > 0.0 && tol_dual > 0.0, ErrorCode::invalid_argument, "tolerances must be positive");
    detail::require(max_iter >= 1, ErrorCode::invalid_argument, "max_iter must be at least 1");
  }
};

/// Proximal map of sigma * |.|_2: radial shrinkage (1 - sigma/|z|)_+ z.
inline Eigen::VectorXd block_soft_threshold(const Eigen::VectorXd& z, double sigma) {
  detail::require(sigma >= 0.0, ErrorCode::invalid_argument, "threshold must be nonnegative");
  const double norm = z.norm();
  if (norm <= sigma) return Eigen::VectorXd::Zero(z.size());
  return (1.0 - sigma / norm) * z;
}

namespace detail {

// Column masses sum_i mu_ij^2 and weighted sums sum_i mu_ij^2 x_i.
struct MembershipMoments {
  Eigen::VectorXd mass;
  Eigen::MatrixXd weighted_sum;  // d x K

  MembershipMoments(const Dataset& ds, const MembershipMatrix& p) {
    require(p.n() == ds.n(), ErrorCode::dimension_mismatch, "membership rows must equal sample count");
    const Eigen::MatrixXd w = p.mu.array().square();
    mass = w.colwise().sum().transpose();
    weighted_sum = ds.points * w;
  }
};

inline void check_shapes(const Dataset& ds, const MembershipMatrix& p, const CentroidSet& c, const AdmmState& s) {
  require(p.n() == ds.n() && p.k() == c.k() && c.d() == ds.d(), ErrorCode::dimension_mismatch,
          "data, memberships and centroids disagree in shape");
  const Index pairs = c.k() * (c.k() - 1) / 2;
  require(s.v.rows() == c.d() && s.v.cols() == pairs && s.lambda.rows() == c.d() && s.lambda.cols() == pairs,
          ErrorCode::dimension_mismatch, "ADMM state does not match the centroid pair structure");
}

// sum_{l>j} vt_jl - sum_{k<j} vt_kj for every j, with vt = v + lambda/beta.
inline Eigen::MatrixXd pair_balance(const PairIndex& pairs, const AdmmState& s) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(s.v.rows(), pairs.clusters());
  for (Index p = 0; p < pairs.size(); ++p) {
    const auto [k, l] = pairs.pair(p);
    const Eigen::VectorXd vt = s.v.col(p) + s.lambda.col(p) / s.beta;
    out.col(k) += vt;
    out.col(l) -= vt;
  }
  return out;
}

inline Eigen::VectorXd column_update(Index j, const MembershipMoments& m, const Eigen::MatrixXd& balance,
                                     const Eigen::VectorXd& others_sum, double beta, Index clusters) {
  const Eigen::VectorXd alpha = balance.col(j) + others_sum;
  return (m.weighted_sum.col(j) + beta * alpha) / (m.mass(j) + beta * static_cast<double>(clusters - 1));
}

}  // namespace detail

/// Exact minimiser in u_j of the augmented Lagrangian with every other
/// column, V and Lambda held fixed:
///
///   u_j = (sum_i mu_ij^2 x_i + beta alpha_j) / (sum_i mu_ij^2 + beta (K-1))
///   alpha_j = sum_{l>j} vt_jl - sum_{k<j} vt_kj + sum_{l != j} u_l
inline Eigen::VectorXd update_centroid_column(Index j, const Dataset& ds, const MembershipMatrix& p,
                                              const CentroidSet& c, const AdmmState& s) {
  detail::check_shapes(ds, p, c, s);
  detail::require(0 <= j && j < c.k(), ErrorCode::invalid_argument, "column index out of range");
  detail::require(s.beta >= 0.0, ErrorCode::invalid_argument, "beta must be nonnegative");
  const detail::MembershipMoments m(ds, p);
  if (s.beta == 0.0) return m.weighted_sum.col(j) / m.mass(j);  // fusion terms drop out
  const PairIndex pairs(c.k());
  const Eigen::VectorXd others = c.u.rowwise().sum() - c.u.col(j);
  return detail::column_update(j, m, detail::pair_balance(pairs, s), others, s.beta, c.k());
}

/// Proximal step for v_kl followed by the dual step for lambda_kl.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> update_pair(Index k, Index l, const CentroidSet& c,
                                                               const AdmmState& s, double gamma) {
  detail::require(s.beta > 0.0, ErrorCode::invalid_argument, "beta must be positive");
  detail::require(gamma >= 0.0, ErrorCode::invalid_argument, "gamma must be nonnegative");
  const Index p = PairIndex(c.k()).index(k, l);
  const Eigen::VectorXd diff = c.u.col(k) - c.u.col(l);
  Eigen::VectorXd v = block_soft_threshold(diff - s.lambda.col(p) / s.beta, gamma / s.beta);
  Eigen::VectorXd lambda = s.lambda.col(p) + s.beta * (v - diff);
  return {std::move(v), std::move(lambda)};
}

struct AdmmResidual {
  double primal = 0.0;  // max_kl |v_kl - u_k + u_l|_inf
  double dual = 0.0;    // beta * max |U^m - U^{m-1}|
};

struct AdmmResult {
  CentroidSet centroids;
  AdmmState state;
  std::vector<AdmmResidual> trace;
  int iterations = 0;
  bool converged = false;
};

/// Runs ADMM from `initial`. V and Lambda start at zero unless `warm` is
/// given, in which case they start from it (its shapes must match and its beta
/// is replaced by params.beta). Stops once both residuals fall below their
/// tolerances; otherwise returns the last iterate with `converged == false`.
inline AdmmResult admm_u(const Dataset& ds, const MembershipMatrix& p, const CentroidSet& initial, double gamma,
                         const AdmmParams& params, const AdmmState* warm = nullptr) {
  params.validate();
  detail::require(gamma >= 0.0, ErrorCode::invalid_argument, "gamma must be nonnegative");
  detail::require(initial.k() >= 1, ErrorCode::invalid_argument, "need at least one centroid");
  AdmmResult r;
  r.centroids = initial;
  if (warm) {
    r.state = *warm;
    r.state.beta = params.beta;
  } else {
    r.state = AdmmState::zeros(initial.d(), initial.k(), params.beta);
  }
  detail::check_shapes(ds, p, r.centroids, r.state);

  const Index k = initial.k();
  const Index d = initial.d();
  const PairIndex pairs(k);
  const detail::MembershipMoments moments(ds, p);
  Eigen::MatrixXd& u = r.centroids.u;
  AdmmState& s = r.state;
  const double beta = s.beta;
  const double sigma = gamma / beta;

  Eigen::MatrixXd previous(d, k);
  Eigen::MatrixXd balance(d, k);
  Eigen::VectorXd total(d);
  Eigen::VectorXd z(d);
  Eigen::VectorXd residual(d);
  for (int it = 0; it < params.max_iter; ++it) {
    previous = u;
    balance.setZero();
    for (Index q = 0; q < pairs.size(); ++q) {
      const auto [a, b] = pairs.pair(q);
      z.noalias() = s.v.col(q) + s.lambda.col(q) / beta;
      balance.col(a) += z;
      balance.col(b) -= z;
    }
    total = u.rowwise().sum();
    for (Index j = 0; j < k; ++j) {
      z.noalias() = (moments.weighted_sum.col(j) + beta * (balance.col(j) + total - u.col(j))) /
                    (moments.mass(j) + beta * static_cast<double>(k - 1));
      total += z - u.col(j);
      u.col(j) = z;
    }

    double primal = 0.0;
    for (Index q = 0; q < pairs.size(); ++q) {
      const auto [a, b] = pairs.pair(q);
      z.noalias() = u.col(a) - u.col(b) - s.lambda.col(q) / beta;
      const double norm = z.norm();
      if (norm <= sigma) {
        s.v.col(q).setZero();
      } else {
        s.v.col(q) = (1.0 - sigma / norm) * z;
      }
      residual.noalias() = s.v.col(q) - u.col(a) + u.col(b);
      s.lambda.col(q) += beta * residual;
      primal = std::max(primal, residual.cwiseAbs().maxCoeff());
    }
    const double dual = beta * (u - previous).cwiseAbs().maxCoeff();
    r.trace.push_back({primal, dual});
    r.iterations = it + 1;
    if (primal < params.tol_primal && dual < params.tol_dual) {
      r.converged = true;
      break;
    }
  }
  return r;
}

/// L_beta(U, V, Lambda) =
///   1/2 sum_ij mu_ij^2 |x_i - u_j|^2 + gamma sum |v_kl|
///   + sum <lambda_kl, v_kl - u_k + u_l> + beta/2 sum |v_kl - u_k + u_l|^2
inline double augmented_lagrangian(const Dataset& ds, const MembershipMatrix& p, const CentroidSet& c,
                                   const AdmmState& s, double gamma) {
  detail::check_shapes(ds, p, c, s);
  double value = 0.5 * fcm_objective(ds, p, c, 2.0);
  const PairIndex pairs(c.k());
  for (Index q = 0; q < pairs.size(); ++q) {
    const auto [k, l] = pairs.pair(q);
    const Eigen::VectorXd residual = s.v.col(q) - c.u.col(k) + c.u.col(l);
    value += gamma * s.v.col(q).norm() + s.lambda.col(q).dot(residual) + 0.5 * s.beta * residual.squaredNorm();
  }
  return value;
}

}  // namespace fusecluster
