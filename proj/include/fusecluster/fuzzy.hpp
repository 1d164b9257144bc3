#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "fusecluster/dataset.hpp"
#include "fusecluster/error.hpp"
#include "fusecluster/random.hpp"

namespace fusecluster {

/// n x K row-stochastic matrix; mu(i, j) is the degree of sample i in cluster j.
struct MembershipMatrix {
  Eigen::MatrixXd mu;

  Index n() const { return mu.rows(); }
  Index k() const { return mu.cols(); }
};

/// d x K matrix whose columns are cluster centroids.
struct CentroidSet {
  Eigen::MatrixXd u;

  Index d() const { return u.rows(); }
  Index k() const { return u.cols(); }
};

struct FcmParams {
  double b = 2.0;         // fuzziness exponent
  double tol = 1e-6;      // relative objective change
  int max_iter = 300;
  std::uint64_t seed = 0;

  void validate() const {
    detail::require(b > 1.0, ErrorCode::invalid_argument, "fuzziness exponent b must exceed 1");
    detail::require(tol > 0.0, ErrorCode::invalid_argument, "tolerance must be positive");
    detail::require(max_iter >= 1, ErrorCode::invalid_argument, "max_iter must be at least 1");
  }
};

/// n x K matrix of squared Euclidean distances |x_i - u_j|^2.
inline Eigen::MatrixXd squared_distances(const Dataset& ds, const CentroidSet& centroids) {
  detail::require(ds.d() == centroids.d(), ErrorCode::dimension_mismatch,
                  "data has d=" + std::to_string(ds.d()) + " but centroids have d=" + std::to_string(centroids.d()));
  const Eigen::MatrixXd& x = ds.points;
  const Eigen::MatrixXd& u = centroids.u;
  Eigen::MatrixXd dist(x.cols(), u.cols());
  for (Index j = 0; j < u.cols(); ++j) {
    dist.col(j) = (x.colwise() - u.col(j)).colwise().squaredNorm().transpose();
  }
  return dist;
}

namespace detail {

// Shared by both membership updates: a row with m >= 1 exact zeros gets 1/m
// on those clusters. Otherwise mu_j is proportional to weight(d_j).
template <class Weight>
MembershipMatrix memberships_from(const Eigen::MatrixXd& dist, Weight&& weight) {
  const Index n = dist.rows();
  const Index k = dist.cols();
  MembershipMatrix p{Eigen::MatrixXd::Zero(n, k)};
  for (Index i = 0; i < n; ++i) {
    Index zeros = 0;
    for (Index j = 0; j < k; ++j) zeros += dist(i, j) == 0.0 ? 1 : 0;
    if (zeros > 0) {
      for (Index j = 0; j < k; ++j) p.mu(i, j) = dist(i, j) == 0.0 ? 1.0 / static_cast<double>(zeros) : 0.0;
      continue;
    }
    double total = 0.0;
    for (Index j = 0; j < k; ++j) {
      p.mu(i, j) = weight(dist(i, j));
      total += p.mu(i, j);
    }
    p.mu.row(i) /= total;
  }
  return p;
}

}  // namespace detail

/// Fuzziness-2 membership update: mu_ij = (1/d_ij) / sum_j' (1/d_ij').
inline MembershipMatrix update_memberships(const Eigen::MatrixXd& dist) {
  return detail::memberships_from(dist, [](double d) { return 1.0 / d; });
}

/// General FCM membership update: mu_ij proportional to (1/d_ij)^(1/(b-1)).
/// Identical, bit for bit, to update_memberships when b == 2.
inline MembershipMatrix update_memberships_general(const Eigen::MatrixXd& dist, double b) {
  detail::require(b > 1.0, ErrorCode::invalid_argument, "fuzziness exponent b must exceed 1");
  if (b == 2.0) return update_memberships(dist);
  const double power = 1.0 / (b - 1.0);
  return detail::memberships_from(dist, [power](double d) { return std::pow(1.0 / d, power); });
}

/// mu^b-weighted means of the samples.
inline CentroidSet fcm_centroids(const Dataset& ds, const MembershipMatrix& p, double b) {
  detail::require(p.n() == ds.n(), ErrorCode::dimension_mismatch, "membership rows must equal sample count");
  const Eigen::MatrixXd w = b == 2.0 ? Eigen::MatrixXd(p.mu.array().square()) : Eigen::MatrixXd(p.mu.array().pow(b));
  const Eigen::RowVectorXd mass = w.colwise().sum();
  for (Index j = 0; j < p.k(); ++j) {
    detail::require(mass(j) > 0.0, ErrorCode::degenerate_cluster,
                    "cluster " + std::to_string(j) + " has zero membership weight");
  }
  CentroidSet c{ds.points * w};
  c.u.array().rowwise() /= mass.array();
  return c;
}

/// sum_i sum_j mu_ij^b |x_i - u_j|^2
inline double fcm_objective(const Dataset& ds, const MembershipMatrix& p, const CentroidSet& c, double b) {
  detail::require(p.n() == ds.n() && p.k() == c.k(), ErrorCode::dimension_mismatch,
                  "membership matrix shape does not match data and centroids");
  const Eigen::MatrixXd dist = squared_distances(ds, c);
  if (b == 2.0) return (p.mu.array().square() * dist.array()).sum();
  return (p.mu.array().pow(b) * dist.array()).sum();
}

/// gamma * sum_{k<l} |u_k - u_l|_2
inline double fusion_penalty(const CentroidSet& c, double gamma) {
  double total = 0.0;
  for (Index k = 0; k + 1 < c.k(); ++k) {
    for (Index l = k + 1; l < c.k(); ++l) total += (c.u.col(k) - c.u.col(l)).norm();
  }
  return gamma * total;
}

/// The fused objective with b = 2:
///   1/2 sum_ij mu_ij^2 |x_i - u_j|^2 + gamma sum_{k<l} |u_k - u_l|_2
inline double caf_objective(const Dataset& ds, const MembershipMatrix& p, const CentroidSet& c, double gamma) {
  detail::require(gamma >= 0.0, ErrorCode::invalid_argument, "gamma must be nonnegative");
  return 0.5 * fcm_objective(ds, p, c, 2.0) + fusion_penalty(c, gamma);
}

/// K distinct sample columns chosen uniformly at random.
inline CentroidSet random_centroids(const Dataset& ds, Index k, Rng& rng) {
  detail::require(k >= 1 && k <= ds.n(), ErrorCode::invalid_argument,
                  "cluster count " + std::to_string(k) + " outside [1, " + std::to_string(ds.n()) + "]");
  const auto picks = sample_without_replacement(rng, static_cast<std::size_t>(ds.n()), static_cast<std::size_t>(k));
  CentroidSet c{Eigen::MatrixXd(ds.d(), k)};
  for (Index j = 0; j < k; ++j) c.u.col(j) = ds.points.col(static_cast<Index>(picks[static_cast<std::size_t>(j)]));
  return c;
}

struct FcmResult {
  MembershipMatrix p;
  CentroidSet centroids;
  int iterations = 0;
  std::vector<double> objective_trace;
  bool converged = false;
};

/// Standard fuzzy c-means from K random samples: memberships, then
/// centroids, until the relative objective change drops below tol.
inline FcmResult fcm_fit(const Dataset& ds, Index k, const FcmParams& params) {
  params.validate();
  Rng rng(params.seed);
  FcmResult r;
  r.centroids = random_centroids(ds, k, rng);
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 0; it < params.max_iter; ++it) {
    r.p = update_memberships_general(squared_distances(ds, r.centroids), params.b);
    r.centroids = fcm_centroids(ds, r.p, params.b);
    const double obj = fcm_objective(ds, r.p, r.centroids, params.b);
    r.objective_trace.push_back(obj);
    r.iterations = it + 1;
    if (std::isfinite(previous) && std::abs(previous - obj) <= params.tol * std::max(std::abs(previous), 1e-300)) {
      r.converged = true;
      break;
    }
    previous = obj;
  }
  return r;
}

/// Per-row argmax; ties go to the lowest cluster index.
inline std::vector<int> hard_assignment(const MembershipMatrix& p) {
  std::vector<int> out(static_cast<std::size_t>(p.n()));
  for (Index i = 0; i < p.n(); ++i) {
    Index best = 0;
    for (Index j = 1; j < p.k(); ++j) {
      if (p.mu(i, j) > p.mu(i, best)) best = j;
    }
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

struct KMeansResult {
  std::vector<int> assignment;
  CentroidSet centroids;
  int iterations = 0;
  std::vector<double> wcss_trace;
  bool converged = false;
};

/// Within-cluster sum of squares.
inline double wcss(const Dataset& ds, const std::vector<int>& assignment, const CentroidSet& c) {
  double total = 0.0;
  for (Index i = 0; i < ds.n(); ++i) {
    total += (ds.points.col(i) - c.u.col(assignment[static_cast<std::size_t>(i)])).squaredNorm();
  }
  return total;
}

/// Lloyd's k-means from K random samples. Each iteration assigns every
/// sample to its nearest centroid (ties to the lowest index) and recomputes
/// means. An emptied cluster is reseeded at the sample farthest from its
/// current centroid. Stops when assignments no longer change.
inline KMeansResult kmeans_fit(const Dataset& ds, Index k, const FcmParams& params) {
  detail::require(params.max_iter >= 1, ErrorCode::invalid_argument, "max_iter must be at least 1");
  Rng rng(params.seed);
  KMeansResult r;
  r.centroids = random_centroids(ds, k, rng);
  const auto n = static_cast<std::size_t>(ds.n());
  r.assignment.assign(n, -1);

  for (int it = 0; it < params.max_iter; ++it) {
    const Eigen::MatrixXd dist = squared_distances(ds, r.centroids);
    bool changed = false;
    for (Index i = 0; i < ds.n(); ++i) {
      Index best = 0;
      dist.row(i).minCoeff(&best);
      const auto a = static_cast<int>(best);
      changed = changed || r.assignment[static_cast<std::size_t>(i)] != a;
      r.assignment[static_cast<std::size_t>(i)] = a;
    }
    r.iterations = it + 1;
    if (!changed) {
      r.converged = true;
      r.wcss_trace.push_back(wcss(ds, r.assignment, r.centroids));
      break;
    }

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(ds.d(), k);
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < ds.n(); ++i) {
      const auto a = r.assignment[static_cast<std::size_t>(i)];
      sums.col(a) += ds.points.col(i);
      ++counts[static_cast<std::size_t>(a)];
    }
    for (Index j = 0; j < k; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) {
        r.centroids.u.col(j) = sums.col(j) / static_cast<double>(counts[static_cast<std::size_t>(j)]);
      }
    }
    for (Index j = 0; j < k; ++j) {
      if (counts[static_cast<std::size_t>(j)] > 0) continue;
      Index far = 0;
      double far_dist = -1.0;
      for (Index i = 0; i < ds.n(); ++i) {
        const auto a = r.assignment[static_cast<std::size_t>(i)];
        const double dd = (ds.points.col(i) - r.centroids.u.col(a)).squaredNorm();
        if (dd > far_dist && counts[static_cast<std::size_t>(a)] > 1) {
          far_dist = dd;
          far = i;
        }
      }
      const auto donor = r.assignment[static_cast<std::size_t>(far)];
      --counts[static_cast<std::size_t>(donor)];
      ++counts[static_cast<std::size_t>(j)];
      r.assignment[static_cast<std::size_t>(far)] = static_cast<int>(j);
      r.centroids.u.col(j) = ds.points.col(far);
    }
    r.wcss_trace.push_back(wcss(ds, r.assignment, r.centroids));
  }
  return r;
}

}  // namespace fusecluster
