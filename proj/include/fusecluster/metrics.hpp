#pragma once

// External validity measures comparing a predicted partition with ground
// truth: Rand index, Hubert-Arabie adjusted Rand index and normalized
// mutual information. Label values are arbitrary integers; only the induced
// partitions matter.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "fusecluster/error.hpp"

namespace fusecluster {

struct ContingencyTable {
  std::size_t rows = 0;  // predicted clusters
  std::size_t cols = 0;  // true classes
  std::vector<std::int64_t> counts;  // row-major rows x cols
  std::vector<std::int64_t> row_sums;
  std::vector<std::int64_t> col_sums;
  std::int64_t n = 0;

  std::int64_t at(std::size_t i, std::size_t j) const { return counts[i * cols + j]; }
};

namespace detail {

// Labels mapped to 0..(distinct-1) in first-appearance order.
inline std::vector<std::size_t> densify(std::span<const int> labels, std::size_t& distinct) {
  std::map<int, std::size_t> ids;
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (int label : labels) {
    const auto [it, inserted] = ids.try_emplace(label, ids.size());
    out.push_back(it->second);
  }
  distinct = ids.size();
  return out;
}

inline std::int64_t choose2(std::int64_t x) { return x * (x - 1) / 2; }

}  // namespace detail

inline ContingencyTable contingency(std::span<const int> pred, std::span<const int> truth) {
  detail::require(pred.size() == truth.size(), ErrorCode::dimension_mismatch,
                  "label sequences differ in length (" + std::to_string(pred.size()) + " vs " +
                      std::to_string(truth.size()) + ")");
  detail::require(!pred.empty(), ErrorCode::empty_input, "label sequences are empty");
  ContingencyTable t;
  const auto p = detail::densify(pred, t.rows);
  const auto q = detail::densify(truth, t.cols);
  t.counts.assign(t.rows * t.cols, 0);
  t.row_sums.assign(t.rows, 0);
  t.col_sums.assign(t.cols, 0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    ++t.counts[p[i] * t.cols + q[i]];
    ++t.row_sums[p[i]];
    ++t.col_sums[q[i]];
  }
  t.n = static_cast<std::int64_t>(p.size());
  return t;
}

namespace detail {

struct PairCounts {
  std::int64_t total = 0;     // C(n, 2)
  std::int64_t together = 0;  // sum_ij C(n_ij, 2)
  std::int64_t rows = 0;      // sum_i C(a_i, 2)
  std::int64_t cols = 0;      // sum_j C(b_j, 2)
};

inline PairCounts pair_counts(const ContingencyTable& t) {
  PairCounts pc;
  pc.total = choose2(t.n);
  for (auto c : t.counts) pc.together += choose2(c);
  for (auto a : t.row_sums) pc.rows += choose2(a);
  for (auto b : t.col_sums) pc.cols += choose2(b);
  return pc;
}

}  // namespace detail

/// Fraction of sample pairs on which the two partitions agree.
inline double rand_index(std::span<const int> pred, std::span<const int> truth) {
  detail::require(pred.size() >= 2, ErrorCode::invalid_argument, "Rand index needs at least two samples");
  const auto pc = detail::pair_counts(contingency(pred, truth));
  // Agreeing pairs: together in both, plus apart in both.
  const std::int64_t agree = pc.total + 2 * pc.together - pc.rows - pc.cols;
  return static_cast<double>(agree) / static_cast<double>(pc.total);
}

/// Chance-corrected Rand index. The denominator vanishes only when both
/// partitions are all singletons or both a single block; those identical
/// partitions score 1.
inline double adjusted_rand_index(std::span<const int> pred, std::span<const int> truth) {
  detail::require(pred.size() >= 2, ErrorCode::invalid_argument, "adjusted Rand index needs at least two samples");
  const auto pc = detail::pair_counts(contingency(pred, truth));
  const double expected = static_cast<double>(pc.rows) * static_cast<double>(pc.cols) / static_cast<double>(pc.total);
  const double max_index = 0.5 * static_cast<double>(pc.rows + pc.cols);
  const double denom = max_index - expected;
  if (denom == 0.0) return pc.rows == pc.cols ? 1.0 : 0.0;
  return (static_cast<double>(pc.together) - expected) / denom;
}

enum class NmiNormalization { geometric, arithmetic };

/// I(pred; truth) / sqrt(H(pred) H(truth)) with natural logarithms, or the
/// arithmetic-mean variant 2I / (H(pred) + H(truth)).
inline double normalized_mutual_info(std::span<const int> pred, std::span<const int> truth,
                                     NmiNormalization norm = NmiNormalization::geometric) {
  const auto t = contingency(pred, truth);
  const double n = static_cast<double>(t.n);
  auto entropy = [n](const std::vector<std::int64_t>& sums) {
    double h = 0.0;
    for (auto s : sums) {
      if (s > 0) h -= (static_cast<double>(s) / n) * std::log(static_cast<double>(s) / n);
    }
    return h;
  };
  const double hp = entropy(t.row_sums);
  const double ht = entropy(t.col_sums);
  if (hp == 0.0 && ht == 0.0) return 1.0;  // both single-block, hence equal
  if (hp == 0.0 || ht == 0.0) return 0.0;

  double mi = 0.0;
  for (std::size_t i = 0; i < t.rows; ++i) {
    for (std::size_t j = 0; j < t.cols; ++j) {
      const auto c = static_cast<double>(t.at(i, j));
      if (c == 0.0) continue;
      mi += (c / n) * std::log(c * n / (static_cast<double>(t.row_sums[i]) * static_cast<double>(t.col_sums[j])));
    }
  }
  const double value = norm == NmiNormalization::geometric ? mi / std::sqrt(hp * ht) : 2.0 * mi / (hp + ht);
  return std::clamp(value, 0.0, 1.0);
}

struct ValidityScores {
  double ri = 0.0;
  double ari = 0.0;
  double nmi = 0.0;
};

inline ValidityScores score(std::span<const int> pred, std::span<const int> truth,
                            NmiNormalization norm = NmiNormalization::geometric) {
  return {rand_index(pred, truth), adjusted_rand_index(pred, truth), normalized_mutual_info(pred, truth, norm)};
}

}  // namespace fusecluster
