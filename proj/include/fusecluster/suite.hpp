#pragma once

// Reference gamma schedules for the benchmark datasets.
//
// The automatic schedule (gamma_start = epsilon = 0.01 * RMS pairwise
// distance) suits Iris and the noisy blocks. The others need a window that
// starts lower (the grid and the mixtures, so the first level can spread the
// initial centroids before they fuse) or reaches further (Breast, whose
// two-cluster plateau keeps sharpening up to gamma of about 100). The
// representative level of a path is the middle of its selected plateau.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fusecluster/caf_hfcm.hpp"
#include "fusecluster/error.hpp"

namespace fusecluster {

struct SuiteEntry {
  std::string name;
  Index true_c = 0;
  PathParams schedule;  // seed left at 0
};

namespace detail {

inline PathParams schedule(std::optional<double> gamma_start, std::optional<double> epsilon, int max_levels) {
  PathParams p;
  p.gamma_start = gamma_start;
  p.epsilon = epsilon;
  p.max_levels = max_levels;
  return p;
}

}  // namespace detail

/// Datasets of the benchmark suite: the four generators plus iris, breast
/// and seeds (read from files supplied by the user).
inline const std::vector<SuiteEntry>& suite_entries() {
  static const std::vector<SuiteEntry> entries{
      {"gaussian-mixture-2d", 6, detail::schedule(0.01, std::nullopt, 200)},
      {"gaussian-mixture-20d", 6, detail::schedule(0.01, std::nullopt, 200)},
      {"gaussian-grid", 25, detail::schedule(0.02, 0.05, 40)},
      {"uniform-blocks-noisy", 13, detail::schedule(std::nullopt, std::nullopt, 200)},
      {"iris", 3, detail::schedule(std::nullopt, std::nullopt, 200)},
      {"breast", 2, detail::schedule(0.5, 0.5, 400)},
      {"seeds", 3, detail::schedule(0.25, 0.25, 120)},
  };
  return entries;
}

inline const SuiteEntry& suite_entry(std::string_view name) {
  for (const auto& e : suite_entries()) {
    if (e.name == name) return e;
  }
  throw Error(ErrorCode::invalid_argument, "no suite entry named '" + std::string(name) + "'");
}

/// Level at the middle of the longest run with exactly c clusters.
inline std::optional<std::size_t> middle_of_run(const HierarchyPath& path, Index c) {
  std::optional<Plateau> best;
  for (const auto& run : plateaus(path.gamma_counts())) {
    if (run.c != c) continue;
    if (!best || run.last - run.first > best->last - best->first) best = run;
  }
  if (!best) return std::nullopt;
  return best->first + (best->last - best->first) / 2;
}

}  // namespace fusecluster
