#pragma once

// Fuzzy c-means with a pairwise fusion penalty on the centroids (CAF-HFCM).
//
// For a fixed fusion weight gamma, memberships (closed form) and centroids
// (ADMM) are alternated; centroids whose ADMM difference variable vanishes
// are merged. Sweeping gamma upward with warm starts yields an agglomerative
// hierarchy, and the cluster count that persists over the widest gamma range
// is reported as the optimal one.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fusecluster/admm.hpp"
#include "fusecluster/dataset.hpp"
#include "fusecluster/error.hpp"
#include "fusecluster/fuzzy.hpp"
#include "fusecluster/random.hpp"

namespace fusecluster {

/// One merge of two or more centroids into one.
///
/// Events are individually replayable: `absorbed` holds indices in the
/// numbering current just before this event. The merged centroid takes the
/// smallest absorbed index and the remaining centroids keep their relative
/// order, so `survivor == absorbed.front()`.
struct MergeEvent {
  double gamma = 0.0;
  std::vector<Index> absorbed;
  Index survivor = 0;
  Index level = 0;
};

/// Solution of the alternating scheme at one gamma.
struct LevelSolution {
  double gamma = 0.0;
  MembershipMatrix p;
  CentroidSet centroids;
  Index c = 0;
  std::vector<int> assignment;
  double objective = 0.0;

  int cycles = 0;
  bool converged = false;       // relative objective change reached tol
  bool admm_converged = true;   // every inner ADMM solve met its tolerances
  std::vector<double> objective_trace;  // objective after each cycle's centroid step
  std::vector<bool> merged_after;       // whether that cycle ended with a merge
};

/// Settings for one fixed-gamma solve. `merge_tol` is absolute here.
struct SolveParams {
  double tol = 1e-6;
  int max_cycles = 300;
  AdmmParams admm;
  double merge_tol = 1e-8;
};

struct PathParams {
  std::optional<double> gamma_start;  // default: 0.01 * RMS pairwise distance
  std::optional<double> epsilon;      // default: 0.01 * RMS pairwise distance
  double epsilon_growth = 1.0;        // epsilon is multiplied by this after every level
  int max_levels = 200;
  double a = 2.0;                     // initial K = floor(a sqrt(n))
  Index stop_at_c = 1;
  double tol = 1e-6;
  int max_cycles = 300;
  AdmmParams admm;
  double merge_tol = 1e-4;            // relative to the RMS pairwise distance
  std::uint64_t seed = 0;

  void validate() const {
    detail::require(a >= 1.0 && a <= 3.0, ErrorCode::invalid_argument, "a must lie in [1, 3]");
    detail::require(!gamma_start || *gamma_start > 0.0, ErrorCode::invalid_argument, "gamma_start must be positive");
    detail::require(!epsilon || *epsilon > 0.0, ErrorCode::invalid_argument, "epsilon must be positive");
    detail::require(epsilon_growth >= 1.0, ErrorCode::invalid_argument, "epsilon growth must be at least 1");
    detail::require(max_levels >= 1, ErrorCode::invalid_argument, "max_levels must be at least 1");
    detail::require(stop_at_c >= 1, ErrorCode::invalid_argument, "stop_at_c must be at least 1");
    detail::require(tol > 0.0 && max_cycles >= 1, ErrorCode::invalid_argument, "inner tolerances out of range");
    detail::require(merge_tol > 0.0, ErrorCode::invalid_argument, "merge_tol must be positive");
    admm.validate();
  }
};

struct MergeResult {
  CentroidSet centroids;
  std::vector<Index> remap;        // old index -> new index
  std::vector<MergeEvent> events;  // gamma and level left at zero
};

/// Connected components of the graph with an edge (k, l) whenever
/// |v_kl|_2 <= merge_tol, found by breadth-first search. Each component
/// collapses to the average of its members weighted by sum_i mu_ij^2.
inline MergeResult merge_centroids(const CentroidSet& c, const AdmmState& state, const MembershipMatrix& p,
                                   double merge_tol) {
  const Index k = c.k();
  const PairIndex pairs(k);
  detail::require(state.v.cols() == pairs.size() && state.v.rows() == c.d(), ErrorCode::dimension_mismatch,
                  "difference variables do not match the centroid set");
  detail::require(p.k() == k, ErrorCode::dimension_mismatch, "membership columns must match centroid count");

  std::vector<std::vector<Index>> adjacency(static_cast<std::size_t>(k));
  for (Index q = 0; q < pairs.size(); ++q) {
    if (state.v.col(q).norm() <= merge_tol) {
      const auto [a, b] = pairs.pair(q);
      adjacency[static_cast<std::size_t>(a)].push_back(b);
      adjacency[static_cast<std::size_t>(b)].push_back(a);
    }
  }

  // Components are discovered from the lowest unvisited index, so they come
  // out ordered by their smallest member.
  std::vector<std::vector<Index>> components;
  std::vector<Index> remap(static_cast<std::size_t>(k), -1);
  for (Index start = 0; start < k; ++start) {
    if (remap[static_cast<std::size_t>(start)] >= 0) continue;
    const auto id = static_cast<Index>(components.size());
    std::vector<Index> members;
    std::deque<Index> queue{start};
    remap[static_cast<std::size_t>(start)] = id;
    while (!queue.empty()) {
      const Index node = queue.front();
      queue.pop_front();
      members.push_back(node);
      for (Index next : adjacency[static_cast<std::size_t>(node)]) {
        if (remap[static_cast<std::size_t>(next)] < 0) {
          remap[static_cast<std::size_t>(next)] = id;
          queue.push_back(next);
        }
      }
    }
    std::sort(members.begin(), members.end());
    components.push_back(std::move(members));
  }

  MergeResult out;
  out.remap = std::move(remap);
  const Eigen::VectorXd mass = p.mu.array().square().colwise().sum().transpose();
  out.centroids.u.resize(c.d(), static_cast<Index>(components.size()));
  for (std::size_t g = 0; g < components.size(); ++g) {
    const auto& members = components[g];
    if (members.size() == 1) {
      out.centroids.u.col(static_cast<Index>(g)) = c.u.col(members.front());
      continue;
    }
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(c.d());
    double total = 0.0;
    for (Index j : members) {
      acc += mass(j) * c.u.col(j);
      total += mass(j);
    }
    if (total > 0.0) {
      out.centroids.u.col(static_cast<Index>(g)) = acc / total;
    } else {
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(c.d());
      for (Index j : members) mean += c.u.col(j);
      out.centroids.u.col(static_cast<Index>(g)) = mean / static_cast<double>(members.size());
    }
  }

  // Express the simultaneous merge as a sequence of single merges. Before
  // the merge of component g, every earlier component has already
  // collapsed onto its smallest member; each index is shifted down by the
  // number of removed indices below it.
  std::vector<Index> removed;
  for (const auto& members : components) {
    if (members.size() < 2) continue;
    MergeEvent e;
    for (Index j : members) {
      const auto below = std::lower_bound(removed.begin(), removed.end(), j) - removed.begin();
      e.absorbed.push_back(j - static_cast<Index>(below));
    }
    e.survivor = e.absorbed.front();
    for (std::size_t m = 1; m < members.size(); ++m) {
      removed.insert(std::upper_bound(removed.begin(), removed.end(), members[m]), members[m]);
    }
    out.events.push_back(std::move(e));
  }
  return out;
}

/// Applies one merge event to a cluster count and index map (old frame -> new frame).
inline std::vector<Index> replay_merge(Index clusters, const MergeEvent& e) {
  detail::require(e.absorbed.size() >= 2, ErrorCode::invalid_argument, "merge event needs two or more members");
  std::vector<Index> map(static_cast<std::size_t>(clusters), -1);
  std::vector<bool> absorbed(static_cast<std::size_t>(clusters), false);
  for (Index j : e.absorbed) {
    detail::require(0 <= j && j < clusters, ErrorCode::invalid_argument, "merge event index out of range");
    absorbed[static_cast<std::size_t>(j)] = true;
  }
  const Index head = *std::min_element(e.absorbed.begin(), e.absorbed.end());
  Index next = 0;
  for (Index j = 0; j < clusters; ++j) {
    if (absorbed[static_cast<std::size_t>(j)] && j != head) continue;
    map[static_cast<std::size_t>(j)] = next++;
  }
  for (Index j : e.absorbed) map[static_cast<std::size_t>(j)] = map[static_cast<std::size_t>(head)];
  return map;
}

/// Alternates membership updates, ADMM centroid solves and merges until the
/// relative change of the objective between two merge-free cycles is below
/// tol, or max_cycles is reached. Merge events are appended to `merges`
/// (with this gamma, level 0) when provided.
inline LevelSolution solve_fixed_gamma(const Dataset& ds, const CentroidSet& initial, double gamma,
                                       const SolveParams& params, std::vector<MergeEvent>* merges = nullptr) {
  detail::require(initial.k() >= 1, ErrorCode::invalid_argument, "need at least one initial centroid");
  detail::require(gamma >= 0.0, ErrorCode::invalid_argument, "gamma must be nonnegative");
  detail::require(initial.d() == ds.d(), ErrorCode::dimension_mismatch, "centroid dimension does not match data");
  params.admm.validate();

  LevelSolution sol;
  sol.gamma = gamma;
  CentroidSet u = initial;
  std::optional<AdmmState> state;  // carried across cycles until K changes
  double previous = std::numeric_limits<double>::infinity();

  for (int cycle = 0; cycle < params.max_cycles; ++cycle) {
    const MembershipMatrix p = update_memberships(squared_distances(ds, u));
    AdmmResult admm = admm_u(ds, p, u, gamma, params.admm, state ? &*state : nullptr);
    sol.admm_converged = sol.admm_converged && admm.converged;
    u = std::move(admm.centroids);
    state = admm.state;
    const double objective = caf_objective(ds, p, u, gamma);
    sol.objective_trace.push_back(objective);
    sol.cycles = cycle + 1;

    MergeResult merged = merge_centroids(u, admm.state, p, params.merge_tol);
    const bool any_merge = !merged.events.empty();
    sol.merged_after.push_back(any_merge);
    if (any_merge) {
      u = std::move(merged.centroids);
      state.reset();
      if (merges) {
        for (auto& e : merged.events) {
          e.gamma = gamma;
          merges->push_back(std::move(e));
        }
      }
      previous = std::numeric_limits<double>::infinity();
      continue;
    }
    if (std::isfinite(previous) && std::abs(previous - objective) <= params.tol * std::max(std::abs(previous), 1e-300)) {
      sol.converged = true;
      break;
    }
    previous = objective;
  }

  sol.p = update_memberships(squared_distances(ds, u));
  sol.centroids = std::move(u);
  sol.c = sol.centroids.k();
  sol.assignment = hard_assignment(sol.p);
  sol.objective = caf_objective(ds, sol.p, sol.centroids, gamma);
  return sol;
}

/// A maximal run of consecutive levels sharing one cluster count.
struct Plateau {
  Index c = 0;
  std::size_t first = 0;  // level indices, inclusive
  std::size_t last = 0;
  double gamma_lo = 0.0;
  double gamma_hi = 0.0;

  double length() const { return gamma_hi - gamma_lo; }
};

struct PlateauSelection {
  Index c = 0;
  double gamma_lo = 0.0;
  double gamma_hi = 0.0;
  std::size_t first_level = 0;
  std::size_t last_level = 0;
  std::vector<Plateau> runs;  // every run along the path, in order
};

inline std::vector<Plateau> plateaus(std::span<const std::pair<double, Index>> path) {
  std::vector<Plateau> runs;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const auto [gamma, c] = path[i];
    if (!runs.empty() && runs.back().c == c) {
      runs.back().last = i;
      runs.back().gamma_hi = gamma;
    } else {
      runs.push_back({c, i, i, gamma, gamma});
    }
  }
  return runs;
}

/// Picks the cluster count whose longest contiguous run spans the widest
/// gamma interval (last gamma minus first gamma of the run).
///
/// Not eligible: runs at c = 1, a run at c = initial_k that starts at the
/// first level, and single-level runs (zero width). Ties go to the smaller
/// c. Throws ErrorCode::inconclusive when nothing is eligible.
inline PlateauSelection select_optimal_c(std::span<const std::pair<double, Index>> path,
                                         std::optional<Index> initial_k = std::nullopt) {
  detail::require(!path.empty(), ErrorCode::invalid_argument, "empty (gamma, c) sequence");
  for (std::size_t i = 1; i < path.size(); ++i) {
    detail::require(path[i].first > path[i - 1].first, ErrorCode::invalid_argument,
                    "gamma values must be strictly increasing");
  }
  PlateauSelection sel;
  sel.runs = plateaus(path);

  const Plateau* best = nullptr;
  double longest = 0.0;
  for (const auto& run : sel.runs) {
    if (run.c == 1) continue;
    if (run.first == 0 && initial_k && run.c == *initial_k) continue;
    if (run.first == run.last) continue;
    longest = std::max(longest, run.length());
  }
  // Widths are sums of floating-point increments; treat near-equal as tied.
  const double slack = 1e-9 * longest;
  for (const auto& run : sel.runs) {
    if (run.c == 1 || run.first == run.last) continue;
    if (run.first == 0 && initial_k && run.c == *initial_k) continue;
    if (run.length() < longest - slack) continue;
    if (!best || run.c < best->c) best = &run;
  }
  if (!best) {
    throw Error(ErrorCode::inconclusive,
                "no cluster count persisted over more than one gamma level; reduce epsilon or raise max_levels");
  }
  sel.c = best->c;
  sel.gamma_lo = best->gamma_lo;
  sel.gamma_hi = best->gamma_hi;
  sel.first_level = best->first;
  sel.last_level = best->last;
  return sel;
}

struct HierarchyPath {
  std::string dataset;
  PathParams params;        // with gamma_start and epsilon resolved
  double merge_tol_abs = 0.0;
  double rms_distance = 0.0;
  std::vector<LevelSolution> levels;
  std::vector<MergeEvent> merges;
  Index initial_k = 0;
  double a = 2.0;

  Index optimal_c = 0;      // 0 when selection was inconclusive
  std::pair<double, double> optimal_gamma_range{0.0, 0.0};
  std::optional<PlateauSelection> selection;
  std::optional<std::string> selection_error;

  std::vector<std::pair<double, Index>> gamma_counts() const {
    std::vector<std::pair<double, Index>> out;
    out.reserve(levels.size());
    for (const auto& level : levels) out.emplace_back(level.gamma, level.c);
    return out;
  }

  /// Middle level of the selected plateau.
  std::optional<std::size_t> optimal_level() const {
    if (!selection) return std::nullopt;
    return selection->first_level + (selection->last_level - selection->first_level) / 2;
  }

  /// First level whose cluster count equals c.
  std::optional<std::size_t> first_level_with(Index c) const {
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (levels[i].c == c) return i;
    }
    return std::nullopt;
  }
};

inline Index initial_cluster_count(Index n, double a) {
  const auto k = static_cast<Index>(std::floor(a * std::sqrt(static_cast<double>(n))));
  return std::clamp<Index>(k, 1, n);
}

/// Runs the gamma sweep: floor(a sqrt(n)) random samples seed the centroids,
/// each level warm-starts from the previous one, gamma grows by epsilon per
/// level, and the sweep ends at stop_at_c clusters or max_levels.
inline HierarchyPath fit_path(const Dataset& ds, const PathParams& params) {
  params.validate();
  detail::require(ds.n() >= 2, ErrorCode::invalid_argument, "a path needs at least two samples");

  HierarchyPath path;
  path.dataset = ds.name;
  path.a = params.a;
  path.rms_distance = rms_pairwise_distance(ds.points);
  path.params = params;
  path.params.gamma_start = params.gamma_start.value_or(0.01 * path.rms_distance);
  path.params.epsilon = params.epsilon.value_or(0.01 * path.rms_distance);
  detail::require(*path.params.gamma_start > 0.0 && *path.params.epsilon > 0.0, ErrorCode::invalid_argument,
                  "automatic gamma schedule needs distinct samples");
  path.merge_tol_abs = params.merge_tol * path.rms_distance;
  path.initial_k = initial_cluster_count(ds.n(), params.a);

  const SolveParams solve{params.tol, params.max_cycles, params.admm, path.merge_tol_abs};
  Rng rng(params.seed);
  CentroidSet u = random_centroids(ds, path.initial_k, rng);
  double gamma = *path.params.gamma_start;
  double step = *path.params.epsilon;

  for (int level = 0; level < params.max_levels; ++level) {
    const std::size_t before = path.merges.size();
    LevelSolution sol = solve_fixed_gamma(ds, u, gamma, solve, &path.merges);
    for (std::size_t e = before; e < path.merges.size(); ++e) path.merges[e].level = level;
    u = sol.centroids;
    const bool done = sol.c <= params.stop_at_c;
    path.levels.push_back(std::move(sol));
    if (done) break;
    gamma += step;
    step *= params.epsilon_growth;
  }

  try {
    const auto counts = path.gamma_counts();
    auto sel = select_optimal_c(counts, path.initial_k);
    path.optimal_c = sel.c;
    path.optimal_gamma_range = {sel.gamma_lo, sel.gamma_hi};
    path.selection = std::move(sel);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::inconclusive) throw;
    path.selection_error = e.what();
  }
  return path;
}

}  // namespace fusecluster
