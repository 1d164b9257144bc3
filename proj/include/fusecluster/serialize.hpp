#pragma once

// JSON encoding of a hierarchy path, plus the DOT and CSV views derived from
// that JSON. Numbers are written with 17 significant digits so identical
// runs produce byte-identical files.

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fusecluster/caf_hfcm.hpp"
#include "fusecluster/dataset.hpp"
#include "fusecluster/error.hpp"

namespace fusecluster {

using Json = nlohmann::ordered_json;

inline Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json data = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return Json{{"dims", {m.rows(), m.cols()}}, {"data", std::move(data)}};
}

inline Eigen::MatrixXd matrix_from_json(const Json& j) {
  const auto rows = j.at("dims").at(0).get<Index>();
  const auto cols = j.at("dims").at(1).get<Index>();
  const auto& data = j.at("data");
  detail::require(static_cast<Index>(data.size()) == rows * cols, ErrorCode::dimension_mismatch,
                  "matrix data length does not match dims");
  Eigen::MatrixXd m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) m(r, c) = data[static_cast<std::size_t>(r * cols + c)].get<double>();
  }
  return m;
}

inline Json params_to_json(const PathParams& p) {
  Json j;
  j["gamma_start"] = p.gamma_start ? Json(*p.gamma_start) : Json(nullptr);
  j["epsilon"] = p.epsilon ? Json(*p.epsilon) : Json(nullptr);
  j["epsilon_growth"] = p.epsilon_growth;
  j["max_levels"] = p.max_levels;
  j["a"] = p.a;
  j["stop_at_c"] = p.stop_at_c;
  j["tol"] = p.tol;
  j["max_cycles"] = p.max_cycles;
  j["admm"] = {{"beta", p.admm.beta},
               {"tol_primal", p.admm.tol_primal},
               {"tol_dual", p.admm.tol_dual},
               {"max_iter", p.admm.max_iter}};
  j["merge_tol"] = p.merge_tol;
  j["seed"] = p.seed;
  return j;
}

inline Json path_to_json(const HierarchyPath& path) {
  Json j;
  j["dataset"] = path.dataset;
  j["params"] = params_to_json(path.params);

  Json levels = Json::array();
  for (const auto& level : path.levels) {
    Json l;
    l["gamma"] = level.gamma;
    l["c"] = level.c;
    l["objective"] = level.objective;
    l["cycles"] = level.cycles;
    l["converged"] = level.converged && level.admm_converged;
    l["assignment"] = level.assignment;
    l["centroids"] = matrix_to_json(level.centroids.u.transpose());  // one row per centroid
    levels.push_back(std::move(l));
  }
  j["levels"] = std::move(levels);

  Json merges = Json::array();
  for (const auto& e : path.merges) {
    merges.push_back(Json{{"gamma", e.gamma}, {"absorbed", e.absorbed}, {"survivor", e.survivor}, {"level", e.level}});
  }
  j["merges"] = std::move(merges);

  if (path.selection) {
    j["optimal_c"] = path.optimal_c;
    j["optimal_gamma_range"] = {path.optimal_gamma_range.first, path.optimal_gamma_range.second};
  } else {
    j["optimal_c"] = nullptr;
    j["optimal_gamma_range"] = nullptr;
  }
  return j;
}

namespace detail {

inline bool is_scalar_array(const Json& j) {
  if (!j.is_array()) return false;
  for (const auto& e : j) {
    if (e.is_structured()) return false;
  }
  return true;
}

inline void write_scalar(std::ostream& out, const Json& j) {
  if (j.is_number_float()) {
    const double x = j.get<double>();
    if (std::isfinite(x)) {
      out << format_real(x);
    } else {
      out << "null";
    }
  } else {
    out << j.dump();
  }
}

inline void write_json(std::ostream& out, const Json& j, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out << "{}";
      return;
    }
    out << "{\n";
    bool first = true;
    for (const auto& [key, value] : j.items()) {
      if (!first) out << ",\n";
      first = false;
      out << pad << Json(key).dump() << ": ";
      write_json(out, value, depth + 1);
    }
    out << "\n" << close << "}";
  } else if (j.is_array()) {
    if (is_scalar_array(j)) {
      out << "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) out << ", ";
        write_scalar(out, j[i]);
      }
      out << "]";
      return;
    }
    out << "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i > 0) out << ",\n";
      out << pad;
      write_json(out, j[i], depth + 1);
    }
    out << "\n" << close << "]";
  } else {
    write_scalar(out, j);
  }
}

}  // namespace detail

/// Pretty-printed JSON with every floating-point value at 17 significant
/// digits. Arrays of scalars stay on one line.
inline std::string dump_json(const Json& j) {
  std::ostringstream out;
  detail::write_json(out, j, 0);
  out << "\n";
  return out.str();
}

/// Cluster count before the first level: the first level's count plus
/// everything merged away during it.
inline Index initial_count_from_json(const Json& path) {
  const auto& levels = path.at("levels");
  detail::require(!levels.empty(), ErrorCode::invalid_argument, "path has no levels");
  Index k = levels.at(0).at("c").get<Index>();
  for (const auto& e : path.at("merges")) {
    if (e.at("level").get<Index>() == 0) k += static_cast<Index>(e.at("absorbed").size()) - 1;
  }
  return k;
}

/// Replays the merge events level by level and checks each level's count.
/// Returns, per level, the map from the previous level's cluster indices to
/// this level's.
inline std::vector<std::vector<Index>> replay_levels(const Json& path) {
  const auto& levels = path.at("levels");
  const auto& merges = path.at("merges");
  std::vector<std::vector<Index>> maps;
  Index count = initial_count_from_json(path);
  std::size_t next = 0;
  for (std::size_t level = 0; level < levels.size(); ++level) {
    std::vector<Index> map(static_cast<std::size_t>(count));
    for (Index i = 0; i < count; ++i) map[static_cast<std::size_t>(i)] = i;
    Index current = count;
    while (next < merges.size() && merges[next].at("level").get<std::size_t>() == level) {
      MergeEvent e;
      e.absorbed = merges[next].at("absorbed").get<std::vector<Index>>();
      const auto step = replay_merge(current, e);
      for (auto& m : map) m = step[static_cast<std::size_t>(m)];
      current -= static_cast<Index>(e.absorbed.size()) - 1;
      ++next;
    }
    const auto expected = levels[level].at("c").get<Index>();
    detail::require(current == expected, ErrorCode::invalid_argument,
                    "merge replay gives " + std::to_string(current) + " clusters at level " + std::to_string(level) +
                        " but the level records " + std::to_string(expected));
    maps.push_back(std::move(map));
    count = current;
  }
  detail::require(next == merges.size(), ErrorCode::invalid_argument, "merge events refer to missing levels");
  return maps;
}

/// Dendrogram-style digraph: an initial row of K0 nodes, one node per
/// (level, cluster), and an edge from every cluster to its successor at the
/// next level. Nodes created by a merge are boxed and labelled with gamma.
inline std::string hierarchy_dot(const Json& path) {
  const auto maps = replay_levels(path);
  const auto& levels = path.at("levels");
  std::ostringstream out;
  out << "digraph hierarchy {\n  rankdir=TB;\n  node [shape=circle, fontsize=10];\n";
  const Index k0 = initial_count_from_json(path);
  out << "  { rank=same;";
  for (Index i = 0; i < k0; ++i) out << " init_" << i << ";";
  out << " }\n";
  for (Index i = 0; i < k0; ++i) out << "  init_" << i << " [label=\"" << i << "\", shape=point];\n";

  std::string prev = "init_";
  for (std::size_t level = 0; level < levels.size(); ++level) {
    const auto c = levels[level].at("c").get<Index>();
    const auto& map = maps[level];
    std::vector<int> sources(static_cast<std::size_t>(c), 0);
    for (Index target : map) ++sources[static_cast<std::size_t>(target)];
    const std::string gamma = detail::format_real(levels[level].at("gamma").get<double>());
    const std::string tag = "L" + std::to_string(level) + "_";
    out << "  { rank=same;";
    for (Index j = 0; j < c; ++j) out << " " << tag << j << ";";
    out << " }\n";
    for (Index j = 0; j < c; ++j) {
      out << "  " << tag << j;
      if (sources[static_cast<std::size_t>(j)] > 1) {
        out << " [shape=box, label=\"" << j << "\\ngamma=" << gamma << "\"]";
      } else {
        out << " [label=\"" << j << "\"]";
      }
      out << ";\n";
    }
    for (std::size_t i = 0; i < map.size(); ++i) out << "  " << prev << i << " -> " << tag << map[i] << ";\n";
    prev = tag;
  }
  out << "}\n";
  return out.str();
}

/// One row per level: level,gamma,c,objective.
inline std::string levels_csv(const Json& path) {
  std::ostringstream out;
  out << "level,gamma,c,objective\n";
  const auto& levels = path.at("levels");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    out << i << "," << detail::format_real(levels[i].at("gamma").get<double>()) << "," << levels[i].at("c").get<Index>() << ","
        << detail::format_real(levels[i].at("objective").get<double>()) << "\n";
  }
  return out.str();
}

}  // namespace fusecluster
