#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fusecluster/error.hpp"
#include "fusecluster/random.hpp"

namespace fusecluster {

using Index = Eigen::Index;

/// Samples stored column-wise: `points` is d x n.
///
/// Labels are optional ground truth. Loaded labels are dense and
/// nonnegative; the noisy generator marks background noise with -1.
struct Dataset {
  Eigen::MatrixXd points;
  std::optional<std::vector<int>> labels;
  std::vector<std::string> feature_names;
  std::string name;

  Index d() const { return points.rows(); }
  Index n() const { return points.cols(); }
  bool has_labels() const { return labels.has_value(); }

  void validate() const {
    detail::require(d() >= 1 && n() >= 1, ErrorCode::empty_input, "dataset needs d >= 1 and n >= 1");
    detail::require(points.allFinite(), ErrorCode::non_numeric, "dataset contains non-finite values");
    if (labels) {
      detail::require(static_cast<Index>(labels->size()) == n(), ErrorCode::dimension_mismatch,
                      "label count " + std::to_string(labels->size()) + " != sample count " +
                          std::to_string(n()));
    }
    if (!feature_names.empty()) {
      detail::require(static_cast<Index>(feature_names.size()) == d(), ErrorCode::dimension_mismatch,
                      "feature name count does not match d");
    }
  }
};

namespace detail {

inline std::string format_real(double x) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", x);
  return buf.data();
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  s = s.substr(first, last - first + 1);
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\''))) {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

inline std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

// Space or tab delimiters collapse runs of whitespace; any other delimiter
// separates fields one-for-one (empty fields preserved).
inline std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
  std::vector<std::string_view> out;
  if (delimiter == ' ' || delimiter == '\t') {
    std::size_t pos = 0;
    while (true) {
      pos = line.find_first_not_of(" \t\r", pos);
      if (pos == std::string_view::npos) break;
      const auto end = line.find_first_of(" \t\r", pos);
      out.push_back(line.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
      if (end == std::string_view::npos) break;
      pos = end;
    }
    return out;
  }
  std::size_t start = 0;
  while (true) {
    const auto end = line.find(delimiter, start);
    out.push_back(trim(line.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start)));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

}  // namespace detail

/// Parses delimited text with samples as rows.
///
/// Blank lines and lines starting with `#` are skipped. The first remaining
/// row is treated as a header when any of its feature fields is non-numeric.
/// With `has_labels`, the last column holds class labels of any spelling;
/// they are mapped to 0..(classes-1) in order of first appearance.
inline Dataset load_csv(std::istream& in, bool has_labels, char delimiter = ',', std::string name = "csv") {
  Dataset ds;
  ds.name = std::move(name);
  std::vector<double> values;
  std::vector<int> labels;
  std::unordered_map<std::string, int> label_ids;
  std::size_t width = 0;
  std::size_t rows = 0;
  bool first_row = true;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const auto stripped = detail::trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const auto fields = detail::split_fields(line, delimiter);
    detail::require(!fields.empty() && (!has_labels || fields.size() >= 2), ErrorCode::ragged_rows,
                    "line " + std::to_string(line_no) + ": too few fields");
    const std::size_t n_features = has_labels ? fields.size() - 1 : fields.size();

    if (first_row) {
      first_row = false;
      width = fields.size();
      bool numeric = true;
      for (std::size_t f = 0; f < n_features; ++f) numeric = numeric && detail::parse_real(fields[f]).has_value();
      if (!numeric) {
        for (std::size_t f = 0; f < n_features; ++f) ds.feature_names.emplace_back(fields[f]);
        continue;
      }
    }
    detail::require(fields.size() == width, ErrorCode::ragged_rows,
                    "line " + std::to_string(line_no) + ": expected " + std::to_string(width) + " fields, found " +
                        std::to_string(fields.size()));
    for (std::size_t f = 0; f < n_features; ++f) {
      const auto v = detail::parse_real(fields[f]);
      detail::require(v.has_value(), ErrorCode::non_numeric,
                      "line " + std::to_string(line_no) + ", column " + std::to_string(f + 1) + ": '" +
                          std::string(fields[f]) + "' is not a finite number");
      values.push_back(*v);
    }
    if (has_labels) {
      const std::string key(detail::trim(fields.back()));
      const auto [it, inserted] = label_ids.try_emplace(key, static_cast<int>(label_ids.size()));
      labels.push_back(it->second);
    }
    ++rows;
  }
  detail::require(!in.bad(), ErrorCode::io, "read failure");
  detail::require(rows > 0, ErrorCode::empty_input, "no data rows");

  const auto d = static_cast<Index>(has_labels ? width - 1 : width);
  ds.points = Eigen::Map<const Eigen::MatrixXd>(values.data(), d, static_cast<Index>(rows));
  if (has_labels) ds.labels = std::move(labels);
  return ds;
}

inline Dataset load_csv(const std::filesystem::path& path, bool has_labels, char delimiter = ',') {
  std::ifstream in(path);
  detail::require(static_cast<bool>(in), ErrorCode::io, "cannot open '" + path.string() + "'");
  return load_csv(in, has_labels, delimiter, path.stem().string());
}

/// Writes samples as rows with 17 significant digits; labels (if any) last.
inline void save_csv(std::ostream& out, const Dataset& ds) {
  if (!ds.feature_names.empty()) {
    for (Index f = 0; f < ds.d(); ++f) out << (f ? "," : "") << ds.feature_names[static_cast<std::size_t>(f)];
    if (ds.labels) out << ",label";
    out << '\n';
  }
  for (Index i = 0; i < ds.n(); ++i) {
    for (Index f = 0; f < ds.d(); ++f) out << (f ? "," : "") << detail::format_real(ds.points(f, i));
    if (ds.labels) out << ',' << (*ds.labels)[static_cast<std::size_t>(i)];
    out << '\n';
  }
}

inline void save_csv(const std::filesystem::path& path, const Dataset& ds) {
  std::ofstream out(path);
  detail::require(static_cast<bool>(out), ErrorCode::io, "cannot write '" + path.string() + "'");
  save_csv(out, ds);
  detail::require(static_cast<bool>(out), ErrorCode::io, "write failure on '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Synthetic generators

enum class GeneratorKind { gaussian_mixture_2d, gaussian_mixture_20d, gaussian_grid, uniform_blocks_noisy };

inline std::string_view to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::gaussian_mixture_2d: return "gaussian-mixture-2d";
    case GeneratorKind::gaussian_mixture_20d: return "gaussian-mixture-20d";
    case GeneratorKind::gaussian_grid: return "gaussian-grid";
    case GeneratorKind::uniform_blocks_noisy: return "uniform-blocks-noisy";
  }
  return "unknown";
}

inline GeneratorKind parse_generator_kind(std::string_view s) {
  for (auto k : {GeneratorKind::gaussian_mixture_2d, GeneratorKind::gaussian_mixture_20d, GeneratorKind::gaussian_grid,
                 GeneratorKind::uniform_blocks_noisy}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorCode::invalid_argument, "unknown generator kind '" + std::string(s) + "'");
}

/// Recognised `extra` keys, all optional:
///   gaussian-mixture-*: sigma (1.0)
///   gaussian-grid:      sigma (0.5), grid_i (5), grid_j (5), spacing (10)
///   uniform-blocks-noisy: blocks (13), noise (100), block_width (1), pitch (4)
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::gaussian_grid;
  Index n = 500;
  std::uint64_t seed = 0;
  std::map<std::string, double> extra;

  static GeneratorSpec defaults(GeneratorKind kind, std::uint64_t seed = 0) {
    GeneratorSpec spec;
    spec.kind = kind;
    spec.seed = seed;
    switch (kind) {
      case GeneratorKind::gaussian_mixture_2d:
      case GeneratorKind::gaussian_mixture_20d: spec.n = 300; break;
      case GeneratorKind::gaussian_grid: spec.n = 500; break;
      case GeneratorKind::uniform_blocks_noisy: spec.n = 750; break;
    }
    return spec;
  }

  double get(const std::string& key, double fallback) const {
    const auto it = extra.find(key);
    return it == extra.end() ? fallback : it->second;
  }
};

/// Component means of the two-dimensional six-component mixture: one
/// component at the origin and five on a regular pentagon of radius 18
/// around it. The origin is the geometric median of the six means.
inline constexpr std::array<std::array<double, 2>, 6> kMixtureMeans2d{{
    {0.0, 0.0},
    {0.0, 18.0},
    {-17.119017293312762, 5.562305898749055},
    {-10.580134541264519, -14.562305898749052},
    {10.580134541264513, -14.562305898749056},
    {17.119017293312766, 5.562305898749049},
}};

/// In 20 dimensions the five outer means sit at distance 18 along the first
/// five coordinate axes, so outer means are 18 sqrt(2) apart.
inline constexpr double kMixtureRadius20d = 18.0;

namespace detail {

// Splits `total` items over `groups` as evenly as possible, extras first.
inline std::vector<Index> group_sizes(Index total, Index groups) {
  std::vector<Index> sizes(static_cast<std::size_t>(groups), total / groups);
  for (Index g = 0; g < total % groups; ++g) ++sizes[static_cast<std::size_t>(g)];
  return sizes;
}

inline Dataset gaussian_components(const std::vector<Eigen::VectorXd>& means, double sigma, Index n, Rng& rng) {
  const Index d = means.front().size();
  Dataset ds;
  ds.points.resize(d, n);
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(n));
  Index col = 0;
  const auto sizes = group_sizes(n, static_cast<Index>(means.size()));
  for (std::size_t c = 0; c < means.size(); ++c) {
    for (Index k = 0; k < sizes[c]; ++k, ++col) {
      for (Index f = 0; f < d; ++f) ds.points(f, col) = means[c](f) + sigma * standard_normal(rng);
      labels.push_back(static_cast<int>(c));
    }
  }
  ds.labels = std::move(labels);
  return ds;
}

}  // namespace detail

/// Deterministic synthetic data; the same spec always yields the same bits.
inline Dataset generate(const GeneratorSpec& spec) {
  detail::require(spec.n > 0, ErrorCode::invalid_argument, "generator sample count must be positive");
  Rng rng(spec.seed);
  Dataset ds;

  switch (spec.kind) {
    case GeneratorKind::gaussian_mixture_2d:
    case GeneratorKind::gaussian_mixture_20d: {
      const Index d = spec.kind == GeneratorKind::gaussian_mixture_2d ? 2 : 20;
      const double sigma = spec.get("sigma", 1.0);
      detail::require(sigma > 0, ErrorCode::invalid_argument, "sigma must be positive");
      detail::require(spec.n >= 6, ErrorCode::invalid_argument, "mixture needs at least 6 samples");
      std::vector<Eigen::VectorXd> means;
      if (d == 2) {
        for (const auto& m : kMixtureMeans2d) means.push_back(Eigen::Vector2d(m[0], m[1]));
      } else {
        means.push_back(Eigen::VectorXd::Zero(d));
        for (Index axis = 0; axis < 5; ++axis) {
          means.push_back(kMixtureRadius20d * Eigen::VectorXd::Unit(d, axis));
        }
      }
      ds = detail::gaussian_components(means, sigma, spec.n, rng);
      break;
    }
    case GeneratorKind::gaussian_grid: {
      const double sigma = spec.get("sigma", 0.5);
      const auto gi = static_cast<Index>(spec.get("grid_i", 5));
      const auto gj = static_cast<Index>(spec.get("grid_j", 5));
      const double spacing = spec.get("spacing", 10.0);
      detail::require(sigma > 0 && gi > 0 && gj > 0 && spacing > 0, ErrorCode::invalid_argument,
                      "gaussian-grid parameters must be positive");
      detail::require(spec.n >= gi * gj, ErrorCode::invalid_argument, "gaussian-grid needs n >= grid size");
      std::vector<Eigen::VectorXd> means;
      for (Index i = 0; i < gi; ++i) {
        for (Index j = 0; j < gj; ++j) {
          means.push_back(Eigen::Vector2d(1.0 + spacing * static_cast<double>(i), 1.0 + spacing * static_cast<double>(j)));
        }
      }
      ds = detail::gaussian_components(means, sigma, spec.n, rng);
      break;
    }
    case GeneratorKind::uniform_blocks_noisy: {
      const auto blocks = static_cast<Index>(spec.get("blocks", 13));
      const auto noise = static_cast<Index>(spec.get("noise", 100));
      const double width = spec.get("block_width", 1.0);
      const double pitch = spec.get("pitch", 4.0);
      detail::require(blocks > 0 && noise >= 0 && width > 0 && pitch > width, ErrorCode::invalid_argument,
                      "uniform-blocks parameters out of range");
      detail::require(spec.n - noise >= blocks, ErrorCode::invalid_argument,
                      "uniform-blocks needs at least one point per block");
      // Blocks fill a 4-column lattice in row-major order.
      const Index columns = 4;
      const auto sizes = detail::group_sizes(spec.n - noise, blocks);
      ds.points.resize(2, spec.n);
      std::vector<int> labels;
      Index col = 0;
      double xmax = 0, ymax = 0;
      for (Index b = 0; b < blocks; ++b) {
        const double cx = pitch * static_cast<double>(b % columns);
        const double cy = pitch * static_cast<double>(b / columns);
        xmax = std::max(xmax, cx);
        ymax = std::max(ymax, cy);
        for (Index k = 0; k < sizes[static_cast<std::size_t>(b)]; ++k, ++col) {
          ds.points(0, col) = uniform(rng, cx - width / 2, cx + width / 2);
          ds.points(1, col) = uniform(rng, cy - width / 2, cy + width / 2);
          labels.push_back(static_cast<int>(b));
        }
      }
      for (Index k = 0; k < noise; ++k, ++col) {
        ds.points(0, col) = uniform(rng, -width / 2, xmax + width / 2);
        ds.points(1, col) = uniform(rng, -width / 2, ymax + width / 2);
        labels.push_back(-1);
      }
      ds.labels = std::move(labels);
      break;
    }
  }
  ds.name = std::string(to_string(spec.kind));
  for (Index f = 0; f < ds.d(); ++f) ds.feature_names.push_back("x" + std::to_string(f + 1));
  return ds;
}

/// Per-feature z-scores with the sample (n-1) standard deviation.
/// Zero-variance features are centred only.
inline Dataset standardize(const Dataset& ds) {
  detail::require(ds.n() >= 2, ErrorCode::invalid_argument, "standardize needs at least two samples");
  Dataset out = ds;
  const double denom = static_cast<double>(ds.n() - 1);
  for (Index f = 0; f < ds.d(); ++f) {
    auto row = out.points.row(f);
    const double mean = row.mean();
    row.array() -= mean;
    const double sd = std::sqrt(row.squaredNorm() / denom);
    if (sd > 0.0) row /= sd;
  }
  return out;
}

/// Root-mean-square Euclidean distance over all sample pairs, computed in
/// O(nd) from the identity sum_{i<j} |x_i - x_j|^2 = n * sum_i |x_i - mean|^2.
inline double rms_pairwise_distance(const Eigen::MatrixXd& points) {
  const Index n = points.cols();
  if (n < 2) return 0.0;
  const Eigen::VectorXd mean = points.rowwise().mean();
  const double scatter = (points.colwise() - mean).squaredNorm();
  return std::sqrt(2.0 * scatter / static_cast<double>(n - 1));
}

}  // namespace fusecluster
