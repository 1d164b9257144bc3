// fusecluster command-line tool: gen, fit, path, bench, export.
//
// Exit codes: 0 success, 2 usage or input error, 3 no plateau found,
// 1 anything else.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fusecluster/fusecluster.hpp"

namespace fc = fusecluster;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInconclusive = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  // gen
  std::string kind;
  std::optional<fc::Index> n;

  // shared
  std::uint64_t seed = 1;
  std::string input;
  std::string output;
  bool standardize = false;
  bool no_labels = false;
  std::string delimiter = ",";

  // fit
  std::string alg;
  std::optional<fc::Index> k;
  std::optional<double> gamma;

  // path and fit tuning
  std::optional<double> gamma_start;
  std::optional<double> epsilon;
  double epsilon_growth = 1.0;
  int max_levels = 200;
  double a = 2.0;
  double beta = 1.0;
  double tol = 1e-6;
  std::optional<int> max_iter;
  int admm_max_iter = 500;
  double admm_tol = 1e-5;
  double merge_tol = 1e-4;
  fc::Index stop_at_c = 1;
  std::string dot;

  // bench
  std::string suite;
  std::string data_dir = ".";
  int repeats = 20;
  std::string format;
  std::string nmi = "geometric";
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw fc::Error(fc::ErrorCode::io, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw fc::Error(fc::ErrorCode::io, "write to '" + path + "' failed");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw fc::Error(fc::ErrorCode::io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

char parse_delimiter(const std::string& s) {
  if (s == "tab" || s == "\\t") return '\t';
  if (s == "space" || s == "whitespace") return ' ';
  if (s.size() != 1) throw UsageError("--delimiter must be a single character, 'tab' or 'space'");
  return s.front();
}

fc::Dataset load_input(const Options& o) {
  if (o.input.empty()) throw UsageError("an input CSV file is required");
  fc::Dataset ds = fc::load_csv(o.input, !o.no_labels, parse_delimiter(o.delimiter));
  if (o.standardize) ds = fc::standardize(ds);
  return ds;
}

fc::NmiNormalization nmi_norm(const Options& o) {
  return o.nmi == "arithmetic" ? fc::NmiNormalization::arithmetic : fc::NmiNormalization::geometric;
}

std::string score_line(const std::vector<int>& pred, const fc::Dataset& ds, fc::NmiNormalization norm) {
  const auto s = fc::score(pred, *ds.labels, norm);
  return "RI=" + fc::detail::format_real(s.ri) + " ARI=" + fc::detail::format_real(s.ari) +
         " NMI=" + fc::detail::format_real(s.nmi);
}

fc::PathParams path_params(const Options& o) {
  fc::PathParams p;
  p.gamma_start = o.gamma_start;
  p.epsilon = o.epsilon;
  p.epsilon_growth = o.epsilon_growth;
  p.max_levels = o.max_levels;
  p.a = o.a;
  p.stop_at_c = o.stop_at_c;
  p.tol = o.tol;
  p.max_cycles = o.max_iter.value_or(300);
  p.admm.beta = o.beta;
  p.admm.tol_primal = o.admm_tol;
  p.admm.tol_dual = o.admm_tol;
  p.admm.max_iter = o.admm_max_iter;
  p.merge_tol = o.merge_tol;
  p.seed = o.seed;
  return p;
}

int cmd_gen(const Options& o) {
  auto spec = fc::GeneratorSpec::defaults(fc::parse_generator_kind(o.kind), o.seed);
  if (o.n) spec.n = *o.n;
  std::ostringstream out;
  fc::save_csv(out, fc::generate(spec));
  write_text(o.output, out.str());
  return kExitOk;
}

int cmd_fit(const Options& o) {
  const fc::Dataset ds = load_input(o);
  fc::Json j;
  j["dataset"] = ds.name;
  j["algorithm"] = o.alg;
  j["seed"] = o.seed;
  std::vector<int> assignment;

  if (o.alg == "fcm" || o.alg == "kmeans") {
    if (!o.k) throw UsageError("--k is required for --alg " + o.alg);
    fc::FcmParams fp;
    fp.tol = o.tol;
    fp.max_iter = o.max_iter.value_or(300);
    fp.seed = o.seed;
    j["k"] = *o.k;
    if (o.alg == "fcm") {
      const auto r = fc::fcm_fit(ds, *o.k, fp);
      assignment = fc::hard_assignment(r.p);
      j["objective"] = r.objective_trace.back();
      j["iterations"] = r.iterations;
      j["converged"] = r.converged;
      j["centroids"] = fc::matrix_to_json(r.centroids.u.transpose());
    } else {
      const auto r = fc::kmeans_fit(ds, *o.k, fp);
      assignment = r.assignment;
      j["objective"] = r.wcss_trace.empty() ? 0.0 : r.wcss_trace.back();
      j["iterations"] = r.iterations;
      j["converged"] = r.converged;
      j["centroids"] = fc::matrix_to_json(r.centroids.u.transpose());
    }
  } else if (o.alg == "caf-fixed") {
    if (!o.gamma) throw UsageError("--gamma is required for --alg caf-fixed");
    const fc::Index k = o.k.value_or(fc::initial_cluster_count(ds.n(), o.a));
    const fc::PathParams pp = path_params(o);
    pp.validate();
    fc::Rng rng(o.seed);
    const auto init = fc::random_centroids(ds, k, rng);
    const double scale = fc::rms_pairwise_distance(ds.points);
    const fc::SolveParams sp{pp.tol, pp.max_cycles, pp.admm, pp.merge_tol * scale};
    const auto sol = fc::solve_fixed_gamma(ds, init, *o.gamma, sp);
    assignment = sol.assignment;
    j["k"] = k;
    j["gamma"] = *o.gamma;
    j["c"] = sol.c;
    j["objective"] = sol.objective;
    j["data_term"] = fc::fcm_objective(ds, sol.p, sol.centroids, 2.0);
    j["iterations"] = sol.cycles;
    j["converged"] = sol.converged && sol.admm_converged;
    j["centroids"] = fc::matrix_to_json(sol.centroids.u.transpose());
  } else {
    throw UsageError("--alg must be one of fcm, kmeans, caf-fixed");
  }
  j["assignment"] = assignment;
  write_text(o.output, fc::dump_json(j));
  if (ds.has_labels()) std::cerr << o.alg << " " << score_line(assignment, ds, nmi_norm(o)) << "\n";
  return kExitOk;
}

int cmd_path(const Options& o) {
  const fc::Dataset ds = load_input(o);
  const auto path = fc::fit_path(ds, path_params(o));
  const fc::Json j = fc::path_to_json(path);
  write_text(o.output, fc::dump_json(j));
  if (!o.dot.empty()) write_text(o.dot, fc::hierarchy_dot(j));
  std::cerr << "levels=" << path.levels.size() << " final_c=" << path.levels.back().c;
  if (!path.selection) {
    std::cerr << "\n" << *path.selection_error << "\n";
    return kExitInconclusive;
  }
  std::cerr << " optimal_c=" << path.optimal_c << " gamma_range=[" << fc::detail::format_real(path.optimal_gamma_range.first)
            << ", " << fc::detail::format_real(path.optimal_gamma_range.second) << "]";
  if (ds.has_labels()) std::cerr << " " << score_line(path.levels[*path.optimal_level()].assignment, ds, nmi_norm(o));
  std::cerr << "\n";
  return kExitOk;
}

int cmd_export(const Options& o) {
  if (o.input.empty()) throw UsageError("a path JSON file is required");
  fc::Json j;
  try {
    j = fc::Json::parse(read_text(o.input));
  } catch (const nlohmann::json::exception& e) {
    throw fc::Error(fc::ErrorCode::invalid_argument, "'" + o.input + "' is not valid path JSON: " + e.what());
  }
  const std::string format = o.format.empty() ? "dot" : o.format;
  if (format == "dot") {
    write_text(o.output, fc::hierarchy_dot(j));
  } else if (format == "csv") {
    write_text(o.output, fc::levels_csv(j));
  } else if (format == "json") {
    write_text(o.output, fc::dump_json(j));
  } else {
    throw UsageError("--format for export must be dot, csv or json");
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench

struct Reference {
  double ri, ari, nmi;
};

// Published RL-FCM scores; that method is not part of this library.
const std::map<std::string, Reference>& rlfcm_reference() {
  static const std::map<std::string, Reference> table{
      {"gaussian-mixture-2d", {0.9934, 0.9760, 0.9726}},
      {"gaussian-mixture-20d", {1.0, 1.0, 1.0}},
      {"gaussian-grid", {1.0, 1.0, 1.0}},
      {"iris", {0.8859, 0.7445, 0.7777}},
      {"breast", {0.9099, 0.8179, 0.7096}},
      {"seeds", {0.8744, 0.7166, 0.6949}},
  };
  return table;
}

struct Cell {
  std::size_t dataset = 0;
  std::uint64_t seed = 0;
  std::optional<fc::ValidityScores> caf;
  fc::Index caf_c = 0;
  fc::ValidityScores fcm;
  fc::ValidityScores kmeans;
  std::string error;
};

struct BenchData {
  std::string name;
  fc::Dataset ds;
  const fc::SuiteEntry* entry = nullptr;
};

std::optional<fc::Dataset> load_uci(const std::string& name, const fs::path& dir) {
  if (name == "seeds") {
    const fs::path p = dir / "seeds_dataset.txt";
    if (!fs::exists(p)) return std::nullopt;
    return fc::load_csv(p, true, ' ');
  }
  const fs::path p = dir / (name + ".csv");
  if (!fs::exists(p)) return std::nullopt;
  return fc::load_csv(p, true, ',');
}

unsigned thread_budget() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FUSECLUSTER_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    } catch (const std::exception&) {
      throw UsageError("FUSECLUSTER_THREADS must be a positive integer");
    }
  }
  return n;
}

void run_cell(const BenchData& data, Cell& cell, fc::NmiNormalization norm) {
  const auto& ds = data.ds;
  const auto& truth = *ds.labels;
  const fc::Index c = data.entry->true_c;

  fc::PathParams pp = data.entry->schedule;
  pp.seed = cell.seed;
  const auto path = fc::fit_path(ds, pp);
  std::optional<std::size_t> level;
  if (data.name == "uniform-blocks-noisy") {
    level = fc::middle_of_run(path, c);  // robustness row compares at the true count
  } else {
    level = path.optimal_level();
  }
  if (level) {
    cell.caf = fc::score(path.levels[*level].assignment, truth, norm);
    cell.caf_c = path.levels[*level].c;
  }

  fc::FcmParams fp;
  fp.seed = cell.seed;
  cell.fcm = fc::score(fc::hard_assignment(fc::fcm_fit(ds, c, fp).p), truth, norm);
  cell.kmeans = fc::score(fc::kmeans_fit(ds, c, fp).assignment, truth, norm);
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {std::nan(""), std::nan("")};
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double q = 0.0;
  for (double x : v) q += (x - m) * (x - m);
  const double sd = v.size() > 1 ? std::sqrt(q / static_cast<double>(v.size() - 1)) : 0.0;
  return {m, sd};
}

std::string fixed4(double x) {
  if (std::isnan(x)) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

int cmd_bench(const Options& o) {
  std::vector<std::string> names;
  if (o.suite == "synthetic") {
    names = {"gaussian-mixture-2d", "gaussian-mixture-20d", "gaussian-grid", "uniform-blocks-noisy"};
  } else if (o.suite == "uci") {
    names = {"iris", "breast", "seeds"};
  } else {
    throw UsageError("--suite must be synthetic or uci");
  }
  if (o.repeats < 1) throw UsageError("--repeats must be at least 1");
  const std::string format = o.format.empty() ? "md" : o.format;
  if (format != "md" && format != "csv") throw UsageError("--format for bench must be md or csv");

  std::vector<BenchData> data;
  std::vector<std::string> skipped;
  for (const auto& name : names) {
    BenchData d;
    d.name = name;
    d.entry = &fc::suite_entry(name);
    if (o.suite == "synthetic") {
      d.ds = fc::generate(fc::GeneratorSpec::defaults(fc::parse_generator_kind(name), o.seed));
    } else {
      auto loaded = load_uci(name, o.data_dir);
      if (!loaded) {
        skipped.push_back(name);
        continue;
      }
      d.ds = std::move(*loaded);
    }
    if (o.standardize) d.ds = fc::standardize(d.ds);
    data.push_back(std::move(d));
  }

  std::vector<Cell> cells;
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (int r = 0; r < o.repeats; ++r) cells.push_back({i, static_cast<std::uint64_t>(r + 1)});
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        run_cell(data[cells[i].dataset], cells[i], nmi_norm(o));
      } catch (const std::exception& e) {
        cells[i].error = e.what();
      }
    }
  };
  const unsigned threads = std::min<unsigned>(thread_budget(), static_cast<unsigned>(std::max<std::size_t>(cells.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostringstream out;
  if (format == "md") {
    out << "| Dataset | Index | CAF-HFCM | RL-FCM (reference, not reimplemented) | FCM | k-means | CAF-HFCM c |\n";
    out << "|---|---|---|---|---|---|---|\n";
  } else {
    out << "dataset,index,caf_mean,caf_std,rlfcm_reference,fcm_mean,fcm_std,kmeans_mean,kmeans_std,caf_c,caf_c_hits,"
           "repeats\n";
  }
  int failures = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::vector<double> caf[3], fcm[3], km[3];
    std::map<fc::Index, int> counts;
    for (const auto& cell : cells) {
      if (cell.dataset != i) continue;
      if (!cell.error.empty()) {
        std::cerr << data[i].name << " seed " << cell.seed << ": " << cell.error << "\n";
        ++failures;
        continue;
      }
      if (cell.caf) {
        caf[0].push_back(cell.caf->ri);
        caf[1].push_back(cell.caf->ari);
        caf[2].push_back(cell.caf->nmi);
        ++counts[cell.caf_c];
      }
      fcm[0].push_back(cell.fcm.ri);
      fcm[1].push_back(cell.fcm.ari);
      fcm[2].push_back(cell.fcm.nmi);
      km[0].push_back(cell.kmeans.ri);
      km[1].push_back(cell.kmeans.ari);
      km[2].push_back(cell.kmeans.nmi);
    }
    fc::Index mode = 0;
    int hits = 0;
    for (const auto& [c, n] : counts) {
      if (n > hits) {
        mode = c;
        hits = n;
      }
    }
    const auto ref = rlfcm_reference().find(data[i].name);
    const char* index_names[3] = {"RI", "ARI", "NMI"};
    for (int m = 0; m < 3; ++m) {
      const auto [cm, cs] = mean_std(caf[m]);
      const auto [fm, fs] = mean_std(fcm[m]);
      const auto [km_, ks] = mean_std(km[m]);
      double refv = std::nan("");
      if (ref != rlfcm_reference().end()) refv = m == 0 ? ref->second.ri : m == 1 ? ref->second.ari : ref->second.nmi;
      if (format == "md") {
        out << "| " << (m == 0 ? data[i].name : "") << " | " << index_names[m] << " | " << fixed4(cm) << " ± "
            << fixed4(cs) << " | " << fixed4(refv) << " | " << fixed4(fm) << " ± " << fixed4(fs) << " | " << fixed4(km_)
            << " ± " << fixed4(ks) << " | ";
        if (m == 0) out << mode << " (" << hits << "/" << o.repeats << ")";
        out << " |\n";
      } else {
        out << data[i].name << "," << index_names[m] << "," << fc::detail::format_real(cm) << ","
            << fc::detail::format_real(cs) << "," << fc::detail::format_real(refv) << ","
            << fc::detail::format_real(fm) << "," << fc::detail::format_real(fs) << ","
            << fc::detail::format_real(km_) << "," << fc::detail::format_real(ks) << "," << mode << "," << hits
            << "," << o.repeats << "\n";
      }
    }
  }
  write_text(o.output, out.str());
  for (const auto& name : skipped) {
    std::cerr << "skipped " << name << ": no data file in '" << o.data_dir << "'\n";
  }
  if (failures > 0) return kExitInternal;
  return skipped.empty() ? kExitOk : kExitUsage;
}

int exit_code_for(fc::ErrorCode code) {
  switch (code) {
    case fc::ErrorCode::inconclusive: return kExitInconclusive;
    case fc::ErrorCode::degenerate_cluster: return kExitInternal;
    default: return kExitUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fuzzy c-means with fused centroids: fixed-gamma fits, gamma paths and benchmarks"};
  app.require_subcommand(1);
  Options o;

  auto add_data_flags = [&o](CLI::App* cmd) {
    cmd->add_option("input", o.input, "Input CSV (samples as rows, label in the last column)");
    cmd->add_flag("--standardize", o.standardize, "Scale every feature to zero mean and unit variance");
    cmd->add_flag("--no-labels", o.no_labels, "Treat every column as a feature");
    cmd->add_option("--delimiter", o.delimiter, "Field delimiter: a character, 'tab' or 'space'");
  };
  auto add_nmi_flag = [&o](CLI::App* cmd) {
    cmd->add_option("--nmi", o.nmi, "NMI normalization: geometric (sqrt) or arithmetic mean of the entropies")
        ->check(CLI::IsMember({"geometric", "arithmetic"}));
  };
  auto add_solver_flags = [&o](CLI::App* cmd) {
    cmd->add_option("--seed", o.seed, "Random seed for initial centroids");
    cmd->add_option("--a", o.a, "Initial cluster count is floor(a sqrt(n)), a in [1, 3]");
    cmd->add_option("--beta", o.beta, "ADMM penalty parameter");
    cmd->add_option("--tol", o.tol, "Relative objective change that ends the outer loop");
    cmd->add_option("--max-iter", o.max_iter, "Outer iteration cap");
    cmd->add_option("--admm-max-iter", o.admm_max_iter, "ADMM iteration cap");
    cmd->add_option("--admm-tol", o.admm_tol, "ADMM primal and dual residual tolerance");
    cmd->add_option("--merge-tol", o.merge_tol, "Merge threshold relative to the RMS pairwise distance");
  };

  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset as CSV");
  gen->add_option("--kind", o.kind, "Generator")
      ->required()
      ->check(CLI::IsMember({"gaussian-mixture-2d", "gaussian-mixture-20d", "gaussian-grid", "uniform-blocks-noisy"}));
  gen->add_option("--seed", o.seed, "Generator seed");
  gen->add_option("--n", o.n, "Sample count");
  gen->add_option("-o", o.output, "Output file (default stdout)");

  auto* fit = app.add_subcommand("fit", "Fit FCM, k-means or fixed-gamma CAF-HFCM");
  fit->add_option("--alg", o.alg, "Algorithm")->required()->check(CLI::IsMember({"fcm", "kmeans", "caf-fixed"}));
  fit->add_option("--k", o.k, "Cluster count (caf-fixed: initial count)");
  fit->add_option("--gamma", o.gamma, "Fusion weight for caf-fixed");
  fit->add_option("-o", o.output, "Result JSON (default stdout)");
  add_data_flags(fit);
  add_solver_flags(fit);
  add_nmi_flag(fit);

  auto* path = app.add_subcommand("path", "Run the gamma path and select the cluster count");
  path->add_option("--gamma-start", o.gamma_start, "First gamma (default 0.01 x RMS pairwise distance)");
  path->add_option("--epsilon", o.epsilon, "Gamma increment (default 0.01 x RMS pairwise distance)");
  path->add_option("--epsilon-growth", o.epsilon_growth, "Factor applied to epsilon after every level");
  path->add_option("--max-levels", o.max_levels, "Maximum number of gamma levels");
  path->add_option("--stop-at-c", o.stop_at_c, "Stop once this many clusters remain");
  path->add_option("--dot", o.dot, "Also write the hierarchy as a DOT digraph");
  path->add_option("-o", o.output, "Path JSON (default stdout)");
  add_data_flags(path);
  add_solver_flags(path);
  add_nmi_flag(path);

  auto* bench = app.add_subcommand("bench", "Repeated runs over a dataset suite, mean and std of RI/ARI/NMI");
  bench->add_option("--suite", o.suite, "Dataset suite")->required()->check(CLI::IsMember({"synthetic", "uci"}));
  bench->add_option("--data-dir", o.data_dir, "Directory with iris.csv, breast.csv, seeds_dataset.txt");
  bench->add_option("--repeats", o.repeats, "Runs per dataset (seeds 1..repeats)");
  bench->add_option("--seed", o.seed, "Generator seed for the synthetic datasets");
  bench->add_option("--format", o.format, "Table format")->check(CLI::IsMember({"md", "csv"}));
  bench->add_flag("--standardize", o.standardize, "Standardize every dataset first");
  add_nmi_flag(bench);
  bench->add_option("-o", o.output, "Output file (default stdout)");

  auto* exp = app.add_subcommand("export", "Convert a path JSON file to DOT or CSV");
  exp->add_option("input", o.input, "Path JSON file")->required();
  exp->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"dot", "csv", "json"}));
  exp->add_option("-o", o.output, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(o);
    if (fit->parsed()) return cmd_fit(o);
    if (path->parsed()) return cmd_path(o);
    if (bench->parsed()) return cmd_bench(o);
    if (exp->parsed()) return cmd_export(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fc::Error& e) {
    std::cerr << "error (" << fc::to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
