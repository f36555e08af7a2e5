#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sgf/filter_spec.hpp"
#include "sgf/graph.hpp"
#include "sgf/io.hpp"
#include "sgf/learner.hpp"

namespace sgf {

enum class Scheme { kDecoupled, kFullBatch };

struct ExperimentConfig {
  std::filesystem::path graph;     // edge list or SGF1 binary
  std::filesystem::path features;  // SGX1 binary or whitespace text
  std::filesystem::path labels;
  std::filesystem::path splits;    // optional; otherwise a seeded 60/20/20 split
  std::string filter = "ppr";
  std::optional<int> K;            // overrides the K inside the filter string
  double rho = 0.5;
  Scheme scheme = Scheme::kDecoupled;
  TrainConfig train;
  Dtype dtype = Dtype::kF64;
  std::filesystem::path out = "out";
  int jobs = 1;

  FilterSpec filter_spec() const;
};

// key = value lines; '#' starts a comment; [section] headers are accepted
// and ignored. Relative paths resolve against base_dir.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
// Applies one key; throws ParseError for unknown keys or bad values.
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                      const std::filesystem::path& base_dir = {});
std::string format_config(const ExperimentConfig& cfg);

struct RunMetrics {
  std::string filter;
  std::string taxonomy;
  std::string scheme;
  std::size_t n = 0;
  std::size_t nnz = 0;
  int K = 0;
  long F = 0;
  double rho = 0.5;
  std::uint64_t seed = 0;
  double precompute_seconds = 0.0;
  double train_seconds_per_epoch = 0.0;
  double inference_seconds = 0.0;
  std::size_t peak_working_bytes = 0;
  double accuracy = 0.0;
  std::optional<double> rocauc;
  DegreeGap gap;
  std::vector<double> per_epoch_loss;
  int best_epoch = -1;
};

std::string to_json(const RunMetrics& m, bool include_timing = true);

// Loads the dataset named by the config, checking files and sizes.
LabeledGraph load_dataset(const ExperimentConfig& cfg);

// Validates everything before computing, then writes metrics.json,
// head.sgh, predictions.txt, config.txt and manifest.json under cfg.out.
RunMetrics run_experiment(const ExperimentConfig& cfg);
RunMetrics run_experiment(const ExperimentConfig& cfg, const LabeledGraph& g);

struct BenchRow {
  std::string filter;
  std::size_t n = 0;
  std::size_t nnz = 0;
  std::size_t trials = 0;
  double mean_ms = 0.0;
  double std_ms = 0.0;
  double median_ms = 0.0;
};

struct BenchConfig {
  std::vector<std::string> filters{"chebyshev", "bernstein"};
  std::vector<std::size_t> sizes{2000, 4000};
  std::size_t degree = 8;
  std::size_t features = 32;
  int K = 10;
  std::size_t trials = 3;
  double rho = 0.5;
  std::uint64_t seed = 0;
};

// Propagation-only timing on random regular graphs. One warm-up call per
// point is discarded.
std::vector<BenchRow> bench_scaling(const BenchConfig& cfg);
void write_bench_csv(const std::filesystem::path& path, const std::vector<BenchRow>& rows);

struct OracleCheckRow {
  std::string filter;
  double oracle_diff = 0.0;                 // max |engine - oracle| / max(1, max |oracle|)
  std::optional<double> fourier_diff;       // signal-independent filters, rho = 1/2 only
  bool pass = false;
};

struct OracleCheckConfig {
  std::vector<std::string> filters;  // empty means all 27
  std::size_t n = 32;
  int K = 6;
  std::size_t features = 3;
  double rho = 0.5;
  std::uint64_t seed = 0;
  double oracle_tol = 1e-10;
  double fourier_tol = 1e-8;
};

std::vector<OracleCheckRow> oracle_check(const OracleCheckConfig& cfg);
std::string to_json(const std::vector<OracleCheckRow>& rows);

struct GraphStats {
  std::size_t n = 0;
  std::size_t m = 0;  // stored directed entries, self-loops included
  std::optional<double> homophily;
  std::size_t isolated_nodes = 0;
  std::map<std::size_t, std::size_t> degree_histogram;  // degree without self-loop -> node count
  std::vector<std::string> notes;
};

GraphStats graph_stats(const CsrGraph& graph, std::span<const int> labels = {});
GraphStats graph_stats(const std::filesystem::path& graph, const std::filesystem::path& labels = {});
std::string to_json(const GraphStats& s);

}  // namespace sgf
