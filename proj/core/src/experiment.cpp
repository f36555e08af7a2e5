#include "sgf/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <sstream>

#include "sgf/errors.hpp"
#include "sgf/filter_engine.hpp"
#include "sgf/oracle.hpp"
#include "sgf/synthetic.hpp"

namespace sgf {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || p != value.data() + value.size()) {
    throw ParseError("bad value '" + value + "' for " + key);
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ParseError("bad boolean '" + value + "' for " + key);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p;
}

void require_file(const std::filesystem::path& p, const std::string& what) {
  if (p.empty()) throw ValidationError("config is missing '" + what + "'");
  if (!std::filesystem::is_regular_file(p)) throw ValidationError(what + " file not found: " + p.string());
}

std::string scheme_name(Scheme s) { return s == Scheme::kDecoupled ? "decoupled" : "full"; }

std::string taxonomy_name(Taxonomy t) {
  switch (t) {
    case Taxonomy::kFixed: return "fixed";
    case Taxonomy::kVariable: return "variable";
    case Taxonomy::kBank: return "bank";
  }
  return "unknown";
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

}  // namespace

FilterSpec ExperimentConfig::filter_spec() const {
  FilterSpec s = parse_filter_spec(filter);
  if (K) s.K = *K;
  return s;
}

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                      const std::filesystem::path& base_dir) {
  if (key == "graph") {
    cfg.graph = resolve(base_dir, value);
  } else if (key == "features") {
    cfg.features = resolve(base_dir, value);
  } else if (key == "labels") {
    cfg.labels = resolve(base_dir, value);
  } else if (key == "splits") {
    cfg.splits = value.empty() ? std::filesystem::path{} : resolve(base_dir, value);
  } else if (key == "filter") {
    cfg.filter = value;
  } else if (key == "K" || key == "k") {
    cfg.K = parse_number<int>(key, value);
  } else if (key == "rho") {
    cfg.rho = parse_number<double>(key, value);
  } else if (key == "scheme") {
    if (value == "decoupled" || value == "mini-batch") {
      cfg.scheme = Scheme::kDecoupled;
    } else if (value == "full" || value == "full-batch") {
      cfg.scheme = Scheme::kFullBatch;
    } else {
      throw ParseError("scheme must be decoupled or full");
    }
  } else if (key == "seed") {
    cfg.train.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "epochs") {
    cfg.train.epochs = parse_number<int>(key, value);
  } else if (key == "batch_size") {
    cfg.train.batch_size = parse_number<std::size_t>(key, value);
  } else if (key == "lr") {
    cfg.train.lr = parse_number<double>(key, value);
  } else if (key == "weight_decay") {
    cfg.train.weight_decay = parse_number<double>(key, value);
  } else if (key == "optimizer") {
    cfg.train.optimizer = parse_optimizer(value);
  } else if (key == "head") {
    cfg.train.head = parse_head_kind(value);
  } else if (key == "hidden") {
    cfg.train.hidden = parse_number<long>(key, value);
  } else if (key == "shuffle") {
    cfg.train.shuffle = parse_bool(key, value);
  } else if (key == "keep_best") {
    cfg.train.keep_best = parse_bool(key, value);
  } else if (key == "dtype") {
    cfg.dtype = parse_dtype(value);
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "jobs") {
    cfg.jobs = parse_number<int>(key, value);
  } else {
    throw ParseError("unknown config key '" + key + "'");
  }
}

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ParseError("unterminated section header", lineno);
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", lineno);
    try {
      set_config_value(cfg, trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)),
                       base_dir);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  return parse_config(in, path.parent_path());
}

std::string format_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "graph = " << cfg.graph.string() << "\nfeatures = " << cfg.features.string()
     << "\nlabels = " << cfg.labels.string() << "\nsplits = " << cfg.splits.string()
     << "\nfilter = " << format_filter_spec(cfg.filter_spec()) << "\nrho = " << cfg.rho
     << "\nscheme = " << scheme_name(cfg.scheme) << "\nseed = " << cfg.train.seed
     << "\nepochs = " << cfg.train.epochs << "\nbatch_size = " << cfg.train.batch_size << "\nlr = " << cfg.train.lr
     << "\nweight_decay = " << cfg.train.weight_decay
     << "\noptimizer = " << (cfg.train.optimizer == Optimizer::kAdam ? "adam" : "sgd")
     << "\nhead = " << (cfg.train.head == HeadKind::kLinear ? "linear" : "mlp2") << "\nhidden = " << cfg.train.hidden
     << "\nshuffle = " << (cfg.train.shuffle ? "true" : "false")
     << "\nkeep_best = " << (cfg.train.keep_best ? "true" : "false")
     << "\ndtype = " << (cfg.dtype == Dtype::kF64 ? "f64" : "f32") << '\n';
  return os.str();
}

std::string to_json(const RunMetrics& m, bool include_timing) {
  json j;
  j["filter"] = m.filter;
  j["taxonomy"] = m.taxonomy;
  j["scheme"] = m.scheme;
  j["n"] = m.n;
  j["nnz"] = m.nnz;
  j["K"] = m.K;
  j["F"] = m.F;
  j["rho"] = m.rho;
  j["seed"] = m.seed;
  j["accuracy"] = m.accuracy;
  if (m.rocauc) j["rocauc"] = *m.rocauc;
  j["degree_gap"] = {{"gap", m.gap.gap},         {"acc_high", m.gap.acc_high}, {"acc_low", m.gap.acc_low},
                     {"n_high", m.gap.n_high},   {"n_low", m.gap.n_low},       {"threshold", m.gap.threshold}};
  j["best_epoch"] = m.best_epoch;
  j["per_epoch_loss"] = m.per_epoch_loss;
  j["peak_working_bytes"] = m.peak_working_bytes;
  if (include_timing) {
    j["precompute_seconds"] = m.precompute_seconds;
    j["train_seconds_per_epoch"] = m.train_seconds_per_epoch;
    j["inference_seconds"] = m.inference_seconds;
  }
  return j.dump(2);
}

LabeledGraph load_dataset(const ExperimentConfig& cfg) {
  require_file(cfg.graph, "graph");
  require_file(cfg.features, "features");
  require_file(cfg.labels, "labels");
  if (!cfg.splits.empty()) require_file(cfg.splits, "splits");
  LabeledGraph g;
  g.labels = read_labels(cfg.labels);
  g.graph = std::make_shared<const CsrGraph>(load_graph(cfg.graph, g.labels.size()));
  g.features = load_features(cfg.features);
  g.splits = cfg.splits.empty() ? split_dataset(g.n(), {0.6, 0.2}, cfg.train.seed) : read_splits(cfg.splits);
  g.validate();
  return g;
}

RunMetrics run_experiment(const ExperimentConfig& cfg) {
  // everything that can be checked without data comes first
  const FilterSpec spec = cfg.filter_spec();
  validate(spec);
  cfg.train.validate();
  if (!(cfg.rho >= 0.0 && cfg.rho <= 1.0)) throw DomainError("rho must lie in [0, 1]");
  const LabeledGraph g = load_dataset(cfg);
  return run_experiment(cfg, g);
}

RunMetrics run_experiment(const ExperimentConfig& cfg, const LabeledGraph& g) {
  const FilterSpec spec = cfg.filter_spec();
  g.validate();
  validate(spec, g.features.cols());
  cfg.train.validate();
  if (!(cfg.rho >= 0.0 && cfg.rho <= 1.0)) throw DomainError("rho must lie in [0, 1]");
  if (cfg.scheme == Scheme::kFullBatch && (!is_signal_independent(spec.basis) || spec.fusion == Fusion::kConcat)) {
    throw ValidationError("full-batch scheme needs a signal-independent filter with sum fusion");
  }
  if (spec.taxonomy() == Taxonomy::kVariable && spec.theta.empty() && cfg.scheme == Scheme::kFullBatch) {
    throw ValidationError("full-batch scheme needs theta for variable filters");
  }
  std::filesystem::create_directories(cfg.out);

  RunMetrics m;
  m.filter = format_filter_spec(spec);
  m.taxonomy = taxonomy_name(spec.taxonomy());
  m.scheme = scheme_name(cfg.scheme);
  m.n = g.n();
  m.nnz = g.graph->nnz();
  m.K = spec.K;
  m.F = g.features.cols();
  m.rho = cfg.rho;
  m.seed = cfg.train.seed;

  HeadModel head;
  std::vector<int> predictions;
  if (cfg.scheme == Scheme::kDecoupled) {
    PipelineResult r = run_decoupled(g, spec, cfg.rho, cfg.train);
    m.precompute_seconds = r.precompute_seconds;
    m.train_seconds_per_epoch = r.train_seconds / cfg.train.epochs;
    m.inference_seconds = r.inference_seconds;
    m.peak_working_bytes = r.peak_working_bytes;
    m.accuracy = r.accuracy;
    m.rocauc = r.rocauc;
    m.gap = r.gap;
    m.per_epoch_loss = r.train.epoch_loss;
    m.best_epoch = r.train.best_epoch;
    head = std::move(r.train.model);
    predictions = std::move(r.predictions);
  } else {
    FullBatchModel model(g, spec, cfg.rho, cfg.train);
    auto t0 = Clock::now();
    TrainResult tr = model.train();
    m.train_seconds_per_epoch = seconds_since(t0) / cfg.train.epochs;
    t0 = Clock::now();
    const SignalMatrix emb = model.forward_embeddings();
    predictions = model.head().predict(emb);
    m.inference_seconds = seconds_since(t0);
    m.peak_working_bytes = working_buffer_budget(spec) * static_cast<std::size_t>(emb.size()) * sizeof(double);
    std::vector<int> test_pred, test_y;
    for (std::size_t i : g.splits.test) {
      test_pred.push_back(predictions[i]);
      test_y.push_back(g.labels[i]);
    }
    m.accuracy = accuracy(test_pred, test_y);
    try {
      m.rocauc = evaluate(model.head(), emb, g.labels, g.splits.test, Metric::kRocAuc);
    } catch (const ValidationError&) {
      m.rocauc.reset();
    }
    m.gap = degree_gap(*g.graph, g.labels, predictions, g.splits.test);
    m.per_epoch_loss = tr.epoch_loss;
    m.best_epoch = tr.best_epoch;
    head = model.head();
  }

  const auto& dir = cfg.out;
  {
    std::ofstream os(dir / "metrics.json");
    os << to_json(m) << '\n';
  }
  {
    std::ofstream os(dir / "config.txt");
    os << format_config(cfg);
  }
  save_head(dir / "head.sgh", head);
  write_labels(dir / "predictions.txt", predictions);
  write_manifest(dir, {"metrics.json", "config.txt", "head.sgh", "predictions.txt"});
  return m;
}

std::vector<BenchRow> bench_scaling(const BenchConfig& cfg) {
  if (cfg.trials == 0) throw ValidationError("bench needs at least one trial");
  std::vector<FilterSpec> specs;
  for (const auto& name : cfg.filters) {
    Rng rng(cfg.seed);
    specs.push_back(random_filter_spec(name, cfg.K, static_cast<long>(cfg.features), rng));
  }
  std::vector<BenchRow> rows;
  for (std::size_t n : cfg.sizes) {
    const CsrGraph graph = random_regular_graph(n, cfg.degree, cfg.seed + n).with_self_loops();
    const NormalizedAdjacency adj = normalize(graph, cfg.rho);
    const SignalMatrix x = white_noise(n, cfg.features, cfg.seed + 1);
    for (const auto& spec : specs) {
      (void)apply_filter(spec, adj, x);  // warm-up
      std::vector<double> ms;
      for (std::size_t t = 0; t < cfg.trials; ++t) {
        const auto t0 = Clock::now();
        const SignalMatrix out = apply_filter(spec, adj, x);
        ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
        if (!out.allFinite()) throw NumericalError("bench produced non-finite output for " + spec.name);
      }
      BenchRow row;
      row.filter = spec.name;
      row.n = n;
      row.nnz = graph.nnz();
      row.trials = ms.size();
      row.mean_ms = std::accumulate(ms.begin(), ms.end(), 0.0) / static_cast<double>(ms.size());
      double var = 0.0;
      for (double v : ms) var += (v - row.mean_ms) * (v - row.mean_ms);
      row.std_ms = ms.size() > 1 ? std::sqrt(var / static_cast<double>(ms.size() - 1)) : 0.0;
      std::sort(ms.begin(), ms.end());
      const std::size_t h = ms.size() / 2;
      row.median_ms = ms.size() % 2 ? ms[h] : 0.5 * (ms[h - 1] + ms[h]);
      rows.push_back(row);
    }
  }
  return rows;
}

void write_bench_csv(const std::filesystem::path& path, const std::vector<BenchRow>& rows) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "filter,n,nnz,trials,mean_ms,std_ms,median_ms\n";
  for (const auto& r : rows) {
    out << r.filter << ',' << r.n << ',' << r.nnz << ',' << r.trials << ',' << r.mean_ms << ',' << r.std_ms << ','
        << r.median_ms << '\n';
  }
}

std::vector<OracleCheckRow> oracle_check(const OracleCheckConfig& cfg) {
  const std::vector<std::string> names = cfg.filters.empty() ? all_filter_names() : cfg.filters;
  std::vector<OracleCheckRow> rows;
  Rng rng(cfg.seed);
  for (std::size_t i = 0; i < names.size(); ++i) {
    const CsrGraph graph = random_connected_graph(cfg.n, 0.15, cfg.seed + 101 * i).with_self_loops();
    const NormalizedAdjacency adj = normalize(graph, cfg.rho);
    const SignalMatrix x = white_noise(cfg.n, cfg.features, cfg.seed + 7 + i);
    const FilterSpec spec = random_filter_spec(names[i], cfg.K, static_cast<long>(cfg.features), rng);
    const SignalMatrix engine = apply_filter(spec, adj, x);
    const SignalMatrix oracle = matrix_polynomial_oracle(spec, dense_laplacian(adj), x);
    OracleCheckRow row;
    row.filter = names[i];
    row.oracle_diff = (engine - oracle).cwiseAbs().maxCoeff() / std::max(1.0, oracle.cwiseAbs().maxCoeff());
    row.pass = row.oracle_diff <= cfg.oracle_tol;
    if (cfg.rho == 0.5 && is_signal_independent(spec.basis)) {
      FilterSpec summed = spec;
      summed.fusion = Fusion::kSum;
      const SignalMatrix direct = apply_filter(summed, adj, x);
      const EigenSystem es = eigensystem(adj);
      SignalMatrix fourier(x.rows(), x.cols());
      for (Eigen::Index c = 0; c < x.cols(); ++c) {
        const auto col = static_cast<std::size_t>(c);
        const Response g = [&](double l) { return frequency_response(summed, l, col, x.cols()); };
        fourier.col(c) = spectral_filter_oracle(es, g, x.col(c));
      }
      row.fourier_diff = (direct - fourier).cwiseAbs().maxCoeff() / std::max(1.0, fourier.cwiseAbs().maxCoeff());
      row.pass = row.pass && *row.fourier_diff <= cfg.fourier_tol;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string to_json(const std::vector<OracleCheckRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    json j{{"filter", r.filter}, {"oracle_diff", r.oracle_diff}};
    if (r.fourier_diff) j["fourier_diff"] = *r.fourier_diff;
    j["pass"] = r.pass;
    arr.push_back(j);
  }
  return arr.dump(2);
}

GraphStats graph_stats(const CsrGraph& graph, std::span<const int> labels) {
  GraphStats s;
  s.n = graph.n();
  s.m = graph.nnz();
  for (std::size_t d : degree_stats(graph).degrees) ++s.degree_histogram[d];
  if (labels.empty()) {
    s.notes.push_back("no labels given; homophily omitted");
  } else {
    const HomophilyReport h = homophily(graph, labels);
    s.homophily = h.score;
    s.isolated_nodes = h.isolated_nodes;
    if (h.isolated_nodes > 0) {
      s.notes.push_back(std::to_string(h.isolated_nodes) + " isolated nodes excluded from homophily");
    }
  }
  return s;
}

GraphStats graph_stats(const std::filesystem::path& graph, const std::filesystem::path& labels) {
  require_file(graph, "graph");
  std::vector<int> y;
  if (!labels.empty()) {
    require_file(labels, "labels");
    y = read_labels(labels);
  }
  const CsrGraph g = load_graph(graph, y.empty() ? std::nullopt : std::optional<std::size_t>(y.size()));
  return graph_stats(g, y);
}

std::string to_json(const GraphStats& s) {
  json j;
  j["n"] = s.n;
  j["m"] = s.m;
  if (s.homophily) {
    j["homophily"] = *s.homophily;
    j["isolated_nodes"] = s.isolated_nodes;
  }
  json hist = json::object();
  for (const auto& [d, c] : s.degree_histogram) hist[std::to_string(d)] = c;
  j["degree_histogram"] = hist;
  if (!s.notes.empty()) j["notes"] = s.notes;
  return j.dump(2);
}

}  // namespace sgf
