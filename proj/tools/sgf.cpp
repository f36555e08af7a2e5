// sgf: command-line front end for the spectral filtering engine.
//
// Exit codes: 0 ok, 2 validation error, 3 numerical failure.

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "sgf/errors.hpp"
#include "sgf/experiment.hpp"
#include "sgf/filter_basis.hpp"
#include "sgf/filter_engine.hpp"
#include "sgf/io.hpp"
#include "sgf/learner.hpp"
#include "sgf/oracle.hpp"
#include "sgf/regression.hpp"
#include "sgf/synthetic.hpp"

namespace {

using json = nlohmann::ordered_json;

// Flags whose values are forwarded to set_config_value when given.
struct ConfigFlags {
  std::string config;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    options[key] = app->add_option(flag, values[key], help);
  }

  sgf::ExperimentConfig resolve(const ConfigFlags* globals = nullptr) const {
    sgf::ExperimentConfig cfg = config.empty() ? sgf::ExperimentConfig{} : sgf::load_config(config);
    auto apply = [&cfg](const ConfigFlags& f) {
      for (const auto& [key, opt] : f.options) {
        if (opt->count() > 0) sgf::set_config_value(cfg, key, f.values.at(key));
      }
    };
    if (globals) apply(*globals);
    apply(*this);
    return cfg;
  }
};

void add_dataset_flags(CLI::App* app, ConfigFlags& f) {
  app->add_option("--config", f.config, "key=value experiment config")->check(CLI::ExistingFile);
  f.add(app, "--graph", "graph", "edge list or SGF1 binary");
  f.add(app, "--features", "features", "SGX1 binary or text matrix");
  f.add(app, "--labels", "labels", "one class id per line");
  f.add(app, "--splits", "splits", "splits JSON {train, val, test}");
  f.add(app, "--filter", "filter", "filter spec, e.g. ppr:K=10:alpha=0.1");
}

void add_train_flags(CLI::App* app, ConfigFlags& f) {
  f.add(app, "--scheme", "scheme", "decoupled | full");
  f.add(app, "--epochs", "epochs", "training epochs");
  f.add(app, "--batch-size", "batch_size", "mini-batch size");
  f.add(app, "--lr", "lr", "learning rate");
  f.add(app, "--weight-decay", "weight_decay", "weight decay");
  f.add(app, "--optimizer", "optimizer", "adam | sgd");
  f.add(app, "--head", "head", "linear | mlp2");
  f.add(app, "--hidden", "hidden", "hidden width of the mlp2 head");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
std::vector<T> parse_grid(const std::string& s) {
  std::vector<T> out;
  for (const auto& item : split_list(s)) {
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !is.eof()) throw sgf::ParseError("bad grid value '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw sgf::ValidationError("empty grid");
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw sgf::ValidationError("cannot write " + path.string());
  os << text << '\n';
}

std::string sweep_csv(const std::vector<sgf::SweepRow>& rows) {
  std::ostringstream os;
  os << "rho,K,accuracy,degree_gap,acc_high,acc_low\n";
  for (const auto& r : rows) {
    os << r.rho << ',' << r.K << ',' << r.accuracy << ',' << r.gap << ',' << r.acc_high << ',' << r.acc_low << '\n';
  }
  return os.str();
}

json report_json(const sgf::RegressionReport& r) {
  json j{{"filter", r.filter}, {"signal", r.signal}, {"r2", r.r2}, {"residual_norm", r.residual_norm},
         {"theta", r.theta_fit}};
  if (!r.hyper_fit.empty()) j["alpha"] = r.hyper_fit;
  j["condition_estimate"] = r.condition_estimate;
  j["ill_conditioned"] = r.ill_conditioned;
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral graph filtering engine"};
  app.require_subcommand(1);
  app.fallthrough();

  ConfigFlags globals;
  globals.add(&app, "--seed", "seed", "random seed");
  globals.add(&app, "--rho", "rho", "normalization coefficient in [0, 1]");
  globals.add(&app, "--K", "K", "propagation hops");
  globals.add(&app, "--dtype", "dtype", "f32 | f64 for written matrices");
  globals.add(&app, "--out", "out", "output directory");
  globals.add(&app, "--jobs", "jobs", "threads for independent grid points");
  auto given = [&](const std::string& key) { return globals.options.at(key)->count() > 0; };

  // graph stats
  auto* graph_cmd = app.add_subcommand("graph", "graph utilities");
  graph_cmd->require_subcommand(1);
  auto* stats_cmd = graph_cmd->add_subcommand("stats", "n, m, homophily, degree histogram");
  std::string stats_graph, stats_labels;
  stats_cmd->add_option("--graph", stats_graph, "edge list or SGF1 binary")->required();
  stats_cmd->add_option("--labels", stats_labels, "labels file");

  // precompute
  auto* pre_cmd = app.add_subcommand("precompute", "write filter embeddings or the basis stack");
  ConfigFlags pre_flags;
  add_dataset_flags(pre_cmd, pre_flags);

  // oracle-check
  auto* oc_cmd = app.add_subcommand("oracle-check", "engine vs dense oracle per filter");
  std::string oc_filters;
  sgf::OracleCheckConfig oc;
  oc_cmd->add_option("--filters", oc_filters, "comma list; default all");
  oc_cmd->add_option("--n", oc.n, "nodes")->capture_default_str();
  oc_cmd->add_option("--features", oc.features, "signal columns")->capture_default_str();

  // fit-signal
  auto* fit_cmd = app.add_subcommand("fit-signal", "fit a filter to a target frequency response");
  std::string fit_filter = "chebyshev", fit_signal = "all", fit_graph;
  std::size_t fit_n = 200, fit_cols = 1;
  double fit_p = 0.005;
  fit_cmd->add_option("--filter", fit_filter, "filter spec")->capture_default_str();
  fit_cmd->add_option("--signal", fit_signal, "band|combine|high|low|reject|all")->capture_default_str();
  fit_cmd->add_option("--graph", fit_graph, "graph file; default a sparse random connected graph");
  fit_cmd->add_option("--n", fit_n, "nodes of the default graph")->capture_default_str();
  fit_cmd->add_option("--p", fit_p, "extra-edge probability of the default graph")->capture_default_str();
  fit_cmd->add_option("--features", fit_cols, "white-noise input columns")->capture_default_str();

  // train
  auto* train_cmd = app.add_subcommand("train", "precompute, train and evaluate");
  ConfigFlags train_flags;
  add_dataset_flags(train_cmd, train_flags);
  add_train_flags(train_cmd, train_flags);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on stored embeddings");
  std::string ev_ckpt, ev_emb, ev_labels, ev_splits, ev_metric = "accuracy", ev_split = "test";
  eval_cmd->add_option("--checkpoint", ev_ckpt, "SGH1 head")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--embeddings", ev_emb, "SGX1 or text matrix")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--labels", ev_labels, "labels file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--splits", ev_splits, "splits JSON; default seeded 60/20/20");
  eval_cmd->add_option("--metric", ev_metric, "accuracy | rocauc")->capture_default_str();
  eval_cmd->add_option("--split", ev_split, "train | val | test")->capture_default_str();

  // sweeps
  auto* hop_cmd = app.add_subcommand("sweep-hop", "accuracy over K");
  ConfigFlags hop_flags;
  std::string hop_grid = "2,4,6,8,10,12,14,16,18,20";
  add_dataset_flags(hop_cmd, hop_flags);
  add_train_flags(hop_cmd, hop_flags);
  hop_cmd->add_option("--grid", hop_grid, "comma list of K")->capture_default_str();

  auto* rho_cmd = app.add_subcommand("sweep-rho", "degree gap over rho");
  ConfigFlags rho_flags;
  std::string rho_grid = "0,0.25,0.5,0.75,1";
  add_dataset_flags(rho_cmd, rho_flags);
  add_train_flags(rho_cmd, rho_flags);
  rho_cmd->add_option("--grid", rho_grid, "comma list of rho")->capture_default_str();

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "propagation timing on random regular graphs");
  sgf::BenchConfig bc;
  std::string bench_filters = "chebyshev,bernstein", bench_sizes = "2000,4000";
  bench_cmd->add_option("--filters", bench_filters, "comma list")->capture_default_str();
  bench_cmd->add_option("--sizes", bench_sizes, "comma list of n")->capture_default_str();
  bench_cmd->add_option("--degree", bc.degree, "regular degree")->capture_default_str();
  bench_cmd->add_option("--features", bc.features, "signal columns")->capture_default_str();
  bench_cmd->add_option("--trials", bc.trials, "timed trials per point")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const sgf::ExperimentConfig gcfg = ConfigFlags{}.resolve(&globals);
    const std::uint64_t seed = gcfg.train.seed;
    const std::filesystem::path out = gcfg.out;

    if (stats_cmd->parsed()) {
      const sgf::GraphStats s = sgf::graph_stats(stats_graph, stats_labels);
      std::cout << sgf::to_json(s) << '\n';
      if (given("out")) {
        std::filesystem::create_directories(out);
        write_text(out / "graph_stats.json", sgf::to_json(s));
        sgf::write_manifest(out, {"graph_stats.json"});
      }
    } else if (pre_cmd->parsed()) {
      const sgf::ExperimentConfig cfg = pre_flags.resolve(&globals);
      const sgf::FilterSpec spec = cfg.filter_spec();
      sgf::validate(spec);
      if (!(cfg.rho >= 0.0 && cfg.rho <= 1.0)) throw sgf::DomainError("rho must lie in [0, 1]");
      if (cfg.graph.empty() || cfg.features.empty()) throw sgf::ValidationError("precompute needs --graph and --features");
      const sgf::SignalMatrix x = sgf::load_features(cfg.features);
      const auto graph = std::make_shared<const sgf::CsrGraph>(sgf::load_graph(cfg.graph, x.rows()));
      const sgf::NormalizedAdjacency adj(graph, cfg.rho);
      std::filesystem::create_directories(cfg.out);
      json j{{"filter", sgf::format_filter_spec(spec)}, {"n", graph->n()}, {"nnz", graph->nnz()}};
      const auto t0 = std::chrono::steady_clock::now();
      std::string file;
      if (spec.taxonomy() == sgf::Taxonomy::kVariable && spec.theta.empty()) {
        sgf::FilterSpec unit = spec;
        unit.theta.assign(static_cast<std::size_t>(spec.K) + 1, 1.0);
        const sgf::BasisStack st = sgf::export_basis(unit, adj, x);
        file = "basis.sgb";
        sgf::write_basis_stack(cfg.out / file, st, cfg.dtype);
        j["images"] = st.size();
      } else {
        const sgf::FilterResult r = sgf::run_filter(spec, adj, x);
        file = "embeddings.sgx";
        sgf::write_features(cfg.out / file, r.output, cfg.dtype);
        j["cols"] = r.output.cols();
        j["hops"] = r.diagnostics.hops;
        j["peak_working_bytes"] = r.diagnostics.peak_working_bytes;
      }
      j["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      j["file"] = file;
      sgf::write_manifest(cfg.out, {file});
      std::cout << j.dump(2) << '\n';
    } else if (oc_cmd->parsed()) {
      oc.filters = split_list(oc_filters);
      oc.seed = seed;
      oc.rho = gcfg.rho;
      if (given("K")) oc.K = *gcfg.K;
      const auto rows = sgf::oracle_check(oc);
      std::cout << sgf::to_json(rows) << '\n';
      if (given("out")) {
        std::filesystem::create_directories(out);
        write_text(out / "oracle_check.json", sgf::to_json(rows));
        sgf::write_manifest(out, {"oracle_check.json"});
      }
      for (const auto& r : rows) {
        if (!r.pass) return 3;
      }
    } else if (fit_cmd->parsed()) {
      sgf::FilterSpec spec = sgf::parse_filter_spec(fit_filter);
      if (given("K")) spec.K = *gcfg.K;
      const sgf::CsrGraph graph =
          fit_graph.empty() ? sgf::random_connected_graph(fit_n, fit_p, seed) : sgf::load_graph(fit_graph);
      const sgf::NormalizedAdjacency adj = sgf::normalize(graph, gcfg.rho);
      const sgf::EigenSystem es = sgf::eigensystem(adj);
      const sgf::SignalMatrix x = sgf::white_noise(graph.n(), fit_cols, seed);
      const std::vector<std::string> signals =
          fit_signal == "all" ? sgf::builtin_target_names() : split_list(fit_signal);
      json arr = json::array();
      for (const auto& name : signals) {
        const sgf::TargetSignal target = sgf::builtin_target(name);
        const sgf::SignalMatrix z = sgf::make_target(target, es, x);
        sgf::RegressionReport r;
        if (sgf::is_theta_linear(spec.basis)) {
          r = sgf::fit_linear(spec, adj, x, z);
        } else {
          std::vector<double> grid = sgf::default_alpha_grid(spec.basis);
          if (grid.empty()) grid = {0.0};
          r = sgf::fit_hyper(spec, adj, x, z, grid);
        }
        r.signal = name;
        arr.push_back(report_json(r));
      }
      std::cout << arr.dump(2) << '\n';
      if (given("out")) {
        std::filesystem::create_directories(out);
        write_text(out / "fit_signal.json", arr.dump(2));
        sgf::write_manifest(out, {"fit_signal.json"});
      }
    } else if (train_cmd->parsed()) {
      const sgf::RunMetrics m = sgf::run_experiment(train_flags.resolve(&globals));
      std::cout << sgf::to_json(m) << '\n';
    } else if (eval_cmd->parsed()) {
      const sgf::HeadModel head = sgf::load_head(ev_ckpt);
      const sgf::SignalMatrix emb = sgf::load_features(ev_emb);
      const std::vector<int> labels = sgf::read_labels(ev_labels);
      if (static_cast<std::size_t>(emb.rows()) != labels.size()) {
        throw sgf::ShapeError("embeddings and labels disagree on n");
      }
      const sgf::Splits splits = ev_splits.empty() ? sgf::split_dataset(labels.size(), {0.6, 0.2}, seed)
                                                   : sgf::read_splits(ev_splits);
      const std::vector<std::size_t>* rows = nullptr;
      if (ev_split == "train") {
        rows = &splits.train;
      } else if (ev_split == "val") {
        rows = &splits.val;
      } else if (ev_split == "test") {
        rows = &splits.test;
      } else {
        throw sgf::ValidationError("split must be train, val or test");
      }
      sgf::Metric metric;
      if (ev_metric == "accuracy") {
        metric = sgf::Metric::kAccuracy;
      } else if (ev_metric == "rocauc") {
        metric = sgf::Metric::kRocAuc;
      } else {
        throw sgf::ValidationError("metric must be accuracy or rocauc");
      }
      const double v = sgf::evaluate(head, emb, labels, *rows, metric);
      std::cout << json{{ev_metric, v}, {"split", ev_split}, {"rows", rows->size()}}.dump(2) << '\n';
    } else if (hop_cmd->parsed() || rho_cmd->parsed()) {
      const bool hop = hop_cmd->parsed();
      const sgf::ExperimentConfig cfg = (hop ? hop_flags : rho_flags).resolve(&globals);
      const sgf::FilterSpec spec = cfg.filter_spec();
      sgf::validate(spec);
      cfg.train.validate();
      const sgf::LabeledGraph g = sgf::load_dataset(cfg);
      std::vector<sgf::SweepRow> rows;
      if (hop) {
        const auto grid = parse_grid<int>(hop_grid);
        rows = sgf::hop_sweep(g, spec, grid, cfg.rho, cfg.train, cfg.jobs);
      } else {
        const auto grid = parse_grid<double>(rho_grid);
        rows = sgf::rho_sweep(g, spec, grid, cfg.train, cfg.jobs);
      }
      const std::string name = hop ? "sweep_hop.csv" : "sweep_rho.csv";
      std::filesystem::create_directories(cfg.out);
      sgf::write_sweep_csv(cfg.out / name, rows);
      sgf::write_manifest(cfg.out, {name});
      std::cout << sweep_csv(rows);
    } else if (bench_cmd->parsed()) {
      bc.filters = split_list(bench_filters);
      bc.sizes = parse_grid<std::size_t>(bench_sizes);
      bc.seed = seed;
      bc.rho = gcfg.rho;
      if (given("K")) bc.K = *gcfg.K;
      // timing stays on one worker; --jobs is ignored here
      const auto rows = sgf::bench_scaling(bc);
      std::filesystem::create_directories(out);
      sgf::write_bench_csv(out / "bench.csv", rows);
      sgf::write_manifest(out, {"bench.csv"});
      std::ifstream in(out / "bench.csv");
      std::cout << in.rdbuf();
    }
  } catch (const sgf::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const sgf::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
