#include "sgf/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sgf/errors.hpp"
#include "sgf/learner.hpp"

namespace sgf {

namespace {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

}  // namespace

CsrGraph random_connected_graph(std::size_t n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("edge probability must lie in [0, 1]");
  Rng rng(seed);
  std::vector<Edge> edges;
  std::bernoulli_distribution coin(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (coin(rng)) edges.emplace_back(i, j);
    }
  }
  // random recursive tree over a shuffled order
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t k = 1; k < n; ++k) edges.emplace_back(order[k], order[pick(rng, k)]);
  return CsrGraph::from_edges(n, edges);
}

CsrGraph random_regular_graph(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (d >= n) throw DomainError("regular graph needs d < n");
  if ((n * d) % 2 != 0) throw DomainError("n * d must be even");
  Rng rng(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<std::size_t> points;
    points.reserve(n * d);
    for (std::size_t v = 0; v < n; ++v) points.insert(points.end(), d, v);
    std::vector<std::vector<std::size_t>> adj(n);
    auto linked = [&](std::size_t u, std::size_t v) {
      return std::find(adj[u].begin(), adj[u].end(), v) != adj[u].end();
    };
    bool stuck = false;
    while (!points.empty() && !stuck) {
      bool placed = false;
      for (int tries = 0; tries < 200 && !placed; ++tries) {
        const std::size_t i = pick(rng, points.size());
        const std::size_t j = pick(rng, points.size());
        const std::size_t u = points[i], v = points[j];
        if (i == j || u == v || linked(u, v)) continue;
        adj[u].push_back(v);
        adj[v].push_back(u);
        const std::size_t hi = std::max(i, j), lo = std::min(i, j);
        points[hi] = points.back();
        points.pop_back();
        points[lo] = points.back();
        points.pop_back();
        placed = true;
      }
      stuck = !placed;
    }
    if (stuck) continue;
    std::vector<Edge> edges;
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v : adj[u]) {
        if (u < v) edges.emplace_back(u, v);
      }
    }
    return CsrGraph::from_edges(n, edges);
  }
  throw NumericalError("random regular graph: pairing kept dead-ending");
}

CsrGraph grid_graph(std::size_t rows, std::size_t cols) {
  std::vector<Edge> edges;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t v = r * cols + c;
      if (c + 1 < cols) edges.emplace_back(v, v + 1);
      if (r + 1 < rows) edges.emplace_back(v, v + cols);
    }
  }
  return CsrGraph::from_edges(rows * cols, edges);
}

CsrGraph random_geometric_graph(std::size_t n, double radius, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<double, double>> pts(n);
  for (auto& p : pts) p = {uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 1.0)};
  std::vector<Edge> edges;
  DisjointSets ds(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = pts[i].first - pts[j].first, dy = pts[i].second - pts[j].second;
      if (dx * dx + dy * dy < radius * radius) {
        edges.emplace_back(i, j);
        ds.unite(i, j);
      }
    }
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (ds.find(i) != ds.find(0)) {
      // join to the closest node already in 0's component
      std::size_t best = 0;
      double best_d = 1e300;
      for (std::size_t j = 0; j < n; ++j) {
        if (ds.find(j) != ds.find(0)) continue;
        const double dx = pts[i].first - pts[j].first, dy = pts[i].second - pts[j].second;
        if (dx * dx + dy * dy < best_d) {
          best_d = dx * dx + dy * dy;
          best = j;
        }
      }
      edges.emplace_back(i, best);
      ds.unite(i, best);
    }
  }
  return CsrGraph::from_edges(n, edges);
}

LabeledGraph planted_partition(const PlantedConfig& cfg) {
  if (cfg.classes < 2) throw DomainError("planted partition needs at least 2 classes");
  if (!(cfg.homophily >= 0.0 && cfg.homophily <= 1.0)) throw DomainError("homophily must lie in [0, 1]");
  const std::size_t n = cfg.n;
  const auto Q = static_cast<double>(cfg.classes);
  Rng rng(cfg.seed);
  LabeledGraph g;
  g.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.labels[i] = static_cast<int>(i % static_cast<std::size_t>(cfg.classes));
  std::shuffle(g.labels.begin(), g.labels.end(), rng);

  std::vector<double> w(n, 1.0);
  if (cfg.degree_exponent > 1.0) {
    const double cap = std::sqrt(static_cast<double>(n));
    for (auto& wi : w) wi = std::min(cap, std::pow(1.0 - uniform(rng, 0.0, 1.0), -1.0 / (cfg.degree_exponent - 1.0)));
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  const double c = cfg.avg_degree / (total * total / static_cast<double>(n)) * static_cast<double>(n);
  const double f_in = cfg.homophily * Q;
  const double f_out = (1.0 - cfg.homophily) * Q / (Q - 1.0);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double f = g.labels[i] == g.labels[j] ? f_in : f_out;
      const double p = std::min(1.0, c * w[i] * w[j] * f / static_cast<double>(n));
      if (uniform(rng, 0.0, 1.0) < p) edges.emplace_back(i, j);
    }
  }
  g.graph = std::make_shared<const CsrGraph>(CsrGraph::from_edges(n, edges));

  std::normal_distribution<double> normal(0.0, 1.0);
  DenseMatrix means(cfg.classes, static_cast<Eigen::Index>(cfg.features));
  for (Eigen::Index i = 0; i < means.size(); ++i) means.data()[i] = cfg.signal * normal(rng);
  g.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cfg.features));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < cfg.features; ++j) {
      g.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          means(g.labels[i], static_cast<Eigen::Index>(j)) + normal(rng);
    }
  }
  g.splits = split_dataset(n, {0.6, 0.2}, cfg.seed + 1);
  return g;
}

SignalMatrix white_noise(std::size_t n, std::size_t f, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SignalMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(f));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  return x;
}

FilterSpec random_filter_spec(const std::string& name, int K, long feature_dim, Rng& rng) {
  const auto basis = basis_from_name(name);
  if (!basis) throw ValidationError("unknown filter '" + name + "'");
  FilterSpec s;
  s.basis = *basis;
  s.name = name;
  s.K = K;
  const auto k1 = static_cast<std::size_t>(K) + 1;
  auto draws = [&](std::size_t count, double lo, double hi) {
    std::vector<double> v(count);
    for (auto& x : v) x = uniform(rng, lo, hi);
    return v;
  };
  if (s.taxonomy() == Taxonomy::kVariable) s.theta = draws(k1, -1.0, 1.0);
  switch (s.basis) {
    case Basis::kPPR: s.alpha = draws(1, 0.05, 0.95); break;
    case Basis::kHK: s.alpha = draws(1, 0.2, 3.0); break;
    case Basis::kGaussian: s.alpha = draws(1, 0.2, 2.0); break;
    case Basis::kJacobi:
      s.alpha = draws(1, -0.5, 2.0);
      s.beta = draws(1, -0.5, 2.0);
      break;
    case Basis::kFavard:
      s.favard_alpha = draws(k1, 0.5, 2.0);
      s.favard_beta = draws(k1, -0.5, 0.5);
      break;
    case Basis::kAdaGNN: {
      const std::size_t f = static_cast<std::size_t>(feature_dim);
      const std::size_t options[] = {1, f, static_cast<std::size_t>(K) * f};
      std::size_t len = options[pick(rng, 3)];
      if (len == 0) len = 1;
      s.gamma = draws(len, 0.0, 1.0);
      break;
    }
    case Basis::kFBGNN:
    case Basis::kACMGNN:
    case Basis::kFAGNN: {
      const std::size_t q = s.basis == Basis::kACMGNN ? 3 : 2;
      s.gamma = draws(pick(rng, 2) == 0 || K == 0 ? q : q * static_cast<std::size_t>(K), 0.0, 1.0);
      if (s.basis == Basis::kFAGNN) s.beta = draws(1, 0.0, 1.0);
      break;
    }
    case Basis::kG2CN:
      s.alpha = draws(2, 0.2, 2.0);
      s.beta = draws(2, 0.2, 1.0);
      s.gamma = draws(2, 0.2, 1.0);
      s.fusion = pick(rng, 2) == 0 ? Fusion::kSum : Fusion::kConcat;
      break;
    case Basis::kGNNLFHF:
      s.alpha = draws(2, 0.05, 0.95);
      s.beta = draws(2, 0.1, 1.0);
      s.gamma = draws(2, 0.2, 1.0);
      s.fusion = pick(rng, 2) == 0 ? Fusion::kSum : Fusion::kConcat;
      break;
    case Basis::kFiGURe:
      s.channels = {Basis::kIdentity, Basis::kVarMonomial, Basis::kChebyshev, Basis::kBernstein};
      s.theta = draws(4 * k1, -1.0, 1.0);
      s.gamma = draws(4, 0.2, 1.0);
      s.fusion = pick(rng, 2) == 0 ? Fusion::kSum : Fusion::kConcat;
      break;
    default: break;
  }
  validate(s, feature_dim);
  return s;
}

}  // namespace sgf
