#include "sgf/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

#include "sgf/errors.hpp"
#include "sgf/propagate.hpp"

namespace sgf {

CsrGraph::CsrGraph(std::size_t n, std::vector<std::size_t> indptr, std::vector<std::size_t> indices)
    : n_(n), indptr_(std::move(indptr)), indices_(std::move(indices)) {
  if (indptr_.size() != n_ + 1) throw ValidationError("indptr must have n+1 entries");
  if (indptr_.front() != 0) throw ValidationError("indptr[0] must be 0");
  if (indptr_.back() != indices_.size()) throw ValidationError("indptr[n] must equal nnz");
  for (std::size_t i = 0; i < n_; ++i) {
    if (indptr_[i] > indptr_[i + 1]) throw ValidationError("indptr must be non-decreasing");
    auto r = row(i);
    for (std::size_t e = 0; e < r.size(); ++e) {
      if (r[e] >= n_) throw BoundsError("column id " + std::to_string(r[e]) + " out of range");
      if (e > 0 && r[e] <= r[e - 1]) throw ValidationError("row " + std::to_string(i) + " not strictly sorted");
    }
  }
}

CsrGraph CsrGraph::from_edges(std::size_t n, std::span<const Edge> edges) {
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n) throw BoundsError("edge (" + std::to_string(u) + "," + std::to_string(v) + ") out of range");
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<std::size_t> indptr(n + 1, 0);
  std::vector<std::size_t> indices;
  indices.reserve(2 * edges.size() + n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = adj[i];
    r.push_back(i);
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    indices.insert(indices.end(), r.begin(), r.end());
    indptr[i + 1] = indices.size();
  }
  return CsrGraph(n, std::move(indptr), std::move(indices));
}

CsrGraph CsrGraph::with_self_loops() const {
  std::vector<std::size_t> indptr(n_ + 1, 0);
  std::vector<std::size_t> indices;
  indices.reserve(indices_.size() + n_);
  for (std::size_t i = 0; i < n_; ++i) {
    auto r = row(i);
    auto pos = std::lower_bound(r.begin(), r.end(), i);
    indices.insert(indices.end(), r.begin(), pos);
    indices.push_back(i);
    if (pos != r.end() && *pos == i) ++pos;
    indices.insert(indices.end(), pos, r.end());
    indptr[i + 1] = indices.size();
  }
  return CsrGraph(n_, std::move(indptr), std::move(indices));
}

bool CsrGraph::has_self_loops() const {
  for (std::size_t i = 0; i < n_; ++i) {
    auto r = row(i);
    if (!std::binary_search(r.begin(), r.end(), i)) return false;
  }
  return true;
}

bool CsrGraph::is_symmetric() const {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j : row(i)) {
      auto r = row(j);
      if (!std::binary_search(r.begin(), r.end(), i)) return false;
    }
  }
  return true;
}

CsrGraph CsrGraph::permuted(std::span<const std::size_t> perm) const {
  if (perm.size() != n_) throw ShapeError("permutation length mismatch");
  std::vector<std::size_t> inverse(n_, n_);
  for (std::size_t i = 0; i < n_; ++i) {
    if (perm[i] >= n_ || inverse[perm[i]] != n_) throw ValidationError("not a permutation");
    inverse[perm[i]] = i;
  }
  std::vector<std::size_t> indptr(n_ + 1, 0);
  std::vector<std::size_t> indices;
  indices.reserve(indices_.size());
  for (std::size_t new_i = 0; new_i < n_; ++new_i) {
    auto r = row(inverse[new_i]);
    std::vector<std::size_t> mapped;
    mapped.reserve(r.size());
    for (std::size_t j : r) mapped.push_back(perm[j]);
    std::sort(mapped.begin(), mapped.end());
    indices.insert(indices.end(), mapped.begin(), mapped.end());
    indptr[new_i + 1] = indices.size();
  }
  return CsrGraph(n_, std::move(indptr), std::move(indices));
}

NormalizedAdjacency::NormalizedAdjacency(std::shared_ptr<const CsrGraph> graph, double rho)
    : graph_(std::move(graph)), rho_(rho) {
  if (!graph_) throw ValidationError("null graph");
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("rho must lie in [0, 1]");
  if (!graph_->has_self_loops()) throw ValidationError("normalize requires self-loops on every node");
  const std::size_t n = graph_->n();
  left_.resize(n);
  right_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(graph_->row_size(i));
    left_[i] = std::pow(d, rho - 1.0);
    right_[i] = std::pow(d, -rho);
  }
  values_.resize(graph_->nnz());
  const auto& indptr = graph_->indptr();
  const auto& indices = graph_->indices();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t e = indptr[i]; e < indptr[i + 1]; ++e) values_[e] = left_[i] * right_[indices[e]];
  }
}

NormalizedAdjacency NormalizedAdjacency::transposed() const {
  return NormalizedAdjacency(graph_, 1.0 - rho_);
}

int LabeledGraph::num_classes() const {
  int c = 0;
  for (int y : labels) c = std::max(c, y + 1);
  return c;
}

void LabeledGraph::validate() const {
  if (!graph) throw ValidationError("labeled graph has no graph");
  const std::size_t n = graph->n();
  if (features.size() != 0 && static_cast<std::size_t>(features.rows()) != n) {
    throw ShapeError("feature rows do not match node count");
  }
  if (!labels.empty() && labels.size() != n) throw ShapeError("label count does not match node count");
  for (int y : labels) {
    if (y < 0) throw ValidationError("negative class id");
  }
  std::vector<char> seen(n, 0);
  for (const auto* part : {&splits.train, &splits.val, &splits.test}) {
    for (std::size_t i : *part) {
      if (i >= n) throw BoundsError("split index out of range");
      if (seen[i]) throw ValidationError("split index " + std::to_string(i) + " repeats");
      seen[i] = 1;
    }
  }
}

CsrGraph parse_edge_list(std::istream& in, std::optional<std::size_t> n_hint) {
  std::vector<Edge> edges;
  std::size_t max_id = 0;
  bool any = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    long long u = 0, v = 0;
    if (!(ls >> u)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ParseError("malformed edge line", lineno);
    }
    if (!(ls >> v)) throw ParseError("malformed edge line", lineno);
    std::string rest;
    if (ls >> rest) throw ParseError("trailing tokens on edge line", lineno);
    if (u < 0 || v < 0) throw ParseError("negative node id", lineno);
    const auto uu = static_cast<std::size_t>(u), vv = static_cast<std::size_t>(v);
    if (n_hint && (uu >= *n_hint || vv >= *n_hint)) {
      throw BoundsError("node id >= n_hint at line " + std::to_string(lineno));
    }
    max_id = std::max({max_id, uu, vv});
    any = true;
    edges.emplace_back(uu, vv);
  }
  const std::size_t n = n_hint ? *n_hint : (any ? max_id + 1 : 0);
  return CsrGraph::from_edges(n, edges);
}

CsrGraph load_edge_list(const std::filesystem::path& path, std::optional<std::size_t> n_hint) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open edge list " + path.string());
  return parse_edge_list(in, n_hint);
}

NormalizedAdjacency normalize(std::shared_ptr<const CsrGraph> graph, double rho) {
  return NormalizedAdjacency(std::move(graph), rho);
}

NormalizedAdjacency normalize(const CsrGraph& graph, double rho) {
  return NormalizedAdjacency(std::make_shared<const CsrGraph>(graph), rho);
}

SignalMatrix spmv_adj(const NormalizedAdjacency& adj, const SignalMatrix& x) {
  SignalMatrix out;
  propagate_into(adj, x, out, HopCoeffs{.adj = 1.0});
  return out;
}

SignalMatrix apply_laplacian(const NormalizedAdjacency& adj, const SignalMatrix& x) {
  SignalMatrix out;
  propagate_into(adj, x, out, HopCoeffs{.adj = -1.0, .self = 1.0});
  return out;
}

HomophilyReport homophily(const CsrGraph& graph, std::span<const int> labels) {
  if (labels.size() != graph.n()) throw ShapeError("label count does not match node count");
  HomophilyReport report;
  if (graph.n() == 0) return report;
  double total = 0.0;
  for (std::size_t u = 0; u < graph.n(); ++u) {
    std::size_t neighbors = 0, same = 0;
    for (std::size_t v : graph.row(u)) {
      if (v == u) continue;
      ++neighbors;
      if (labels[v] == labels[u]) ++same;
    }
    if (neighbors == 0) {
      ++report.isolated_nodes;
      continue;
    }
    total += static_cast<double>(same) / static_cast<double>(neighbors);
  }
  report.score = total / static_cast<double>(graph.n());
  return report;
}

double homophily_score(const LabeledGraph& g) {
  if (!g.graph) throw ValidationError("labeled graph has no graph");
  return homophily(*g.graph, g.labels).score;
}

std::size_t lower_median(std::vector<std::size_t> values) {
  if (values.empty()) return 0;
  const std::size_t mid = (values.size() - 1) / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  return values[mid];
}

DegreeStats degree_stats(const CsrGraph& graph) {
  DegreeStats s;
  s.degrees.resize(graph.n());
  for (std::size_t i = 0; i < graph.n(); ++i) {
    auto r = graph.row(i);
    s.degrees[i] = r.size() - (std::binary_search(r.begin(), r.end(), i) ? 1 : 0);
  }
  s.median = lower_median(s.degrees);
  return s;
}

}  // namespace sgf
