#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sgf/signal.hpp"

namespace sgf {

using Edge = std::pair<std::size_t, std::size_t>;

// Immutable CSR adjacency. Rows are sorted and free of duplicates.
class CsrGraph {
 public:
  CsrGraph() = default;

  // Takes raw CSR arrays and checks the structural invariants.
  CsrGraph(std::size_t n, std::vector<std::size_t> indptr, std::vector<std::size_t> indices);

  // Undirected edges, both directions materialized, duplicates dropped,
  // one self-loop per node added.
  static CsrGraph from_edges(std::size_t n, std::span<const Edge> edges);

  // Returns a copy with exactly one self-loop per row; idempotent.
  CsrGraph with_self_loops() const;

  std::size_t n() const { return n_; }
  std::size_t nnz() const { return indices_.size(); }
  const std::vector<std::size_t>& indptr() const { return indptr_; }
  const std::vector<std::size_t>& indices() const { return indices_; }

  std::span<const std::size_t> row(std::size_t i) const {
    return {indices_.data() + indptr_[i], indptr_[i + 1] - indptr_[i]};
  }
  // Stored entries in row i, self-loop included when present.
  std::size_t row_size(std::size_t i) const { return indptr_[i + 1] - indptr_[i]; }
  bool has_self_loops() const;
  bool is_symmetric() const;

  // Relabels node i as perm[i].
  CsrGraph permuted(std::span<const std::size_t> perm) const;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> indptr_{0};
  std::vector<std::size_t> indices_;
};

// A~ = D^{rho-1} A D^{-rho} over a self-looped graph, stored as per-entry weights.
class NormalizedAdjacency {
 public:
  NormalizedAdjacency(std::shared_ptr<const CsrGraph> graph, double rho);

  const CsrGraph& graph() const { return *graph_; }
  std::shared_ptr<const CsrGraph> graph_ptr() const { return graph_; }
  std::size_t n() const { return graph_->n(); }
  double rho() const { return rho_; }
  const std::vector<double>& left_scale() const { return left_; }
  const std::vector<double>& right_scale() const { return right_; }
  // Entry weights aligned with graph().indices().
  const std::vector<double>& values() const { return values_; }

  // For a symmetric graph, A~(rho)^T = A~(1 - rho).
  NormalizedAdjacency transposed() const;

 private:
  std::shared_ptr<const CsrGraph> graph_;
  double rho_;
  std::vector<double> left_;
  std::vector<double> right_;
  std::vector<double> values_;
};

struct Splits {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

struct LabeledGraph {
  std::shared_ptr<const CsrGraph> graph;
  SignalMatrix features;
  std::vector<int> labels;
  Splits splits;

  std::size_t n() const { return graph ? graph->n() : 0; }
  int num_classes() const;
  // Throws ValidationError on inconsistent sizes or overlapping splits.
  void validate() const;
};

struct DegreeStats {
  std::vector<std::size_t> degrees;  // self-loop excluded
  std::size_t median = 0;            // lower median
};

struct HomophilyReport {
  double score = 0.0;
  std::size_t isolated_nodes = 0;  // nodes with no neighbor besides themselves
};

CsrGraph load_edge_list(const std::filesystem::path& path,
                        std::optional<std::size_t> n_hint = std::nullopt);
CsrGraph parse_edge_list(std::istream& in, std::optional<std::size_t> n_hint = std::nullopt);

NormalizedAdjacency normalize(std::shared_ptr<const CsrGraph> graph, double rho);
NormalizedAdjacency normalize(const CsrGraph& graph, double rho);

SignalMatrix spmv_adj(const NormalizedAdjacency& adj, const SignalMatrix& x);
SignalMatrix apply_laplacian(const NormalizedAdjacency& adj, const SignalMatrix& x);

HomophilyReport homophily(const CsrGraph& graph, std::span<const int> labels);
double homophily_score(const LabeledGraph& g);

DegreeStats degree_stats(const CsrGraph& graph);
std::size_t lower_median(std::vector<std::size_t> values);

}  // namespace sgf
