#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "sgf/graph.hpp"
#include "sgf/signal.hpp"

namespace sgf::test {

inline CsrGraph path_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return CsrGraph::from_edges(n, e);
}

inline CsrGraph star_graph(std::size_t leaves) {
  std::vector<Edge> e;
  for (std::size_t i = 1; i <= leaves; ++i) e.emplace_back(0, i);
  return CsrGraph::from_edges(leaves + 1, e);
}

inline CsrGraph cycle_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return CsrGraph::from_edges(n, e);
}

inline CsrGraph two_node_graph() {
  const std::vector<Edge> e{{0, 1}};
  return CsrGraph::from_edges(2, e);
}

// D^{rho-1} A D^{-rho} straight from the CSR pattern, without the engine's scales.
inline DenseMatrix brute_adjacency(const CsrGraph& g, double rho) {
  const auto n = static_cast<Eigen::Index>(g.n());
  DenseMatrix A = DenseMatrix::Zero(n, n);
  for (std::size_t i = 0; i < g.n(); ++i) {
    for (std::size_t j : g.row(i)) A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
  }
  const Vector d = A.rowwise().sum();
  DenseMatrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = std::pow(d[i], rho - 1.0) * A(i, j) * std::pow(d[j], -rho);
  }
  return out;
}

inline double max_abs(const DenseMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace sgf::test
