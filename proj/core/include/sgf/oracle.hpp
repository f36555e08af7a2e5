#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "sgf/filter_spec.hpp"
#include "sgf/graph.hpp"
#include "sgf/signal.hpp"

namespace sgf {

inline constexpr std::size_t kDenseCap = 2048;

// Dense A~ and L~ = I - A~. Refuses graphs above cap.
DenseMatrix dense_adjacency(const NormalizedAdjacency& adj, std::size_t cap = kDenseCap);
DenseMatrix dense_laplacian(const NormalizedAdjacency& adj, std::size_t cap = kDenseCap);

// L~ = S U diag(lambda) U^T S^{-1}. U is orthonormal; S = diag(scale) is the
// identity for symmetric input and D^{rho - 1/2} for a general rho.
struct EigenSystem {
  Vector lambda;  // ascending
  DenseMatrix U;
  Vector scale;
  std::size_t sweeps = 0;
};

// Cyclic Jacobi rotations on a symmetric matrix until the off-diagonal
// Frobenius norm drops below off_tol.
EigenSystem eigendecompose(const DenseMatrix& L, double off_tol = 1e-12, double symmetry_tol = 1e-10);

// Spectrum of L~(rho) through the symmetric conjugate at rho = 1/2.
EigenSystem eigensystem(const NormalizedAdjacency& adj, std::size_t cap = kDenseCap);

using Response = std::function<double(double)>;

// S U g(Lambda) U^T S^{-1} x.
SignalMatrix spectral_filter_oracle(const EigenSystem& es, const Response& response, const SignalMatrix& x);

// The filter spec evaluated with dense matrices built from L (no sparsity, no shared
// code with the propagation engine).
SignalMatrix matrix_polynomial_oracle(const FilterSpec& spec, const DenseMatrix& L, const SignalMatrix& x);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};
std::vector<HistogramBin> eigenvalue_histogram(const Vector& lambda, std::size_t bins = 40, double lo = 0.0,
                                               double hi = 2.0);
void write_histogram_csv(const std::filesystem::path& path, const std::vector<HistogramBin>& bins);

}  // namespace sgf
