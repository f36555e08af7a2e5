#pragma once

#include <span>
#include <string>
#include <vector>

#include "sgf/filter_spec.hpp"
#include "sgf/graph.hpp"
#include "sgf/signal.hpp"

namespace sgf {

// Per-hop images H^(k) of a filter plus the weights that recombine them into
// the filter output: out[:, j] = sum_k weights(k, j) H^(k)[:, j].
// Multi-channel banks store Q blocks of images; channel[k] names the block.
struct BasisStack {
  std::vector<SignalMatrix> images;
  DenseMatrix weights;       // images.size() x F
  std::vector<int> channel;  // channel id per image
  int channels = 1;
  Fusion fusion = Fusion::kSum;
  std::vector<std::string> notes;

  std::size_t size() const { return images.size(); }
  Eigen::Index rows() const { return images.empty() ? 0 : images.front().rows(); }
  Eigen::Index cols() const { return images.empty() ? 0 : images.front().cols(); }

  // Filter output from the stored weights (n x F, or n x QF under concat).
  SignalMatrix recombine() const;
  // sum_k theta_k H^(k), the contract for theta-linear bases.
  SignalMatrix recombine(std::span<const double> theta) const;
  // [H^(0) | H^(1) | ...], the mini-batch embedding layout.
  SignalMatrix concatenated() const;
};

// Exports the basis images of any filter. Theta-linear bases store their own
// T^(k) x; product-form filters (VarLinear and the single-layer banks) are
// expanded into powers of A~ with the expanded coefficients as weights.
BasisStack export_basis(const FilterSpec& spec, const NormalizedAdjacency& adj, const SignalMatrix& x);

// Coefficients of prod_j (c_j + d_j t) in powers of t.
std::vector<double> expand_linear_product(std::span<const double> c, std::span<const double> d);

}  // namespace sgf
