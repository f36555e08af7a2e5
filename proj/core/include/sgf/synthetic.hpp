#pragma once

#include <cstdint>
#include <random>

#include "sgf/filter_spec.hpp"
#include "sgf/graph.hpp"
#include "sgf/signal.hpp"

namespace sgf {

using Rng = std::mt19937_64;

// G(n, p) plus a random spanning tree, so the result is connected.
CsrGraph random_connected_graph(std::size_t n, double p, std::uint64_t seed);

// Simple d-regular graph by stub pairing (Steger-Wormald: only admissible
// pairs are drawn, restart on a dead end). n * d must be even, d < n.
CsrGraph random_regular_graph(std::size_t n, std::size_t d, std::uint64_t seed);

// 4-neighbour lattice, node id r * cols + c.
CsrGraph grid_graph(std::size_t rows, std::size_t cols);

// Points in the unit square joined within radius, chained into one component.
CsrGraph random_geometric_graph(std::size_t n, double radius, std::uint64_t seed);

struct PlantedConfig {
  std::size_t n = 600;
  int classes = 3;
  double avg_degree = 8.0;
  double homophily = 0.85;       // expected fraction of intra-class edges
  double degree_exponent = 2.5;  // Pareto tail of the degree weights; <= 0 means uniform
  std::size_t features = 16;
  double signal = 1.0;  // class-mean separation relative to unit noise
  std::uint64_t seed = 1;
};

// Degree-corrected planted partition with noisy class-mean features and a
// 60/20/20 split.
LabeledGraph planted_partition(const PlantedConfig& cfg);

SignalMatrix white_noise(std::size_t n, std::size_t f, std::uint64_t seed);

// A valid spec of the given filter with random coefficients and
// hyperparameters inside their domains. feature_dim sizes AdaGNN gamma.
FilterSpec random_filter_spec(const std::string& name, int K, long feature_dim, Rng& rng);

}  // namespace sgf
