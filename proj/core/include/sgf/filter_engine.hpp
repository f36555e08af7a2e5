#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sgf/filter_spec.hpp"
#include "sgf/graph.hpp"
#include "sgf/signal.hpp"

namespace sgf {

struct FilterDiagnostics {
  bool non_finite_input = false;
  bool non_finite_output = false;
  std::size_t hops = 0;                  // sparse propagations performed
  std::size_t peak_working_buffers = 0;  // n x F buffers besides input and output
  std::size_t peak_working_bytes = 0;
  std::vector<std::string> notes;
};

struct FilterResult {
  SignalMatrix output;
  FilterDiagnostics diagnostics;
};

// g(L~) x for any of the 27 filters. Validates the FilterSpec first.
FilterResult run_filter(const FilterSpec& spec, const NormalizedAdjacency& adj, const SignalMatrix& x);
SignalMatrix apply_filter(const FilterSpec& spec, const NormalizedAdjacency& adj, const SignalMatrix& x);
// Same as apply_filter but refuses non-bank specs.
SignalMatrix bank_apply(const FilterSpec& spec, const NormalizedAdjacency& adj, const SignalMatrix& x);

// Working buffers apply_filter needs for this spec (exact, not an upper bound).
std::size_t working_buffer_budget(const FilterSpec& spec);

// Closed-form theta for Monomial, PPR, HK, Gaussian (and Impulse as e_K).
std::vector<double> fixed_coefficients(Basis basis, int K, double alpha);

// w_k = 2/(K+1) sum_kappa theta_kappa T_k(x_kappa), x_kappa = cos((kappa+1/2) pi / (K+1)).
std::vector<double> chebinterp_weights(std::span<const double> theta);

// theta_k C(K,k) / 2^K.
std::vector<double> bernstein_coefficients(std::span<const double> theta);

struct JacobiCoefficients {
  double delta = 0.0;
  double delta_prime = 0.0;
  double delta_second = 0.0;
};
// For k >= 2: T_k = delta (I - L~) T_{k-1} + delta' T_{k-1} - delta'' T_{k-2}.
JacobiCoefficients jacobi_coefficients(int k, double a, double b);

// Single recurrence steps returning a fresh matrix (prev = T_{k-1}, prev2 = T_{k-2}).
SignalMatrix chebyshev_recurrence_step(const SignalMatrix& prev, const SignalMatrix& prev2,
                                       const NormalizedAdjacency& adj);
SignalMatrix legendre_step(const SignalMatrix& prev, const SignalMatrix& prev2,
                           const NormalizedAdjacency& adj, int k);
SignalMatrix jacobi_step(const SignalMatrix& prev, const SignalMatrix& prev2,
                         const NormalizedAdjacency& adj, int k, double a, double b);

SignalMatrix horner_apply(std::span<const double> theta, const NormalizedAdjacency& adj, const SignalMatrix& x);
SignalMatrix clenshaw_apply(std::span<const double> theta, const NormalizedAdjacency& adj, const SignalMatrix& x);
SignalMatrix bernstein_apply(std::span<const double> theta, const NormalizedAdjacency& adj, const SignalMatrix& x);
SignalMatrix favard_apply(std::span<const double> favard_alpha, std::span<const double> favard_beta,
                          std::span<const double> theta, const NormalizedAdjacency& adj, const SignalMatrix& x);
SignalMatrix optbasis_apply(std::span<const double> theta, const NormalizedAdjacency& adj, const SignalMatrix& x);

// Residual norm (relative to the unit-norm start vector) below which an
// OptBasis column is treated as Krylov breakdown.
inline constexpr double kOptBasisBreakdown = 1e-6;

// g^(lambda): the filter's recurrence run in scalar arithmetic. column selects
// the per-feature response of AdaGNN; feature_dim disambiguates its gamma layout.
double frequency_response(const FilterSpec& spec, double lambda, std::size_t column = 0,
                          std::optional<long> feature_dim = std::nullopt);

}  // namespace sgf
