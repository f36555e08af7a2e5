#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sgf/filter_spec.hpp"
#include "sgf/graph.hpp"
#include "sgf/oracle.hpp"
#include "sgf/signal.hpp"

namespace sgf {

struct TargetSignal {
  std::string name;  // band, combine, high, low, reject or custom
  Response response;
};

// band e^{-10(l-1)^2}, combine |sin(pi l)|, high 1 - e^{-10 l^2}, low e^{-10 l^2},
// reject 1 - e^{-10(l-1)^2}.
TargetSignal builtin_target(const std::string& name);
const std::vector<std::string>& builtin_target_names();

// z = U g*(Lambda) U^T x.
SignalMatrix make_target(const TargetSignal& signal, const EigenSystem& es, const SignalMatrix& x);

// Diagonal damping, used only when the equilibrated basis is numerically rank deficient.
inline constexpr double kTikhonov = 1e-10;

struct RegressionReport {
  std::string filter;
  std::string signal;
  std::vector<double> theta_fit;
  std::vector<double> hyper_fit;  // chosen alpha (fit_hyper); empty for fit_linear
  double r2 = 0.0;
  double residual_norm = 0.0;
  double condition_estimate = 0.0;  // of the column-equilibrated Gram matrix
  bool ill_conditioned = false;
  std::vector<std::string> notes;
};

// Least squares over the filter's own basis images b_k = T^(k)(L~) x.
RegressionReport fit_linear(const FilterSpec& spec, const NormalizedAdjacency& adj, const SignalMatrix& x,
                            const SignalMatrix& z);

// 0.05 steps over the filter's alpha domain (capped at 5 where unbounded).
std::vector<double> default_alpha_grid(Basis basis);

// Grid search over alpha with a least-squares output gain per point; the
// gain is returned as theta_fit[0]. Ties go to the smallest alpha.
RegressionReport fit_hyper(const FilterSpec& spec, const NormalizedAdjacency& adj, const SignalMatrix& x,
                           const SignalMatrix& z, std::span<const double> grid);

// 1 - SS_res / SS_tot per column (about the column mean), averaged over columns.
double r2_score(const SignalMatrix& pred, const SignalMatrix& target);

}  // namespace sgf
