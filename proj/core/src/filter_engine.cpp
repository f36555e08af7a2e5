#include "sgf/filter_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "recurrences.hpp"
#include "sgf/errors.hpp"
#include "sgf/propagate.hpp"
#include "sgf/workspace.hpp"

namespace sgf {
namespace detail {

std::vector<double> effective_theta(const FilterSpec& spec) {
  switch (spec.basis) {
    case Basis::kMonomial:
    case Basis::kPPR:
    case Basis::kHK:
    case Basis::kGaussian: return fixed_coefficients(spec.basis, spec.K, hyper_alpha(spec));
    default: return spec.theta;
  }
}

std::vector<double> favard_alpha_or_default(const FilterSpec& spec) {
  return spec.favard_alpha.empty() ? std::vector<double>(static_cast<std::size_t>(spec.K) + 1, 1.0)
                                   : spec.favard_alpha;
}

std::vector<double> favard_beta_or_default(const FilterSpec& spec) {
  return spec.favard_beta.empty() ? std::vector<double>(static_cast<std::size_t>(spec.K) + 1, 0.0) : spec.favard_beta;
}

// Lanczos-type three-term recurrence run independently on every column:
//   v = A~ q_{k-1} - b_{k-1} q_{k-1} - |v_{k-1}| q_{k-2},   q_k = v / |v|
// with b_{k-1} = <A~ q_{k-1}, q_{k-1}>. Both inner products come out of the
// same sparse pass, so one hop per order.
void optbasis_sweep(const NormalizedAdjacency& adj, const SignalMatrix& x, int K, Workspace& ws,
                    const std::function<void(int, const SignalMatrix&)>& visit, std::vector<std::string>* notes,
                    std::size_t& hops) {
  const Eigen::Index f = x.cols();
  const Vector norms = x.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < f; ++j) {
    if (!(norms[j] > 0.0)) throw ValidationError("OptBasis: column " + std::to_string(j) + " has zero norm");
  }
  if (K == 0) {
    visit(0, x * norms.cwiseInverse().asDiagonal());
    return;
  }
  auto prev = ws.acquire(x.rows(), f);
  auto cur = ws.acquire(x.rows(), f);
  prev.m = x * norms.cwiseInverse().asDiagonal();
  visit(0, prev.m);
  Vector last_norm = Vector::Zero(f);
  std::vector<char> active(static_cast<std::size_t>(f), 1);
  const Vector ones = Vector::Ones(f);
  const Vector zeros = Vector::Zero(f);
  Vector dot(f);
  for (int k = 1; k <= K; ++k) {
    propagate_columns_into(adj, prev.m, cur.m, ones, zeros, -last_norm, &dot);
    ++hops;
    cur.m -= prev.m * dot.asDiagonal();
    Vector norm = cur.m.colwise().norm().transpose();
    Vector scale(f);
    for (Eigen::Index j = 0; j < f; ++j) {
      const auto sj = static_cast<std::size_t>(j);
      if (active[sj] && !(norm[j] > kOptBasisBreakdown)) {
        active[sj] = 0;
        if (notes) {
          notes->push_back("OptBasis: column " + std::to_string(j) + " terminated at order " + std::to_string(k) +
                           " (Krylov breakdown); remaining theta ignored");
        }
      }
      if (active[sj]) {
        scale[j] = 1.0 / norm[j];
      } else {
        scale[j] = 0.0;
        norm[j] = 0.0;
      }
    }
    cur.m = cur.m * scale.asDiagonal();
    visit(k, cur.m);
    last_norm = norm;
    prev.m.swap(cur.m);
  }
}

void SparseSpace::optbasis(Value& dst, std::span<const double> theta, std::vector<std::string>* notes) {
  const int K = static_cast<int>(theta.size()) - 1;
  optbasis_sweep(
      adj_, x_, K, ws_,
      [&](int k, const SignalMatrix& h) {
        if (k == 0) {
          dst.m = theta[0] * h;
        } else {
          dst.m += theta[static_cast<std::size_t>(k)] * h;
        }
      },
      notes, hops_);
}

}  // namespace detail

namespace {

bool needs_theta(const FilterSpec& spec) {
  return (spec.taxonomy() == Taxonomy::kVariable) || spec.basis == Basis::kFiGURe;
}

void check_ready(const FilterSpec& spec, std::optional<long> feature_dim) {
  validate(spec, feature_dim);
  if (needs_theta(spec) && spec.theta.empty()) {
    throw ValidationError(std::string(basis_name(spec.basis)) + ": theta is required");
  }
}

std::size_t three_term_budget(int K) { return K == 0 ? 0 : (K == 1 ? 1 : 2); }

std::size_t channel_budget(Basis b, int K) {
  switch (b) {
    case Basis::kIdentity: return 0;
    case Basis::kVarMonomial: return K >= 1 ? 1 : 0;
    case Basis::kChebyshev: return three_term_budget(K);
    case Basis::kBernstein: return K >= 1 ? 2 : 0;
    default: return 0;
  }
}

}  // namespace

FilterResult run_filter(const FilterSpec& spec, const NormalizedAdjacency& adj, const SignalMatrix& x) {
  check_rows(adj, x);
  check_ready(spec, x.cols());
  FilterResult result;
  result.diagnostics.non_finite_input = !x.allFinite();
  if (result.diagnostics.non_finite_input) result.diagnostics.notes.push_back("input contains NaN or Inf");

  Workspace ws;
  detail::SparseSpace space(adj, x, ws);
  if (spec.fusion == Fusion::kConcat) {
    const auto gamma = bank_gamma(spec);
    const Eigen::Index f = x.cols();
    result.output.setZero(x.rows(), f * static_cast<Eigen::Index>(gamma.size()));
    auto part = space.working();
    for (std::size_t q = 0; q < gamma.size(); ++q) {
      detail::eval_channel(space, part, spec, static_cast<int>(q));
      result.output.middleCols(static_cast<Eigen::Index>(q) * f, f) = gamma[q] * part.m;
    }
  } else {
    auto out = Workspace::output(x.rows(), x.cols());
    detail::eval_filter(space, out, spec, &result.diagnostics.notes);
    result.output = std::move(out).release();
  }
  result.diagnostics.hops = space.hops();
  result.diagnostics.peak_working_buffers = ws.peak_buffers();
  result.diagnostics.peak_working_bytes = ws.peak_bytes();
  result.diagnostics.non_finite_output = !result.output.allFinite();
  if (result.diagnostics.non_finite_output) result.diagnostics.notes.push_back("output contains NaN or Inf");
  return result;
}

SignalMatrix apply_filter(const FilterSpec& spec, const NormalizedAdjacency& adj, const SignalMatrix& x) {
  return run_filter(spec, adj, x).output;
}

SignalMatrix bank_apply(const FilterSpec& spec, const NormalizedAdjacency& adj, const SignalMatrix& x) {
  if (spec.taxonomy() != Taxonomy::kBank) throw ValidationError("bank_apply needs a filter-bank spec");
  return apply_filter(spec, adj, x);
}

std::size_t working_buffer_budget(const FilterSpec& spec) {
  const int K = spec.K;
  const std::size_t any = K >= 1 ? 1 : 0;
  switch (spec.basis) {
    case Basis::kIdentity: return 0;
    case Basis::kLinear:
    case Basis::kImpulse:
    case Basis::kMonomial:
    case Basis::kPPR:
    case Basis::kHK:
    case Basis::kGaussian:
    case Basis::kVarLinear:
    case Basis::kVarMonomial:
    case Basis::kAdaGNN: return any;
    case Basis::kHorner:
    case Basis::kBernstein:
    case Basis::kOptBasis:
    case Basis::kFBGNN:
    case Basis::kFAGNN: return 2 * any;
    case Basis::kACMGNN: return 3 * any;
    case Basis::kChebyshev:
    case Basis::kChebInterp:
    case Basis::kLegendre:
    case Basis::kJacobi:
    case Basis::kFavard: return three_term_budget(K);
    case Basis::kClenshaw: return K == 0 ? 0 : (K == 1 ? 2 : 3);
    case Basis::kG2CN: return 1 + (K >= 2 ? 1 : 0);
    case Basis::kGNNLFHF: return 2;
    case Basis::kFiGURe: {
      std::size_t widest = 0;
      for (Basis b : figure_channels(spec)) widest = std::max(widest, channel_budget(b, K));
      return 1 + widest;
    }
  }
  return 0;
}

std::vector<double> fixed_coefficients(Basis basis, int K, double alpha) {
  if (K < 0) throw ValidationError("K must be >= 0");
  const auto k1 = static_cast<std::size_t>(K) + 1;
  std::vector<double> theta(k1, 0.0);
  switch (basis) {
    case Basis::kIdentity: theta[0] = 1.0; break;
    case Basis::kImpulse: theta[k1 - 1] = 1.0; break;
    case Basis::kMonomial: std::fill(theta.begin(), theta.end(), 1.0 / static_cast<double>(k1)); break;
    case Basis::kPPR: {
      if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw DomainError("PPR: alpha must lie in (0, 1]; alpha = 0 gives all-zero coefficients");
      }
      double t = alpha;
      for (std::size_t k = 0; k < k1; ++k) {
        theta[k] = t;
        t *= 1.0 - alpha;
      }
      break;
    }
    case Basis::kHK:
    case Basis::kGaussian: {
      if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be > 0");
      double t = basis == Basis::kHK ? std::exp(-alpha) : 1.0;
      for (std::size_t k = 0; k < k1; ++k) {
        if (k > 0) t *= alpha / static_cast<double>(k);
        theta[k] = t;
      }
      break;
    }
    default: throw ValidationError(std::string(basis_name(basis)) + " has no closed-form coefficients");
  }
  return theta;
}

std::vector<double> chebinterp_weights(std::span<const double> theta) {
  if (theta.empty()) throw ValidationError("ChebInterp: theta must be non-empty");
  const std::size_t k1 = theta.size();
  const double scale = 2.0 / static_cast<double>(k1);
  std::vector<double> w(k1, 0.0);
  for (std::size_t kappa = 0; kappa < k1; ++kappa) {
    const double node = std::cos((static_cast<double>(kappa) + 0.5) * std::numbers::pi / static_cast<double>(k1));
    // T_0, T_1, ... at the node by the first-kind recurrence
    double t_prev = 1.0, t_cur = node;
    for (std::size_t k = 0; k < k1; ++k) {
      double tk;
      if (k == 0) {
        tk = 1.0;
      } else if (k == 1) {
        tk = node;
      } else {
        tk = 2.0 * node * t_cur - t_prev;
        t_prev = t_cur;
        t_cur = tk;
      }
      w[k] += scale * theta[kappa] * tk;
    }
  }
  return w;
}

std::vector<double> bernstein_coefficients(std::span<const double> theta) {
  if (theta.empty()) throw ValidationError("Bernstein: theta must be non-empty");
  const int K = static_cast<int>(theta.size()) - 1;
  if (K > 60) throw DomainError("Bernstein: K must be <= 60");
  std::vector<double> c(theta.size());
  if (K <= 40) {
    double binom = 1.0;
    for (int k = 0; k <= K; ++k) {
      if (k > 0) binom = binom * static_cast<double>(K - k + 1) / static_cast<double>(k);
      c[static_cast<std::size_t>(k)] = theta[static_cast<std::size_t>(k)] * std::ldexp(binom, -K);
    }
  } else {
    const double lk = std::lgamma(K + 1.0) - K * std::numbers::ln2;
    for (int k = 0; k <= K; ++k) {
      const double log_c = lk - std::lgamma(k + 1.0) - std::lgamma(K - k + 1.0);
      c[static_cast<std::size_t>(k)] = theta[static_cast<std::size_t>(k)] * std::exp(log_c);
    }
  }
  return c;
}

JacobiCoefficients jacobi_coefficients(int k, double a, double b) {
  if (k < 2) throw ValidationError("Jacobi recurrence coefficients start at k = 2");
  const double s = 2.0 * k + a + b;
  const double kab = k + a + b;
  JacobiCoefficients c;
  c.delta = s * (s - 1.0) / (2.0 * k * kab);
  c.delta_prime = (s - 1.0) * (a * a - b * b) / (2.0 * k * kab * (s - 2.0));
  c.delta_second = (k + a - 1.0) * (k + b - 1.0) * s / (k * kab * (s - 2.0));
  return c;
}

SignalMatrix chebyshev_recurrence_step(const SignalMatrix& prev, const SignalMatrix& prev2,
                                       const NormalizedAdjacency& adj) {
  if (prev.rows() != prev2.rows() || prev.cols() != prev2.cols()) throw ShapeError("step inputs differ in shape");
  SignalMatrix next = prev2;
  propagate_into(adj, prev, next, {.adj = -2.0, .self = 2.0, .keep = -1.0});
  return next;
}

SignalMatrix legendre_step(const SignalMatrix& prev, const SignalMatrix& prev2, const NormalizedAdjacency& adj,
                           int k) {
  if (k < 2) throw ValidationError("legendre_step needs k >= 2");
  if (prev.rows() != prev2.rows() || prev.cols() != prev2.cols()) throw ShapeError("step inputs differ in shape");
  const double a = (2.0 * k - 1.0) / k;
  SignalMatrix next = prev2;
  propagate_into(adj, prev, next, {.adj = -a, .self = a, .keep = -(k - 1.0) / k});
  return next;
}

SignalMatrix jacobi_step(const SignalMatrix& prev, const SignalMatrix& prev2, const NormalizedAdjacency& adj, int k,
                         double a, double b) {
  if (prev.rows() != prev2.rows() || prev.cols() != prev2.cols()) throw ShapeError("step inputs differ in shape");
  const JacobiCoefficients c = jacobi_coefficients(k, a, b);
  SignalMatrix next = prev2;
  propagate_into(adj, prev, next, {.adj = c.delta, .self = c.delta_prime, .keep = -c.delta_second});
  return next;
}

namespace {
SignalMatrix run_variable(Basis basis, std::span<const double> theta, const NormalizedAdjacency& adj,
                          const SignalMatrix& x) {
  FilterSpec spec;
  spec.basis = basis;
  spec.K = static_cast<int>(theta.size()) - 1;
  spec.theta.assign(theta.begin(), theta.end());
  return apply_filter(spec, adj, x);
}
}  // namespace

SignalMatrix horner_apply(std::span<const double> theta, const NormalizedAdjacency& adj, const SignalMatrix& x) {
  return run_variable(Basis::kHorner, theta, adj, x);
}

SignalMatrix clenshaw_apply(std::span<const double> theta, const NormalizedAdjacency& adj, const SignalMatrix& x) {
  return run_variable(Basis::kClenshaw, theta, adj, x);
}

SignalMatrix bernstein_apply(std::span<const double> theta, const NormalizedAdjacency& adj, const SignalMatrix& x) {
  return run_variable(Basis::kBernstein, theta, adj, x);
}

SignalMatrix optbasis_apply(std::span<const double> theta, const NormalizedAdjacency& adj, const SignalMatrix& x) {
  return run_variable(Basis::kOptBasis, theta, adj, x);
}

SignalMatrix favard_apply(std::span<const double> favard_alpha, std::span<const double> favard_beta,
                          std::span<const double> theta, const NormalizedAdjacency& adj, const SignalMatrix& x) {
  FilterSpec spec;
  spec.basis = Basis::kFavard;
  spec.K = static_cast<int>(theta.size()) - 1;
  spec.theta.assign(theta.begin(), theta.end());
  spec.favard_alpha.assign(favard_alpha.begin(), favard_alpha.end());
  spec.favard_beta.assign(favard_beta.begin(), favard_beta.end());
  return apply_filter(spec, adj, x);
}

double frequency_response(const FilterSpec& spec, double lambda, std::size_t column, std::optional<long> feature_dim) {
  if (spec.fusion == Fusion::kConcat) throw ValidationError("concat fusion has no scalar frequency response");
  long cols = 1;
  if (spec.basis == Basis::kAdaGNN) {
    const auto g = bank_gamma(spec);
    cols = feature_dim ? *feature_dim : static_cast<long>(g.size() == 1 ? column + 1 : g.size());
  }
  check_ready(spec, spec.basis == Basis::kAdaGNN ? std::optional<long>(cols) : std::nullopt);
  detail::ScalarSpace space(lambda, column, cols);
  detail::Scalar out;
  detail::eval_filter(space, out, spec, nullptr);
  return out.v;
}

}  // namespace sgf
