#pragma once

// Filter recurrences written once against an abstract "space" so the same
// code drives sparse propagation (SparseSpace) and the scalar frequency
// response (ScalarSpace, where A~ acts as 1 - lambda and x as 1).

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <span>
#include <utility>
#include <vector>

#include "sgf/errors.hpp"
#include "sgf/filter_engine.hpp"
#include "sgf/propagate.hpp"
#include "sgf/workspace.hpp"

namespace sgf::detail {

class SparseSpace {
 public:
  using Value = Workspace::Buffer;

  SparseSpace(const NormalizedAdjacency& adj, const SignalMatrix& x, Workspace& ws)
      : adj_(adj), x_(x), ws_(ws) {}

  Value working() { return ws_.acquire(x_.rows(), x_.cols()); }
  Eigen::Index cols() const { return x_.cols(); }
  std::size_t hops() const { return hops_; }

  // dst = c.adj A~ src + c.self src + c.keep dst + c.input x
  void hop(Value& dst, const Value& src, const HopCoeffs& c) {
    propagate_into(adj_, src.m, dst.m, c, &x_);
    ++hops_;
  }
  // Same with src = x.
  void hop_input(Value& dst, const HopCoeffs& c) {
    propagate_into(adj_, x_, dst.m, c, &x_);
    ++hops_;
  }
  // dst = (A~ src) diag(a) + src diag(s)
  void hop_columns(Value& dst, const Value& src, const Vector& a, const Vector& s) {
    propagate_columns_into(adj_, src.m, dst.m, a, s, Vector::Zero(a.size()));
    ++hops_;
  }
  void set_input(Value& dst, double a) { dst.m = a * x_; }
  void axpy(Value& dst, double a, const Value& src) { dst.m += a * src.m; }
  void lincomb(Value& dst, double a, const Value& u, double b, const Value& v) { dst.m = a * u.m + b * v.m; }
  void copy(Value& dst, const Value& src) { dst.m = src.m; }
  static void swap(Value& a, Value& b) { a.m.swap(b.m); }

  void optbasis(Value& dst, std::span<const double> theta, std::vector<std::string>* notes);

 private:
  const NormalizedAdjacency& adj_;
  const SignalMatrix& x_;
  Workspace& ws_;
  std::size_t hops_ = 0;
};

// Per-column orthonormal Krylov basis of x, visiting h^(0..K) in order; a
// column that breaks down stays zero from then on.
void optbasis_sweep(const NormalizedAdjacency& adj, const SignalMatrix& x, int K, Workspace& ws,
                    const std::function<void(int, const SignalMatrix&)>& visit, std::vector<std::string>* notes,
                    std::size_t& hops);

// Favard parameters with defaults (alpha_k = 1, beta_k = 0) filled in.
std::vector<double> favard_alpha_or_default(const FilterSpec& spec);
std::vector<double> favard_beta_or_default(const FilterSpec& spec);

struct Scalar {
  double v = 0.0;
};

class ScalarSpace {
 public:
  using Value = Scalar;

  ScalarSpace(double lambda, std::size_t column, long cols) : a_(1.0 - lambda), column_(column), cols_(cols) {}

  Value working() { return {}; }
  Eigen::Index cols() const { return cols_; }

  void hop(Value& dst, const Value& src, const HopCoeffs& c) {
    dst.v = c.adj * a_ * src.v + c.self * src.v + c.keep * dst.v + c.input;
  }
  void hop_input(Value& dst, const HopCoeffs& c) { dst.v = c.adj * a_ + c.self + c.keep * dst.v + c.input; }
  void hop_columns(Value& dst, const Value& src, const Vector& a, const Vector& s) {
    const auto j = static_cast<Eigen::Index>(column_);
    if (j >= a.size()) throw ValidationError("column index beyond feature dimension");
    dst.v = a[j] * a_ * src.v + s[j] * src.v;
  }
  void set_input(Value& dst, double a) { dst.v = a; }
  void axpy(Value& dst, double a, const Value& src) { dst.v += a * src.v; }
  void lincomb(Value& dst, double a, const Value& u, double b, const Value& v) { dst.v = a * u.v + b * v.v; }
  void copy(Value& dst, const Value& src) { dst.v = src.v; }
  static void swap(Value& a, Value& b) { std::swap(a.v, b.v); }

  void optbasis(Value&, std::span<const double>, std::vector<std::string>*) {
    throw ValidationError("OptBasis has no signal-independent frequency response");
  }

 private:
  double a_;
  std::size_t column_;
  long cols_;
};

template <class S>
using V = typename S::Value;

// sum_k theta_k (shift I + A~)^k x, nested evaluation with one scratch buffer.
template <class S>
void nested_into(S& s, V<S>& dst, std::span<const double> theta, double shift) {
  const int K = static_cast<int>(theta.size()) - 1;
  s.set_input(dst, theta[K]);
  if (K == 0) return;
  auto scratch = s.working();
  for (int k = K - 1; k >= 0; --k) {
    s.hop(scratch, dst, {.adj = 1.0, .self = shift, .input = theta[k]});
    S::swap(dst, scratch);
  }
}

// gain * prod_j (shifts[j] I + A~) x, one scratch buffer.
template <class S>
void product_into(S& s, V<S>& dst, std::span<const double> shifts, double gain) {
  s.set_input(dst, gain);
  if (shifts.empty()) return;
  auto scratch = s.working();
  for (double shift : shifts) {
    s.hop(scratch, dst, {.adj = 1.0, .self = shift});
    S::swap(dst, scratch);
  }
}

// Residual (layer-wise) Horner form with two rotating states.
template <class S>
void horner_into(S& s, V<S>& dst, std::span<const double> theta) {
  const int K = static_cast<int>(theta.size()) - 1;
  if (K == 0) {
    s.set_input(dst, theta[0]);
    return;
  }
  auto h = s.working();
  auto next = s.working();
  s.set_input(h, theta[K]);
  for (int j = K - 1; j >= 0; --j) {
    s.hop(next, h, {.adj = 1.0, .input = theta[j]});
    S::swap(h, next);
  }
  S::swap(dst, h);
}

// sum_k theta_k T_k x where T_0 = c0 x, T_1 = (a_1 A~ + s_1) T_0 and
// T_k = (a_k A~ + s_k) T_{k-1} + p_k T_{k-2}; coef(k) returns {a_k, s_k, p_k}
// in HopCoeffs{adj, self, keep}. The new term overwrites T_{k-2} in place.
template <class S, class Coef>
void three_term_into(S& s, V<S>& dst, std::span<const double> theta, double c0, Coef&& coef) {
  const int K = static_cast<int>(theta.size()) - 1;
  s.set_input(dst, theta[0] * c0);
  if (K == 0) return;
  auto prev = s.working();
  const HopCoeffs h1 = coef(1);
  s.hop_input(prev, {.adj = h1.adj * c0, .self = h1.self * c0});
  s.axpy(dst, theta[1], prev);
  if (K == 1) return;
  auto cur = s.working();
  const HopCoeffs h2 = coef(2);
  s.hop(cur, prev, {.adj = h2.adj, .self = h2.self, .input = h2.keep * c0});
  s.axpy(dst, theta[2], cur);
  S::swap(prev, cur);
  for (int k = 3; k <= K; ++k) {
    const HopCoeffs h = coef(k);
    s.hop(cur, prev, {.adj = h.adj, .self = h.self, .keep = h.keep});
    s.axpy(dst, theta[k], cur);
    S::swap(prev, cur);
  }
}

// Recurrence coefficients {a_k, s_k, p_k} for three_term_into.
inline HopCoeffs chebyshev_coef(int k) {
  return k == 1 ? HopCoeffs{.adj = -1.0, .self = 1.0} : HopCoeffs{.adj = -2.0, .self = 2.0, .keep = -1.0};
}

// Second kind: U_1 = 2 L~.
inline HopCoeffs chebyshev2_coef(int k) {
  return k == 1 ? HopCoeffs{.adj = -2.0, .self = 2.0} : HopCoeffs{.adj = -2.0, .self = 2.0, .keep = -1.0};
}

inline HopCoeffs legendre_coef(int k) {
  if (k == 1) return HopCoeffs{.adj = -1.0, .self = 1.0};
  const double a = (2.0 * k - 1.0) / k;
  return HopCoeffs{.adj = -a, .self = a, .keep = -(k - 1.0) / k};
}

inline HopCoeffs jacobi_coef(int k, double a, double b) {
  if (k == 1) return HopCoeffs{.adj = (a + b + 2.0) / 2.0, .self = (a - b) / 2.0};
  const JacobiCoefficients c = jacobi_coefficients(k, a, b);
  return HopCoeffs{.adj = c.delta, .self = c.delta_prime, .keep = -c.delta_second};
}

inline HopCoeffs favard_coef(int k, std::span<const double> fa, std::span<const double> fb) {
  const double inv = 1.0 / std::sqrt(fa[k]);
  const double keep = k == 1 ? 0.0 : -std::sqrt(fa[k - 1]) * inv;
  return HopCoeffs{.adj = inv, .self = -fb[k] * inv, .keep = keep};
}

template <class S>
void chebyshev_into(S& s, V<S>& dst, std::span<const double> theta) {
  three_term_into(s, dst, theta, 1.0, chebyshev_coef);
}

template <class S>
void legendre_into(S& s, V<S>& dst, std::span<const double> theta) {
  three_term_into(s, dst, theta, 1.0, legendre_coef);
}

template <class S>
void jacobi_into(S& s, V<S>& dst, std::span<const double> theta, double a, double b) {
  three_term_into(s, dst, theta, 1.0, [a, b](int k) { return jacobi_coef(k, a, b); });
}

template <class S>
void favard_into(S& s, V<S>& dst, std::span<const double> theta, std::span<const double> fa,
                 std::span<const double> fb) {
  three_term_into(s, dst, theta, 1.0 / std::sqrt(fa[0]), [fa, fb](int k) { return favard_coef(k, fa, fb); });
}

// Second-kind Chebyshev sum by the layer-wise residual form
//   H(j+1) = 2 L~ H(j) - H(j-1) + theta_{K-1-j} x,  H(0) = theta_K x,
// keeping the three residual states in rotating buffers.
template <class S>
void clenshaw_into(S& s, V<S>& dst, std::span<const double> theta) {
  const int K = static_cast<int>(theta.size()) - 1;
  if (K == 0) {
    s.set_input(dst, theta[0]);
    return;
  }
  auto h0 = s.working();
  auto h1 = s.working();
  s.set_input(h0, theta[K]);
  s.hop(h1, h0, {.adj = -2.0, .self = 2.0, .input = theta[K - 1]});
  if (K >= 2) {
    auto h2 = s.working();
    for (int j = 1; j <= K - 1; ++j) {
      s.hop(h2, h1, {.adj = -2.0, .self = 2.0, .input = theta[K - 1 - j]});
      s.axpy(h2, -1.0, h0);
      S::swap(h0, h1);
      S::swap(h1, h2);
    }
  }
  S::swap(dst, h1);
}

// Each term (2I - L~)^{K-k} L~^k x is rebuilt from x with K hops.
template <class S>
void bernstein_into(S& s, V<S>& dst, std::span<const double> theta) {
  const int K = static_cast<int>(theta.size()) - 1;
  const std::vector<double> c = bernstein_coefficients(theta);
  if (K == 0) {
    s.set_input(dst, c[0]);
    return;
  }
  s.set_input(dst, 0.0);
  auto t = s.working();
  auto u = s.working();
  const HopCoeffs lap{.adj = -1.0, .self = 1.0};
  const HopCoeffs shifted{.adj = 1.0, .self = 1.0};  // 2I - L~ = I + A~
  for (int k = 0; k <= K; ++k) {
    if (c[k] == 0.0) continue;
    s.hop_input(t, k >= 1 ? lap : shifted);
    for (int i = 1; i < K; ++i) {
      s.hop(u, t, i < k ? lap : shifted);
      S::swap(t, u);
    }
    s.axpy(dst, c[k], t);
  }
}

inline Vector layer_gamma(std::span<const double> gamma, long cols, int layer) {
  const auto f = static_cast<std::size_t>(cols);
  Vector g(cols);
  if (gamma.size() == 1) {
    g.setConstant(gamma[0]);
  } else {
    const std::size_t off = gamma.size() == f ? 0 : static_cast<std::size_t>(layer) * f;
    if (off + f > gamma.size()) throw ValidationError("AdaGNN: gamma must have 1, F or K*F entries");
    for (std::size_t j = 0; j < f; ++j) g[static_cast<Eigen::Index>(j)] = gamma[off + j];
  }
  return g;
}

// H <- H - L~ H Gamma, i.e. column q becomes (1 - g_q) H + g_q A~ H.
template <class S>
void adagnn_into(S& s, V<S>& dst, std::span<const double> gamma, int K) {
  s.set_input(dst, 1.0);
  if (K == 0) return;
  auto scratch = s.working();
  for (int j = 0; j < K; ++j) {
    const Vector g = layer_gamma(gamma, s.cols(), j);
    s.hop_columns(scratch, dst, g, Vector::Ones(g.size()) - g);
    S::swap(dst, scratch);
  }
}

// Per-layer gamma: Q entries shared by all layers or Q*K entries.
inline double layer_weight(std::span<const double> gamma, int q, int Q, int layer) {
  const auto idx = gamma.size() == static_cast<std::size_t>(Q) ? q : layer * Q + q;
  return gamma[static_cast<std::size_t>(idx)];
}

// Single-layer banks composed K times; one image per channel per layer.
// kind: 0 FBGNN, 1 ACMGNN, 2 FAGNN.
template <class S>
void linear_bank_into(S& s, V<S>& dst, int kind, std::span<const double> gamma, int K, double beta) {
  s.set_input(dst, 1.0);
  if (K == 0) return;
  const int Q = kind == 1 ? 3 : 2;
  auto low = s.working();
  auto high = s.working();
  if (kind == 1) {
    auto ident = s.working();
    for (int j = 0; j < K; ++j) {
      s.hop(low, dst, {.adj = 1.0});               // (I - L~) H
      s.lincomb(high, 1.0, dst, -1.0, low);        // L~ H
      s.copy(ident, dst);                          // I H
      s.lincomb(dst, layer_weight(gamma, 0, Q, j), low, layer_weight(gamma, 1, Q, j), high);
      s.axpy(dst, layer_weight(gamma, 2, Q, j), ident);
    }
    return;
  }
  const double shift = kind == 2 ? beta : 0.0;
  for (int j = 0; j < K; ++j) {
    s.hop(low, dst, {.adj = 1.0, .self = shift});  // ((beta+1) I - L~) H
    if (kind == 2) {
      s.lincomb(high, 2.0 * shift, dst, -1.0, low);  // ((beta-1) I + L~) H
    } else {
      s.lincomb(high, 1.0, dst, -1.0, low);  // L~ H
    }
    s.lincomb(dst, layer_weight(gamma, 0, Q, j), low, layer_weight(gamma, 1, Q, j), high);
  }
}

// sum_{k <= floor(K/2)} alpha^k / k! ((1 + sign beta) I - L~)^{2k} x.
template <class S>
void g2cn_channel_into(S& s, V<S>& dst, int K, double alpha, double signed_beta) {
  const int J = K / 2;
  std::vector<double> theta(static_cast<std::size_t>(J) + 1);
  double t = 1.0;
  for (int k = 0; k <= J; ++k) {
    if (k > 0) t *= alpha / k;
    theta[static_cast<std::size_t>(k)] = t;
  }
  s.set_input(dst, theta[J]);
  if (J == 0) return;
  auto scratch = s.working();
  for (int k = J - 1; k >= 0; --k) {
    s.hop(scratch, dst, {.adj = 1.0, .self = signed_beta});
    s.hop(dst, scratch, {.adj = 1.0, .self = signed_beta, .input = theta[static_cast<std::size_t>(k)]});
  }
}

// (I + sign beta L~) sum_k alpha (1 - alpha)^k A~^k x.
template <class S>
void lfhf_channel_into(S& s, V<S>& dst, int K, double alpha, double signed_beta) {
  const std::vector<double> theta = fixed_coefficients(Basis::kPPR, K, alpha);
  s.set_input(dst, theta[static_cast<std::size_t>(K)]);
  auto scratch = s.working();
  for (int k = K - 1; k >= 0; --k) {
    s.hop(scratch, dst, {.adj = 1.0, .input = theta[static_cast<std::size_t>(k)]});
    S::swap(dst, scratch);
  }
  s.hop(scratch, dst, {.adj = -signed_beta, .self = 1.0 + signed_beta});
  S::swap(dst, scratch);
}

template <class S>
void figure_channel_into(S& s, V<S>& dst, Basis basis, std::span<const double> theta) {
  switch (basis) {
    case Basis::kIdentity: {
      double sum = 0.0;
      for (double t : theta) sum += t;
      s.set_input(dst, sum);
      return;
    }
    case Basis::kVarMonomial: nested_into(s, dst, theta, 0.0); return;
    case Basis::kChebyshev: chebyshev_into(s, dst, theta); return;
    case Basis::kBernstein: bernstein_into(s, dst, theta); return;
    default: throw ValidationError("FiGURe: unsupported channel basis");
  }
}

// Channels evaluated one after another into a single channel buffer, each
// fused into dst with its gamma weight.
template <class S, class Channel>
void sum_channels_into(S& s, V<S>& dst, std::span<const double> gamma, Channel&& channel) {
  s.set_input(dst, 0.0);
  auto part = s.working();
  for (std::size_t q = 0; q < gamma.size(); ++q) {
    channel(static_cast<int>(q), part);
    s.axpy(dst, gamma[q], part);
  }
}

// Resolved theta for the theta-linear single-channel filters.
std::vector<double> effective_theta(const FilterSpec& spec);

template <class S>
void eval_channel(S& s, V<S>& dst, const FilterSpec& spec, int q) {
  const int K = spec.K;
  switch (spec.basis) {
    case Basis::kG2CN: {
      const auto a = channel_alpha(spec);
      const auto b = channel_beta(spec);
      g2cn_channel_into(s, dst, K, a[q], q == 0 ? b[q] : -b[q]);
      return;
    }
    case Basis::kGNNLFHF: {
      const auto a = channel_alpha(spec);
      const auto b = channel_beta(spec);
      lfhf_channel_into(s, dst, K, a[q], q == 0 ? -b[q] : b[q]);
      return;
    }
    case Basis::kFiGURe: {
      const auto ch = figure_channels(spec);
      const auto k1 = static_cast<std::size_t>(K) + 1;
      std::span<const double> theta(spec.theta);
      figure_channel_into(s, dst, ch[static_cast<std::size_t>(q)], theta.subspan(static_cast<std::size_t>(q) * k1, k1));
      return;
    }
    default: throw ValidationError("not a multi-channel bank");
  }
}

template <class S>
void eval_filter(S& s, V<S>& dst, const FilterSpec& spec, std::vector<std::string>* notes) {
  const int K = spec.K;
  switch (spec.basis) {
    case Basis::kIdentity: s.set_input(dst, 1.0); return;
    case Basis::kLinear: {
      const std::vector<double> shifts(static_cast<std::size_t>(K), 1.0);
      product_into(s, dst, shifts, 1.0);
      return;
    }
    case Basis::kImpulse: {
      const std::vector<double> shifts(static_cast<std::size_t>(K), 0.0);
      product_into(s, dst, shifts, 1.0);
      return;
    }
    case Basis::kMonomial:
    case Basis::kPPR:
    case Basis::kHK:
    case Basis::kVarMonomial: {
      const auto theta = effective_theta(spec);
      nested_into(s, dst, theta, 0.0);
      return;
    }
    case Basis::kGaussian: {
      const auto theta = effective_theta(spec);
      nested_into(s, dst, theta, 1.0);
      return;
    }
    case Basis::kVarLinear: {
      std::span<const double> theta(spec.theta);
      product_into(s, dst, theta.subspan(1), theta[0]);
      return;
    }
    case Basis::kHorner: horner_into(s, dst, spec.theta); return;
    case Basis::kChebyshev: chebyshev_into(s, dst, spec.theta); return;
    case Basis::kChebInterp: {
      const auto w = chebinterp_weights(spec.theta);
      chebyshev_into(s, dst, w);
      return;
    }
    case Basis::kClenshaw: clenshaw_into(s, dst, spec.theta); return;
    case Basis::kBernstein: bernstein_into(s, dst, spec.theta); return;
    case Basis::kLegendre: legendre_into(s, dst, spec.theta); return;
    case Basis::kJacobi: jacobi_into(s, dst, spec.theta, hyper_alpha(spec), hyper_beta(spec)); return;
    case Basis::kFavard: {
      const auto fa = favard_alpha_or_default(spec);
      const auto fb = favard_beta_or_default(spec);
      favard_into(s, dst, spec.theta, fa, fb);
      return;
    }
    case Basis::kOptBasis: s.optbasis(dst, spec.theta, notes); return;
    case Basis::kAdaGNN: adagnn_into(s, dst, bank_gamma(spec), K); return;
    case Basis::kFBGNN: linear_bank_into(s, dst, 0, bank_gamma(spec), K, 0.0); return;
    case Basis::kACMGNN: linear_bank_into(s, dst, 1, bank_gamma(spec), K, 0.0); return;
    case Basis::kFAGNN: linear_bank_into(s, dst, 2, bank_gamma(spec), K, hyper_beta(spec)); return;
    case Basis::kG2CN:
    case Basis::kGNNLFHF:
    case Basis::kFiGURe: {
      const auto gamma = bank_gamma(spec);
      sum_channels_into(s, dst, gamma, [&](int q, V<S>& part) { eval_channel(s, part, spec, q); });
      return;
    }
  }
}

}  // namespace sgf::detail
