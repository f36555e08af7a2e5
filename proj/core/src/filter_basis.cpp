#include "sgf/filter_basis.hpp"

#include <cmath>
#include <numbers>

#include "recurrences.hpp"
#include "sgf/errors.hpp"
#include "sgf/filter_engine.hpp"
#include "sgf/propagate.hpp"
#include "sgf/workspace.hpp"

namespace sgf {

namespace {

using Images = std::vector<SignalMatrix>;

// H^(0) = x, H^(k) = (shift I + A~) H^(k-1).
Images power_images(const NormalizedAdjacency& adj, const SignalMatrix& x, int K, double shift) {
  Images out;
  out.reserve(static_cast<std::size_t>(K) + 1);
  out.push_back(x);
  for (int k = 1; k <= K; ++k) {
    SignalMatrix next;
    propagate_into(adj, out.back(), next, {.adj = 1.0, .self = shift});
    out.push_back(std::move(next));
  }
  return out;
}

template <class Coef>
Images three_term_images(const NormalizedAdjacency& adj, const SignalMatrix& x, int K, double c0, Coef&& coef) {
  Images out;
  out.reserve(static_cast<std::size_t>(K) + 1);
  out.push_back(c0 * x);
  for (int k = 1; k <= K; ++k) {
    const HopCoeffs h = coef(k);
    SignalMatrix next = k >= 2 ? out[static_cast<std::size_t>(k) - 2] : SignalMatrix();
    propagate_into(adj, out.back(), next, {.adj = h.adj, .self = h.self, .keep = k >= 2 ? h.keep : 0.0});
    out.push_back(std::move(next));
  }
  return out;
}

// C(K,k)/2^K (2I - L~)^{K-k} L~^k x.
Images bernstein_images(const NormalizedAdjacency& adj, const SignalMatrix& x, int K) {
  const std::vector<double> scale = bernstein_coefficients(std::vector<double>(static_cast<std::size_t>(K) + 1, 1.0));
  Images out;
  for (int k = 0; k <= K; ++k) {
    SignalMatrix t = x;
    for (int i = 0; i < K; ++i) {
      SignalMatrix u;
      if (i < k) {
        propagate_into(adj, t, u, {.adj = -1.0, .self = 1.0});
      } else {
        propagate_into(adj, t, u, {.adj = 1.0, .self = 1.0});
      }
      t.swap(u);
    }
    out.push_back(scale[static_cast<std::size_t>(k)] * t);
  }
  return out;
}

// Lagrange-type images of the interpolation form: G_kappa = sum_k 2/(K+1) T_k(x_kappa) T_k x.
Images chebinterp_images(const NormalizedAdjacency& adj, const SignalMatrix& x, int K) {
  const Images t = three_term_images(adj, x, K, 1.0, detail::chebyshev_coef);
  Images out;
  const auto k1 = static_cast<std::size_t>(K) + 1;
  for (std::size_t kappa = 0; kappa < k1; ++kappa) {
    std::vector<double> e(k1, 0.0);
    e[kappa] = 1.0;
    const std::vector<double> w = chebinterp_weights(e);
    SignalMatrix g = w[0] * t[0];
    for (std::size_t k = 1; k < k1; ++k) g += w[k] * t[k];
    out.push_back(std::move(g));
  }
  return out;
}

Images optbasis_images(const NormalizedAdjacency& adj, const SignalMatrix& x, int K,
                       std::vector<std::string>* notes) {
  Images out;
  Workspace ws;
  std::size_t hops = 0;
  detail::optbasis_sweep(
      adj, x, K, ws, [&](int, const SignalMatrix& h) { out.push_back(h); }, notes, hops);
  return out;
}

Images figure_images(const NormalizedAdjacency& adj, const SignalMatrix& x, int K, Basis b) {
  switch (b) {
    case Basis::kIdentity: return Images(static_cast<std::size_t>(K) + 1, x);
    case Basis::kVarMonomial: return power_images(adj, x, K, 0.0);
    case Basis::kChebyshev: return three_term_images(adj, x, K, 1.0, detail::chebyshev_coef);
    case Basis::kBernstein: return bernstein_images(adj, x, K);
    default: throw ValidationError("FiGURe: unsupported channel basis");
  }
}

DenseMatrix broadcast(std::span<const double> w, Eigen::Index f) {
  DenseMatrix m(static_cast<Eigen::Index>(w.size()), f);
  for (std::size_t k = 0; k < w.size(); ++k) m.row(static_cast<Eigen::Index>(k)).setConstant(w[k]);
  return m;
}

std::vector<double> binomial_row(int K) {
  std::vector<double> c(static_cast<std::size_t>(K) + 1, 1.0);
  for (int k = 1; k <= K; ++k) c[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(k) - 1] * (K - k + 1) / k;
  return c;
}

// Per-layer (c, d) of a single-layer bank written as c I + d A~.
std::pair<std::vector<double>, std::vector<double>> bank_layers(const FilterSpec& spec) {
  const auto gamma = bank_gamma(spec);
  const int Q = spec.basis == Basis::kACMGNN ? 3 : 2;
  const double beta = spec.basis == Basis::kFAGNN ? hyper_beta(spec) : 0.0;
  std::vector<double> c, d;
  for (int j = 0; j < spec.K; ++j) {
    const double g1 = detail::layer_weight(gamma, 0, Q, j);
    const double g2 = detail::layer_weight(gamma, 1, Q, j);
    switch (spec.basis) {
      case Basis::kFBGNN: c.push_back(g2); break;
      case Basis::kACMGNN: c.push_back(g2 + detail::layer_weight(gamma, 2, Q, j)); break;
      default: c.push_back(beta * (g1 + g2)); break;
    }
    d.push_back(g1 - g2);
  }
  return {c, d};
}

}  // namespace

std::vector<double> expand_linear_product(std::span<const double> c, std::span<const double> d) {
  if (c.size() != d.size()) throw ShapeError("expand_linear_product: length mismatch");
  std::vector<double> p{1.0};
  for (std::size_t j = 0; j < c.size(); ++j) {
    std::vector<double> next(p.size() + 1, 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) {
      next[k] += c[j] * p[k];
      next[k + 1] += d[j] * p[k];
    }
    p.swap(next);
  }
  return p;
}

SignalMatrix BasisStack::recombine() const {
  if (images.empty()) throw ValidationError("empty basis stack");
  const Eigen::Index f = cols();
  const Eigen::Index blocks = fusion == Fusion::kConcat ? channels : 1;
  SignalMatrix out = SignalMatrix::Zero(rows(), f * blocks);
  for (std::size_t k = 0; k < images.size(); ++k) {
    const Eigen::Index off = fusion == Fusion::kConcat ? channel[k] * f : 0;
    out.middleCols(off, f) += images[k] * weights.row(static_cast<Eigen::Index>(k)).asDiagonal();
  }
  return out;
}

SignalMatrix BasisStack::recombine(std::span<const double> theta) const {
  if (theta.size() != images.size()) {
    throw ShapeError("theta has " + std::to_string(theta.size()) + " entries, stack has " +
                     std::to_string(images.size()) + " images");
  }
  SignalMatrix out = SignalMatrix::Zero(rows(), cols());
  for (std::size_t k = 0; k < images.size(); ++k) out += theta[k] * images[k];
  return out;
}

SignalMatrix BasisStack::concatenated() const {
  const Eigen::Index f = cols();
  SignalMatrix out(rows(), f * static_cast<Eigen::Index>(images.size()));
  for (std::size_t k = 0; k < images.size(); ++k) out.middleCols(static_cast<Eigen::Index>(k) * f, f) = images[k];
  return out;
}

BasisStack export_basis(const FilterSpec& spec, const NormalizedAdjacency& adj, const SignalMatrix& x) {
  check_rows(adj, x);
  validate(spec, x.cols());
  const bool needs_theta = spec.taxonomy() == Taxonomy::kVariable || spec.basis == Basis::kFiGURe;
  if (needs_theta && spec.theta.empty()) throw ValidationError(std::string(basis_name(spec.basis)) + ": theta is required");

  const int K = spec.K;
  const Eigen::Index f = x.cols();
  BasisStack st;
  st.fusion = spec.fusion;
  auto single = [&](Images im, std::span<const double> w) {
    st.images = std::move(im);
    st.weights = broadcast(w, f);
    st.channel.assign(st.images.size(), 0);
  };
  const std::vector<double> e_last = [&] {
    std::vector<double> e(static_cast<std::size_t>(K) + 1, 0.0);
    e.back() = 1.0;
    return e;
  }();

  switch (spec.basis) {
    case Basis::kIdentity: single({x}, std::vector<double>{1.0}); break;
    case Basis::kLinear: single(power_images(adj, x, K, 0.0), binomial_row(K)); break;
    case Basis::kImpulse: single(power_images(adj, x, K, 0.0), e_last); break;
    case Basis::kMonomial:
    case Basis::kPPR:
    case Basis::kHK:
    case Basis::kVarMonomial:
    case Basis::kHorner: single(power_images(adj, x, K, 0.0), detail::effective_theta(spec)); break;
    case Basis::kGaussian: single(power_images(adj, x, K, 1.0), detail::effective_theta(spec)); break;
    case Basis::kVarLinear: {
      std::span<const double> t(spec.theta);
      const std::vector<double> ones(static_cast<std::size_t>(K), 1.0);
      std::vector<double> w = expand_linear_product(t.subspan(1), ones);
      for (double& v : w) v *= t[0];
      single(power_images(adj, x, K, 0.0), w);
      break;
    }
    case Basis::kChebyshev: single(three_term_images(adj, x, K, 1.0, detail::chebyshev_coef), spec.theta); break;
    case Basis::kChebInterp: single(chebinterp_images(adj, x, K), spec.theta); break;
    case Basis::kClenshaw: single(three_term_images(adj, x, K, 1.0, detail::chebyshev2_coef), spec.theta); break;
    case Basis::kBernstein: single(bernstein_images(adj, x, K), spec.theta); break;
    case Basis::kLegendre: single(three_term_images(adj, x, K, 1.0, detail::legendre_coef), spec.theta); break;
    case Basis::kJacobi: {
      const double a = hyper_alpha(spec), b = hyper_beta(spec);
      single(three_term_images(adj, x, K, 1.0, [a, b](int k) { return detail::jacobi_coef(k, a, b); }), spec.theta);
      break;
    }
    case Basis::kFavard: {
      const auto fa = detail::favard_alpha_or_default(spec);
      const auto fb = detail::favard_beta_or_default(spec);
      single(three_term_images(adj, x, K, 1.0 / std::sqrt(fa[0]),
                               [&](int k) { return detail::favard_coef(k, fa, fb); }),
             spec.theta);
      break;
    }
    case Basis::kOptBasis: {
      Images im = optbasis_images(adj, x, K, &st.notes);
      single(std::move(im), spec.theta);
      break;
    }
    case Basis::kAdaGNN: {
      st.images = power_images(adj, x, K, 0.0);
      st.channel.assign(st.images.size(), 0);
      st.weights.resize(K + 1, f);
      const auto gamma = bank_gamma(spec);
      for (Eigen::Index j = 0; j < f; ++j) {
        std::vector<double> c, d;
        for (int l = 0; l < K; ++l) {
          const double g = detail::layer_gamma(gamma, f, l)[j];
          c.push_back(1.0 - g);
          d.push_back(g);
        }
        const auto w = expand_linear_product(c, d);
        for (int k = 0; k <= K; ++k) st.weights(k, j) = w[static_cast<std::size_t>(k)];
      }
      break;
    }
    case Basis::kFBGNN:
    case Basis::kACMGNN:
    case Basis::kFAGNN: {
      const auto [c, d] = bank_layers(spec);
      single(power_images(adj, x, K, 0.0), expand_linear_product(c, d));
      break;
    }
    case Basis::kG2CN:
    case Basis::kGNNLFHF:
    case Basis::kFiGURe: {
      const auto gamma = bank_gamma(spec);
      st.channels = static_cast<int>(gamma.size());
      std::vector<double> all_w;
      const auto k1 = static_cast<std::size_t>(K) + 1;
      for (int q = 0; q < st.channels; ++q) {
        Images im;
        std::vector<double> w(k1, 0.0);
        const auto uq = static_cast<std::size_t>(q);
        if (spec.basis == Basis::kG2CN) {
          const double sb = q == 0 ? channel_beta(spec)[uq] : -channel_beta(spec)[uq];
          const double a = channel_alpha(spec)[uq];
          im = power_images(adj, x, K, sb);
          double t = 1.0;
          for (int j = 0; 2 * j <= K; ++j) {
            if (j > 0) t *= a / j;
            w[static_cast<std::size_t>(2 * j)] = t;
          }
        } else if (spec.basis == Basis::kGNNLFHF) {
          const double sb = q == 0 ? -channel_beta(spec)[uq] : channel_beta(spec)[uq];
          im = power_images(adj, x, K, 0.0);
          for (auto& h : im) {
            SignalMatrix g;
            propagate_into(adj, h, g, {.adj = -sb, .self = 1.0 + sb});
            h.swap(g);
          }
          w = fixed_coefficients(Basis::kPPR, K, channel_alpha(spec)[uq]);
        } else {
          im = figure_images(adj, x, K, figure_channels(spec)[uq]);
          w.assign(spec.theta.begin() + static_cast<std::ptrdiff_t>(uq * k1),
                   spec.theta.begin() + static_cast<std::ptrdiff_t>((uq + 1) * k1));
        }
        for (auto& h : im) st.images.push_back(std::move(h));
        for (double v : w) all_w.push_back(gamma[uq] * v);
        st.channel.insert(st.channel.end(), k1, q);
      }
      st.weights = broadcast(all_w, f);
      break;
    }
  }
  return st;
}

}  // namespace sgf
