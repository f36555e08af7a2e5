#include "sgf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>

#include "sgf/errors.hpp"
#include "sgf/filter_engine.hpp"

namespace sgf {

DenseMatrix dense_adjacency(const NormalizedAdjacency& adj, std::size_t cap) {
  const std::size_t n = adj.n();
  if (n > cap) throw ValidationError("dense oracle limited to n <= " + std::to_string(cap));
  const auto N = static_cast<Eigen::Index>(n);
  DenseMatrix a = DenseMatrix::Zero(N, N);
  const auto& indptr = adj.graph().indptr();
  const auto& indices = adj.graph().indices();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t e = indptr[i]; e < indptr[i + 1]; ++e) {
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(indices[e])) = adj.values()[e];
    }
  }
  return a;
}

DenseMatrix dense_laplacian(const NormalizedAdjacency& adj, std::size_t cap) {
  DenseMatrix a = dense_adjacency(adj, cap);
  return DenseMatrix::Identity(a.rows(), a.cols()) - a;
}

namespace {

double off_diagonal_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i != j) s += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(s);
}

}  // namespace

EigenSystem eigendecompose(const DenseMatrix& L, double off_tol, double symmetry_tol) {
  if (L.rows() != L.cols()) throw ShapeError("eigendecompose needs a square matrix");
  const Eigen::Index n = L.rows();
  if (n > 0 && (L - L.transpose()).cwiseAbs().maxCoeff() > symmetry_tol) {
    throw ValidationError("eigendecompose: matrix is not symmetric");
  }
  DenseMatrix a = 0.5 * (L + L.transpose());
  DenseMatrix v = DenseMatrix::Identity(n, n);
  EigenSystem es;
  constexpr std::size_t kMaxSweeps = 100;
  while (off_diagonal_norm(a) >= off_tol) {
    if (es.sweeps == kMaxSweeps) throw NumericalError("Jacobi eigensolver did not converge");
    ++es.sweeps;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // rotation zeroing a(p,q)
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
  es.lambda.resize(n);
  es.U.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    es.lambda[k] = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    es.U.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  es.scale = Vector::Ones(n);
  return es;
}

EigenSystem eigensystem(const NormalizedAdjacency& adj, std::size_t cap) {
  const NormalizedAdjacency sym(adj.graph_ptr(), 0.5);
  EigenSystem es = eigendecompose(dense_laplacian(sym, cap));
  // A~(rho) = S A~(1/2) S^{-1} with S = D^{rho - 1/2}
  const double rho = adj.rho();
  for (std::size_t i = 0; i < adj.n(); ++i) {
    es.scale[static_cast<Eigen::Index>(i)] = std::pow(static_cast<double>(adj.graph().row_size(i)), rho - 0.5);
  }
  return es;
}

SignalMatrix spectral_filter_oracle(const EigenSystem& es, const Response& response, const SignalMatrix& x) {
  if (x.rows() != es.U.rows()) throw ShapeError("signal rows do not match eigensystem size");
  Vector g(es.lambda.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = response(es.lambda[i]);
  const DenseMatrix xs = es.scale.cwiseInverse().asDiagonal() * x;
  const DenseMatrix spectral = es.U.transpose() * xs;
  const DenseMatrix filtered = es.U * (g.asDiagonal() * spectral);
  return es.scale.asDiagonal() * filtered;
}

namespace {

using Mat = DenseMatrix;

Mat power(const Mat& m, int k) {
  Mat p = Mat::Identity(m.rows(), m.cols());
  for (int i = 0; i < k; ++i) p = p * m;
  return p;
}

double binomial(int n, int k) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

double factorial(int k) { return std::tgamma(k + 1.0); }

// Dense sum_k theta_k T_k built from a precomputed list of basis matrices.
Mat combine(const std::vector<Mat>& basis, std::span<const double> theta) {
  Mat out = Mat::Zero(basis[0].rows(), basis[0].cols());
  for (std::size_t k = 0; k < theta.size(); ++k) out += theta[k] * basis[k];
  return out;
}

std::vector<Mat> monomial_basis(const Mat& A, int K) {
  std::vector<Mat> b;
  for (int k = 0; k <= K; ++k) b.push_back(power(A, k));
  return b;
}

std::vector<Mat> chebyshev_basis(const Mat& L, int K, double first_scale) {
  const Mat I = Mat::Identity(L.rows(), L.cols());
  std::vector<Mat> b{I};
  if (K >= 1) b.push_back(first_scale * L);
  for (int k = 2; k <= K; ++k) b.push_back(2.0 * L * b[k - 1] - b[k - 2]);
  return b;
}

std::vector<Mat> bernstein_basis(const Mat& L, int K) {
  const Mat I = Mat::Identity(L.rows(), L.cols());
  std::vector<Mat> b;
  for (int k = 0; k <= K; ++k) b.push_back(binomial(K, k) / std::pow(2.0, K) * power(2.0 * I - L, K - k) * power(L, k));
  return b;
}

Mat apply_columns(const std::vector<Mat>& per_column, const SignalMatrix& x) {
  SignalMatrix out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) out.col(j) = per_column[static_cast<std::size_t>(j)] * x.col(j);
  return out;
}

// Three-term recurrence with dense A = I - L; the coefficients b and the
// previous norm come from the dense vectors. Orthonormal only when A is symmetric.
SignalMatrix optbasis_oracle(const Mat& A, const SignalMatrix& x, std::span<const double> theta) {
  const int K = static_cast<int>(theta.size()) - 1;
  SignalMatrix out = SignalMatrix::Zero(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double nx = x.col(j).norm();
    if (!(nx > 0.0)) throw ValidationError("OptBasis oracle: zero column");
    Vector q_prev = Vector::Zero(x.rows());
    Vector q = x.col(j) / nx;
    double n_prev = 0.0;
    out.col(j) = theta[0] * q;
    for (int k = 1; k <= K; ++k) {
      const Vector Aq = A * q;
      const double b = Aq.dot(q);
      const Vector v = Aq - b * q - n_prev * q_prev;
      const double nv = v.norm();
      if (!(nv > kOptBasisBreakdown)) break;
      q_prev = q;
      q = v / nv;
      n_prev = nv;
      out.col(j) += theta[static_cast<std::size_t>(k)] * q;
    }
  }
  return out;
}

std::vector<Mat> figure_basis(Basis b, const Mat& L, int K) {
  const Mat I = Mat::Identity(L.rows(), L.cols());
  switch (b) {
    case Basis::kIdentity: return std::vector<Mat>(static_cast<std::size_t>(K) + 1, I);
    case Basis::kVarMonomial: return monomial_basis(I - L, K);
    case Basis::kChebyshev: return chebyshev_basis(L, K, 1.0);
    case Basis::kBernstein: return bernstein_basis(L, K);
    default: throw ValidationError("unsupported FiGURe channel");
  }
}

// Channel matrices of the multi-channel banks (without gamma).
std::vector<Mat> bank_channels(const FilterSpec& spec, const Mat& L) {
  const int K = spec.K;
  const Mat I = Mat::Identity(L.rows(), L.cols());
  const Mat A = I - L;
  std::vector<Mat> ch;
  const auto gamma = bank_gamma(spec);
  for (std::size_t q = 0; q < gamma.size(); ++q) {
    switch (spec.basis) {
      case Basis::kG2CN: {
        const double a = channel_alpha(spec)[q];
        const double b = channel_beta(spec)[q];
        const Mat M = (q == 0 ? 1.0 + b : 1.0 - b) * I - L;
        Mat c = Mat::Zero(L.rows(), L.cols());
        for (int k = 0; k <= K / 2; ++k) c += std::pow(a, k) / factorial(k) * power(M, 2 * k);
        ch.push_back(c);
        break;
      }
      case Basis::kGNNLFHF: {
        const double a = channel_alpha(spec)[q];
        const double b = channel_beta(spec)[q];
        Mat ppr = Mat::Zero(L.rows(), L.cols());
        for (int k = 0; k <= K; ++k) ppr += a * std::pow(1.0 - a, k) * power(A, k);
        const Mat shaped = q == 0 ? Mat(I - b * L) : Mat(I + b * L);
        ch.push_back(shaped * ppr);
        break;
      }
      case Basis::kFiGURe: {
        const auto k1 = static_cast<std::size_t>(K) + 1;
        std::span<const double> theta(spec.theta);
        ch.push_back(combine(figure_basis(figure_channels(spec)[q], L, K), theta.subspan(q * k1, k1)));
        break;
      }
      default: throw ValidationError("not a multi-channel bank");
    }
  }
  return ch;
}

double layer_gamma_at(const std::vector<double>& gamma, std::size_t q, std::size_t Q, int layer) {
  return gamma.size() == Q ? gamma[q] : gamma[static_cast<std::size_t>(layer) * Q + q];
}

}  // namespace

SignalMatrix matrix_polynomial_oracle(const FilterSpec& spec, const DenseMatrix& L, const SignalMatrix& x) {
  validate(spec, x.cols());
  if (L.rows() != L.cols() || L.rows() != x.rows()) throw ShapeError("oracle: L and x shapes disagree");
  const int K = spec.K;
  const Mat I = Mat::Identity(L.rows(), L.cols());
  const Mat A = I - L;
  const std::vector<double>& th = spec.theta;
  const bool needs_theta = spec.taxonomy() == Taxonomy::kVariable || spec.basis == Basis::kFiGURe;
  if (needs_theta && th.empty()) throw ValidationError("oracle: theta is required");
  Mat g;
  switch (spec.basis) {
    case Basis::kIdentity: g = I; break;
    case Basis::kLinear: g = power(I + A, K); break;
    case Basis::kImpulse: g = power(A, K); break;
    case Basis::kMonomial: {
      g = Mat::Zero(L.rows(), L.cols());
      for (int k = 0; k <= K; ++k) g += power(A, k) / (K + 1.0);
      break;
    }
    case Basis::kPPR: {
      const double a = hyper_alpha(spec);
      g = Mat::Zero(L.rows(), L.cols());
      for (int k = 0; k <= K; ++k) g += a * std::pow(1.0 - a, k) * power(A, k);
      break;
    }
    case Basis::kHK: {
      const double a = hyper_alpha(spec);
      g = Mat::Zero(L.rows(), L.cols());
      for (int k = 0; k <= K; ++k) g += std::exp(-a) * std::pow(a, k) / factorial(k) * power(A, k);
      break;
    }
    case Basis::kGaussian: {
      const double a = hyper_alpha(spec);
      g = Mat::Zero(L.rows(), L.cols());
      for (int k = 0; k <= K; ++k) g += std::pow(a, k) / factorial(k) * power(I + A, k);
      break;
    }
    case Basis::kVarLinear: {
      g = th[0] * I;
      for (int k = 1; k <= K; ++k) g = (th[static_cast<std::size_t>(k)] * I + A) * g;
      break;
    }
    case Basis::kVarMonomial:
    case Basis::kHorner: g = combine(monomial_basis(A, K), th); break;
    case Basis::kChebyshev: g = combine(chebyshev_basis(L, K, 1.0), th); break;
    case Basis::kChebInterp: {
      // direct double sum over Chebyshev nodes, T_k(x_kappa) = cos(k (kappa + 1/2) pi / (K+1))
      const auto T = chebyshev_basis(L, K, 1.0);
      g = Mat::Zero(L.rows(), L.cols());
      for (int k = 0; k <= K; ++k) {
        for (int kappa = 0; kappa <= K; ++kappa) {
          const double tk = std::cos(k * (kappa + 0.5) * std::numbers::pi / (K + 1.0));
          g += 2.0 / (K + 1.0) * th[static_cast<std::size_t>(kappa)] * tk * T[static_cast<std::size_t>(k)];
        }
      }
      break;
    }
    case Basis::kClenshaw: g = combine(chebyshev_basis(L, K, 2.0), th); break;
    case Basis::kBernstein: g = combine(bernstein_basis(L, K), th); break;
    case Basis::kLegendre: {
      std::vector<Mat> P{I};
      if (K >= 1) P.push_back(L);
      for (int k = 2; k <= K; ++k) P.push_back((2.0 * k - 1.0) / k * L * P[k - 1] - (k - 1.0) / k * P[k - 2]);
      g = combine(P, th);
      break;
    }
    case Basis::kJacobi: {
      const double a = hyper_alpha(spec), b = hyper_beta(spec);
      std::vector<Mat> P{I};
      if (K >= 1) P.push_back((a - b) / 2.0 * I + (a + b + 2.0) / 2.0 * A);
      for (int k = 2; k <= K; ++k) {
        const double d1 = (2 * k + a + b) * (2 * k + a + b - 1) / (2 * k * (k + a + b));
        const double d2 = (2 * k + a + b - 1) * (a * a - b * b) / (2 * k * (k + a + b) * (2 * k + a + b - 2));
        const double d3 = (k + a - 1) * (k + b - 1) * (2 * k + a + b) / (k * (k + a + b) * (2 * k + a + b - 2));
        P.push_back(d1 * A * P[k - 1] + d2 * P[k - 1] - d3 * P[k - 2]);
      }
      g = combine(P, th);
      break;
    }
    case Basis::kFavard: {
      const auto k1 = static_cast<std::size_t>(K) + 1;
      const std::vector<double> fa = spec.favard_alpha.empty() ? std::vector<double>(k1, 1.0) : spec.favard_alpha;
      const std::vector<double> fb = spec.favard_beta.empty() ? std::vector<double>(k1, 0.0) : spec.favard_beta;
      std::vector<Mat> P{I / std::sqrt(fa[0])};
      for (int k = 1; k <= K; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        Mat next = A * P[uk - 1] - fb[uk] * P[uk - 1];
        if (k >= 2) next -= std::sqrt(fa[uk - 1]) * P[uk - 2];
        P.push_back(next / std::sqrt(fa[uk]));
      }
      g = combine(P, th);
      break;
    }
    case Basis::kOptBasis: return optbasis_oracle(A, x, th);
    case Basis::kAdaGNN: {
      const auto gamma = bank_gamma(spec);
      const auto f = static_cast<std::size_t>(x.cols());
      std::vector<Mat> cols;
      for (std::size_t j = 0; j < f; ++j) {
        Mat c = I;
        for (int l = 0; l < K; ++l) {
          double gj;
          if (gamma.size() == 1) {
            gj = gamma[0];
          } else if (gamma.size() == f) {
            gj = gamma[j];
          } else {
            gj = gamma[static_cast<std::size_t>(l) * f + j];
          }
          c = (I - gj * L) * c;
        }
        cols.push_back(c);
      }
      return apply_columns(cols, x);
    }
    case Basis::kFBGNN:
    case Basis::kACMGNN:
    case Basis::kFAGNN: {
      const auto gamma = bank_gamma(spec);
      const std::size_t Q = spec.basis == Basis::kACMGNN ? 3 : 2;
      const double beta = spec.basis == Basis::kFAGNN ? hyper_beta(spec) : 0.0;
      g = I;
      for (int l = 0; l < K; ++l) {
        const double g1 = layer_gamma_at(gamma, 0, Q, l), g2 = layer_gamma_at(gamma, 1, Q, l);
        Mat layer;
        if (spec.basis == Basis::kFAGNN) {
          layer = g1 * ((beta + 1.0) * I - L) + g2 * ((beta - 1.0) * I + L);
        } else {
          layer = g1 * A + g2 * L;
          if (spec.basis == Basis::kACMGNN) layer += layer_gamma_at(gamma, 2, Q, l) * I;
        }
        g = layer * g;
      }
      break;
    }
    case Basis::kG2CN:
    case Basis::kGNNLFHF:
    case Basis::kFiGURe: {
      const auto gamma = bank_gamma(spec);
      const auto ch = bank_channels(spec, L);
      if (spec.fusion == Fusion::kConcat) {
        SignalMatrix out(x.rows(), x.cols() * static_cast<Eigen::Index>(ch.size()));
        for (std::size_t q = 0; q < ch.size(); ++q) {
          out.middleCols(static_cast<Eigen::Index>(q) * x.cols(), x.cols()) = gamma[q] * ch[q] * x;
        }
        return out;
      }
      g = Mat::Zero(L.rows(), L.cols());
      for (std::size_t q = 0; q < ch.size(); ++q) g += gamma[q] * ch[q];
      break;
    }
  }
  return g * x;
}

std::vector<HistogramBin> eigenvalue_histogram(const Vector& lambda, std::size_t bins, double lo, double hi) {
  if (bins == 0 || !(hi > lo)) throw ValidationError("histogram needs bins >= 1 and hi > lo");
  std::vector<HistogramBin> out(bins);
  const double w = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].lo = lo + w * static_cast<double>(b);
    out[b].hi = lo + w * static_cast<double>(b + 1);
  }
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const double t = (lambda[i] - lo) / w;
    auto b = t <= 0.0 ? std::size_t{0} : static_cast<std::size_t>(t);
    out[std::min(b, bins - 1)].count++;
  }
  return out;
}

void write_histogram_csv(const std::filesystem::path& path, const std::vector<HistogramBin>& bins) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "lambda,count\n";
  for (const auto& b : bins) out << 0.5 * (b.lo + b.hi) << ',' << b.count << '\n';
}

}  // namespace sgf
