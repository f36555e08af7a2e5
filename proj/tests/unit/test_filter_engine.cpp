#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sgf/errors.hpp"
#include "sgf/filter_engine.hpp"
#include "sgf/filter_spec.hpp"
#include "sgf/oracle.hpp"
#include "sgf/synthetic.hpp"
#include "support/fixtures.hpp"

namespace sgf {
namespace {

FilterSpec spec(const std::string& text) { return parse_filter_spec(text); }

SignalMatrix e0_two_node() {
  SignalMatrix x(2, 1);
  x << 1.0, 0.0;
  return x;
}

struct Dense {
  DenseMatrix A, L, I;
  explicit Dense(const NormalizedAdjacency& adj)
      : A(test::brute_adjacency(adj.graph(), adj.rho())),
        L(DenseMatrix::Identity(A.rows(), A.cols()) - A),
        I(DenseMatrix::Identity(A.rows(), A.cols())) {}
};

std::vector<double> random_theta(int K, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> t(static_cast<std::size_t>(K) + 1);
  for (auto& v : t) v = u(rng);
  return t;
}

TEST(Engine, IdentityIsExact) {
  const NormalizedAdjacency adj = normalize(random_connected_graph(20, 0.2, 1), 0.5);
  const SignalMatrix x = white_noise(20, 3, 2);
  const SignalMatrix y = apply_filter(spec("identity"), adj, x);
  EXPECT_TRUE((y.array() == x.array()).all());
}

TEST(Engine, ImpulseTwoNode) {
  const NormalizedAdjacency adj = normalize(test::two_node_graph(), 0.5);
  const SignalMatrix y = apply_filter(spec("impulse:K=2"), adj, e0_two_node());
  EXPECT_NEAR(y(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(y(1, 0), 0.5, 1e-15);
}

TEST(Engine, FixedCoefficientExamples) {
  EXPECT_EQ(fixed_coefficients(Basis::kMonomial, 3, 0.0), (std::vector<double>{0.25, 0.25, 0.25, 0.25}));
  const auto hk = fixed_coefficients(Basis::kHK, 2, 1.0);
  const double e = std::exp(-1.0);
  EXPECT_NEAR(hk[0], e, 1e-15);
  EXPECT_NEAR(hk[1], e, 1e-15);
  EXPECT_NEAR(hk[2], e / 2.0, 1e-15);
  const auto ppr = fixed_coefficients(Basis::kPPR, 2, 0.5);
  EXPECT_EQ(ppr, (std::vector<double>{0.5, 0.25, 0.125}));
  EXPECT_THROW(fixed_coefficients(Basis::kPPR, 2, 0.0), DomainError);
  EXPECT_THROW(fixed_coefficients(Basis::kChebyshev, 2, 0.0), ValidationError);
  const auto imp = fixed_coefficients(Basis::kImpulse, 3, 0.0);
  EXPECT_EQ(imp, (std::vector<double>{0, 0, 0, 1}));
}

TEST(Engine, PprMatchesDenseSum) {
  const NormalizedAdjacency adj = normalize(random_connected_graph(24, 0.15, 3), 0.4);
  const Dense d(adj);
  const SignalMatrix x = white_noise(24, 2, 4);
  DenseMatrix expect = DenseMatrix::Zero(24, 2), p = x;
  double t = 0.3;
  for (int k = 0; k <= 6; ++k) {
    expect += t * p;
    p = d.A * p;
    t *= 0.7;
  }
  EXPECT_LT(test::max_abs(apply_filter(spec("ppr:K=6:alpha=0.3"), adj, x) - expect), 1e-13);
}

TEST(Engine, ChebInterpWeights) {
  const std::vector<double> t0{0.7};
  EXPECT_NEAR(chebinterp_weights(t0)[0], 1.4, 1e-15);
  const std::vector<double> zero(5, 0.0);
  for (double w : chebinterp_weights(zero)) EXPECT_EQ(w, 0.0);
  EXPECT_THROW(chebinterp_weights(std::vector<double>{}), ValidationError);
}

TEST(Engine, ChebyshevScalarShadow) {
  // T2 at lambda = 1: argument L~ -> 1 gives 2 * 1 * 1 - 1.
  EXPECT_NEAR(frequency_response(spec("chebyshev:K=2:theta=0,0,1"), 1.0), 1.0, 1e-15);
  const NormalizedAdjacency adj = normalize(random_connected_graph(12, 0.3, 5), 0.5);
  const Dense d(adj);
  const SignalMatrix x = white_noise(12, 2, 6);
  const SignalMatrix t1 = d.L * x;
  EXPECT_LT(test::max_abs(chebyshev_recurrence_step(t1, x, adj) - (2.0 * d.L * t1 - x)), 1e-13);
}

TEST(Engine, HornerConstantAndMatchesVarMonomial) {
  const NormalizedAdjacency adj = normalize(random_connected_graph(16, 0.2, 7), 0.6);
  const SignalMatrix x = white_noise(16, 3, 8);
  const std::vector<double> e0{1.0, 0.0, 0.0};
  EXPECT_LT(test::max_abs(horner_apply(e0, adj, x) - x), 1e-15);
  const auto theta = random_theta(6, 9);
  FilterSpec vm;
  vm.basis = Basis::kVarMonomial;
  vm.K = 6;
  vm.theta = theta;
  EXPECT_LT(test::max_abs(horner_apply(theta, adj, x) - apply_filter(vm, adj, x)), 1e-12);
}

TEST(Engine, ClenshawSecondKind) {
  const NormalizedAdjacency adj = normalize(test::two_node_graph(), 0.5);
  const std::vector<double> e1{0.0, 1.0};
  const SignalMatrix y = clenshaw_apply(e1, adj, e0_two_node());
  EXPECT_NEAR(y(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(y(1, 0), -1.0, 1e-15);

  const NormalizedAdjacency big = normalize(random_connected_graph(16, 0.2, 10), 0.5);
  const Dense d(big);
  const SignalMatrix x = white_noise(16, 2, 11);
  const auto theta = random_theta(7, 12);
  DenseMatrix u_prev = x, u = 2.0 * d.L * x, expect = theta[0] * u_prev + theta[1] * u;
  for (std::size_t k = 2; k < theta.size(); ++k) {
    DenseMatrix next = 2.0 * d.L * u - u_prev;
    u_prev = u;
    u = next;
    expect += theta[k] * u;
  }
  EXPECT_LT(test::max_abs(clenshaw_apply(theta, big, x) - expect), 1e-11);
}

TEST(Engine, BernsteinPartitionOfUnityAndSingleTerm) {
  const NormalizedAdjacency adj = normalize(random_connected_graph(16, 0.2, 13), 0.5);
  const Dense d(adj);
  const SignalMatrix x = white_noise(16, 2, 14);
  const std::vector<double> ones(6, 1.0);
  EXPECT_LT(test::max_abs(bernstein_apply(ones, adj, x) - x), 1e-12);
  const std::vector<double> first{1.0, 0.0};
  EXPECT_LT(test::max_abs(bernstein_apply(first, adj, x) - (2.0 * d.I - d.L) * x / 2.0), 1e-14);

  const auto theta = random_theta(5, 15);
  DenseMatrix expect = DenseMatrix::Zero(16, 2);
  for (int k = 0; k <= 5; ++k) {
    DenseMatrix term = x;
    for (int i = 0; i < 5 - k; ++i) term = (2.0 * d.I - d.L) * term;
    for (int i = 0; i < k; ++i) term = d.L * term;
    expect += theta[static_cast<std::size_t>(k)] * std::tgamma(6.0) / (std::tgamma(k + 1.0) * std::tgamma(6.0 - k)) /
              32.0 * term;
  }
  EXPECT_LT(test::max_abs(bernstein_apply(theta, adj, x) - expect), 1e-9);
  const std::vector<double> c = bernstein_coefficients(std::vector<double>{1.0, 1.0, 1.0});
  EXPECT_EQ(c, (std::vector<double>{0.25, 0.5, 0.25}));
}

TEST(Engine, JacobiLegendreNormalization) {
  // alpha = beta = 0 reduces to Legendre, P_k(1) = 1 at lambda = 0.
  for (int k = 0; k <= 6; ++k) {
    std::vector<double> theta(static_cast<std::size_t>(k) + 1, 0.0);
    theta.back() = 1.0;
    FilterSpec s;
    s.basis = Basis::kJacobi;
    s.K = k;
    s.theta = theta;
    s.alpha = {0.0};
    s.beta = {0.0};
    EXPECT_NEAR(frequency_response(s, 0.0), 1.0, 1e-14) << k;
    // Legendre runs on L~ itself, so its P_k(1) = 1 sits at lambda = 1.
    s.basis = Basis::kLegendre;
    s.alpha.clear();
    s.beta.clear();
    EXPECT_NEAR(frequency_response(s, 1.0), 1.0, 1e-14) << k;
  }
}

TEST(Engine, JacobiMatchesExplicitSum) {
  // P_n^{(a,b)}(t) = sum_s C(n+a, n-s) C(n+b, s) ((t-1)/2)^s ((t+1)/2)^{n-s}
  auto binom = [](double top, double k) { return std::tgamma(top + 1) / (std::tgamma(k + 1) * std::tgamma(top - k + 1)); };
  const double a = 0.7, b = -0.4;
  for (int n = 0; n <= 6; ++n) {
    for (double lambda : {0.0, 0.3, 1.1, 1.9}) {
      const double t = 1.0 - lambda;
      double expect = 0.0;
      for (int s = 0; s <= n; ++s) {
        expect += binom(n + a, n - s) * binom(n + b, s) * std::pow((t - 1) / 2, s) * std::pow((t + 1) / 2, n - s);
      }
      FilterSpec sp;
      sp.basis = Basis::kJacobi;
      sp.K = n;
      sp.theta.assign(static_cast<std::size_t>(n) + 1, 0.0);
      sp.theta.back() = 1.0;
      sp.alpha = {a};
      sp.beta = {b};
      EXPECT_NEAR(frequency_response(sp, lambda), expect, 1e-12) << n << " " << lambda;
    }
  }
}

TEST(Engine, FavardBaseAndDegenerateRecurrence) {
  const NormalizedAdjacency adj = normalize(random_connected_graph(16, 0.2, 16), 0.5);
  const Dense d(adj);
  const SignalMatrix x = white_noise(16, 2, 17);
  const std::vector<double> e0{1.0}, fa0{4.0}, fb0{0.0};
  EXPECT_LT(test::max_abs(favard_apply(fa0, fb0, e0, adj, x) - x / 2.0), 1e-15);

  const auto theta = random_theta(5, 18);
  const std::vector<double> fa(6, 1.0), fb(6, 0.0);
  DenseMatrix t_prev = x, t = d.A * x, expect = theta[0] * t_prev + theta[1] * t;
  for (std::size_t k = 2; k < theta.size(); ++k) {
    DenseMatrix next = d.A * t - t_prev;
    t_prev = t;
    t = next;
    expect += theta[k] * t;
  }
  EXPECT_LT(test::max_abs(favard_apply(fa, fb, theta, adj, x) - expect), 1e-12);
  const std::vector<double> bad{1.0, 0.0};
  const std::vector<double> t2{1.0, 1.0}, b2{0.0, 0.0};
  EXPECT_THROW(favard_apply(bad, b2, t2, adj, x), DomainError);
}

TEST(Engine, OptBasisBaseCaseAndOrthonormality) {
  const NormalizedAdjacency adj = normalize(random_connected_graph(32, 0.15, 19), 0.5);
  const SignalMatrix x = white_noise(32, 3, 20);
  const std::vector<double> e0{1.0, 0.0, 0.0};
  const SignalMatrix y = optbasis_apply(e0, adj, x);
  const SignalMatrix xn = x * x.colwise().norm().cwiseInverse().asDiagonal();
  EXPECT_LT(test::max_abs(y - xn), 1e-14);

  // Columns of the basis recovered one order at a time are orthonormal.
  const int K = 6;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    DenseMatrix H(32, K + 1);
    for (int k = 0; k <= K; ++k) {
      std::vector<double> ek(static_cast<std::size_t>(K) + 1, 0.0);
      ek[static_cast<std::size_t>(k)] = 1.0;
      H.col(k) = optbasis_apply(ek, adj, x).col(j);
    }
    EXPECT_LT(test::max_abs(H.transpose() * H - DenseMatrix::Identity(K + 1, K + 1)), 1e-8);
  }
}

TEST(Engine, OptBasisZeroColumnAndBreakdown) {
  const NormalizedAdjacency adj = normalize(random_connected_graph(10, 0.3, 21), 0.5);
  SignalMatrix x = white_noise(10, 2, 22);
  x.col(1).setZero();
  const std::vector<double> theta{1.0, 1.0};
  EXPECT_THROW(optbasis_apply(theta, adj, x), ValidationError);

  // On a two-node graph the Krylov space of any vector has dimension <= 2.
  const NormalizedAdjacency two = normalize(test::two_node_graph(), 0.5);
  FilterSpec s;
  s.basis = Basis::kOptBasis;
  s.K = 4;
  s.theta = {1, 1, 1, 1, 1};
  const FilterResult r = run_filter(s, two, e0_two_node());
  EXPECT_FALSE(r.diagnostics.notes.empty());
  EXPECT_TRUE(r.output.allFinite());
}

TEST(Engine, BankFusion) {
  const NormalizedAdjacency adj = normalize(random_connected_graph(20, 0.2, 23), 0.5);
  const Dense d(adj);
  const SignalMatrix x = white_noise(20, 2, 24);
  // gamma = [1, 0]: FBGNN keeps only the low-pass channel, one layer is A~.
  EXPECT_LT(test::max_abs(apply_filter(spec("fbgnn:K=1:gamma=1,0"), adj, x) - d.A * x), 1e-14);
  EXPECT_LT(test::max_abs(apply_filter(spec("acmgnn:K=1:gamma=0,0,1"), adj, x) - x), 1e-15);
  EXPECT_LT(test::max_abs(bank_apply(spec("acmgnn:K=3:gamma=0,0,1"), adj, x) - x), 1e-15);
  EXPECT_THROW(bank_apply(spec("ppr"), adj, x), ValidationError);
}

TEST(Engine, G2cnIsSumOfTwoGaussianChannels) {
  const NormalizedAdjacency adj = normalize(random_connected_graph(24, 0.2, 25), 0.5);
  const Dense d(adj);
  const SignalMatrix x = white_noise(24, 2, 26);
  const double a0 = 0.8, a1 = 1.3, b0 = 0.6, b1 = 0.9, g0 = 0.4, g1 = 0.7;
  const int K = 6;
  auto channel = [&](double alpha, double shift) {
    const DenseMatrix M = (1.0 + shift) * d.I - d.L;
    const DenseMatrix M2 = M * M;
    DenseMatrix out = DenseMatrix::Zero(24, 2), p = x;
    double t = 1.0;
    for (int k = 0; k <= K / 2; ++k) {
      if (k > 0) t *= alpha / k;
      out += t * p;
      p = M2 * p;
    }
    return out;
  };
  const DenseMatrix expect = g0 * channel(a0, b0) + g1 * channel(a1, -b1);
  const FilterSpec s = spec("g2cn:K=6:alpha=0.8,1.3:beta=0.6,0.9:gamma=0.4,0.7");
  EXPECT_LT(test::max_abs(apply_filter(s, adj, x) - expect), 1e-12);
  FilterSpec concat = s;
  concat.fusion = Fusion::kConcat;
  const SignalMatrix c = apply_filter(concat, adj, x);
  ASSERT_EQ(c.cols(), 4);
  EXPECT_LT(test::max_abs(c.leftCols(2) + c.rightCols(2) - expect), 1e-12);
}

TEST(Engine, LinearityInSignal) {
  const NormalizedAdjacency adj = normalize(random_connected_graph(20, 0.2, 27), 0.3);
  const SignalMatrix x1 = white_noise(20, 2, 28), x2 = white_noise(20, 2, 29);
  std::mt19937_64 rng(30);
  for (const auto& name : all_filter_names()) {
    const auto b = *basis_from_name(name);
    if (!is_signal_independent(b)) continue;
    const FilterSpec s = random_filter_spec(name, 5, 2, rng);
    const SignalMatrix lhs = apply_filter(s, adj, 2.0 * x1 - 3.0 * x2);
    const SignalMatrix rhs = 2.0 * apply_filter(s, adj, x1) - 3.0 * apply_filter(s, adj, x2);
    EXPECT_LT(test::max_abs(lhs - rhs), 1e-10 * std::max(1.0, test::max_abs(rhs))) << name;
  }
}

TEST(Engine, FrequencyResponseExamples) {
  for (double l : {0.0, 0.7, 2.0}) EXPECT_EQ(frequency_response(spec("identity"), l), 1.0);
  EXPECT_NEAR(frequency_response(spec("linear:K=1"), 0.0), 2.0, 1e-15);
  EXPECT_NEAR(frequency_response(spec("linear:K=1"), 2.0), 0.0, 1e-15);
  EXPECT_NEAR(frequency_response(spec("linear:K=1"), 0.5), 1.5, 1e-15);
  for (int K : {5, 20, 40}) {
    const FilterSpec p = spec("ppr:alpha=0.5:K=" + std::to_string(K));
    EXPECT_NEAR(frequency_response(p, 0.0), 1.0 - std::pow(0.5, K + 1), 1e-14);
  }
  EXPECT_THROW(frequency_response(spec("optbasis:K=1:theta=1,1"), 0.5), ValidationError);
  EXPECT_THROW(frequency_response(spec("g2cn:fusion=concat"), 0.5), ValidationError);
}

TEST(Engine, ResponseMatchesSpectralApplication) {
  const NormalizedAdjacency adj = normalize(random_connected_graph(24, 0.2, 31), 0.5);
  const EigenSystem es = eigensystem(adj);
  const SignalMatrix x = white_noise(24, 2, 32);
  std::mt19937_64 rng(33);
  for (const char* name : {"ppr", "hk", "gaussian", "chebyshev", "bernstein", "legendre", "favard", "fagnn"}) {
    const FilterSpec s = random_filter_spec(name, 6, 2, rng);
    const SignalMatrix spectral = spectral_filter_oracle(es, [&](double l) { return frequency_response(s, l); }, x);
    EXPECT_LT(test::max_abs(apply_filter(s, adj, x) - spectral), 1e-9) << name;
  }
}

TEST(Engine, ValidationAndShapes) {
  const NormalizedAdjacency adj = normalize(test::two_node_graph(), 0.5);
  EXPECT_THROW(apply_filter(spec("chebyshev:K=2"), adj, e0_two_node()), ValidationError);
  EXPECT_THROW(apply_filter(spec("identity"), adj, SignalMatrix::Zero(3, 1)), ShapeError);
  SignalMatrix bad = e0_two_node();
  bad(1, 0) = std::nan("");
  const FilterResult r = run_filter(spec("ppr:K=2"), adj, bad);
  EXPECT_TRUE(r.diagnostics.non_finite_input);
  EXPECT_TRUE(r.diagnostics.non_finite_output);
}

TEST(Engine, BufferBudgetIsExact) {
  const NormalizedAdjacency adj = normalize(random_connected_graph(16, 0.2, 34), 0.5);
  const SignalMatrix x = white_noise(16, 2, 35);
  std::mt19937_64 rng(36);
  for (const auto& name : all_filter_names()) {
    for (int K : {0, 1, 2, 5}) {
      const FilterSpec s = random_filter_spec(name, K, 2, rng);
      const FilterResult r = run_filter(s, adj, x);
      EXPECT_EQ(r.diagnostics.peak_working_buffers, working_buffer_budget(s)) << name << " K=" << K;
    }
  }
}

}  // namespace
}  // namespace sgf
