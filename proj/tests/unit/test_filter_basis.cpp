#include <gtest/gtest.h>

#include <random>

#include "sgf/errors.hpp"
#include "sgf/filter_basis.hpp"
#include "sgf/filter_engine.hpp"
#include "sgf/synthetic.hpp"
#include "support/fixtures.hpp"

namespace sgf {
namespace {

TEST(Basis, RecombineMatchesFilterForEveryName) {
  const NormalizedAdjacency adj = normalize(random_connected_graph(20, 0.2, 1), 0.4);
  const SignalMatrix x = white_noise(20, 3, 2);
  std::mt19937_64 rng(3);
  for (const auto& name : all_filter_names()) {
    const FilterSpec s = random_filter_spec(name, 4, 3, rng);
    const BasisStack st = export_basis(s, adj, x);
    ASSERT_EQ(static_cast<std::size_t>(st.weights.rows()), st.size()) << name;
    ASSERT_EQ(st.channel.size(), st.size()) << name;
    const SignalMatrix direct = apply_filter(s, adj, x);
    const SignalMatrix rebuilt = st.recombine();
    ASSERT_EQ(rebuilt.cols(), direct.cols()) << name;
    EXPECT_LT(test::max_abs(rebuilt - direct), 1e-10 * std::max(1.0, test::max_abs(direct))) << name;
  }
}

TEST(Basis, ThetaLinearRecombination) {
  const NormalizedAdjacency adj = normalize(random_connected_graph(16, 0.25, 4), 0.5);
  const SignalMatrix x = white_noise(16, 2, 5);
  for (const char* name : {"varmonomial", "chebyshev", "bernstein", "legendre", "jacobi", "clenshaw", "horner"}) {
    FilterSpec s = parse_filter_spec(std::string(name) + ":K=5");
    s.theta.assign(6, 1.0);
    const BasisStack st = export_basis(s, adj, x);
    ASSERT_EQ(st.size(), 6u) << name;
    const std::vector<double> theta{0.3, -1.0, 0.5, 0.25, -0.1, 2.0};
    FilterSpec t = s;
    t.theta = theta;
    EXPECT_LT(test::max_abs(st.recombine(theta) - apply_filter(t, adj, x)), 1e-10) << name;
  }
}

TEST(Basis, KZeroIsOrderZeroImage) {
  const NormalizedAdjacency adj = normalize(random_connected_graph(12, 0.3, 6), 0.5);
  const SignalMatrix x = white_noise(12, 2, 7);
  FilterSpec s = parse_filter_spec("chebyshev:K=0:theta=1");
  const BasisStack st = export_basis(s, adj, x);
  ASSERT_EQ(st.size(), 1u);
  EXPECT_LT(test::max_abs(st.images[0] - x), 1e-15);
}

TEST(Basis, ShapesAndConcatenation) {
  const NormalizedAdjacency adj = normalize(random_connected_graph(12, 0.3, 8), 0.5);
  const SignalMatrix x = white_noise(12, 3, 9);
  const BasisStack st = export_basis(parse_filter_spec("varmonomial:K=3:theta=1,1,1,1"), adj, x);
  EXPECT_EQ(st.rows(), 12);
  EXPECT_EQ(st.cols(), 3);
  const SignalMatrix c = st.concatenated();
  EXPECT_EQ(c.cols(), 12);
  EXPECT_LT(test::max_abs(c.middleCols(6, 3) - st.images[2]), 1e-15);
  EXPECT_THROW(st.recombine(std::vector<double>{1.0}), ValidationError);
}

TEST(Basis, LinearProductExpansion) {
  // (1 + t)(2 + 3t) = 2 + 5t + 3t^2
  const std::vector<double> c{1.0, 2.0}, d{1.0, 3.0};
  EXPECT_EQ(expand_linear_product(c, d), (std::vector<double>{2.0, 5.0, 3.0}));
  EXPECT_EQ(expand_linear_product(std::vector<double>{}, std::vector<double>{}), (std::vector<double>{1.0}));
}

}  // namespace
}  // namespace sgf
