#include "sgf/regression.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "sgf/errors.hpp"
#include "sgf/filter_basis.hpp"
#include "sgf/filter_engine.hpp"

namespace sgf {

TargetSignal builtin_target(const std::string& name) {
  if (name == "band") return {name, [](double l) { return std::exp(-10.0 * (l - 1.0) * (l - 1.0)); }};
  if (name == "combine") return {name, [](double l) { return std::abs(std::sin(std::numbers::pi * l)); }};
  if (name == "high") return {name, [](double l) { return 1.0 - std::exp(-10.0 * l * l); }};
  if (name == "low") return {name, [](double l) { return std::exp(-10.0 * l * l); }};
  if (name == "reject") return {name, [](double l) { return 1.0 - std::exp(-10.0 * (l - 1.0) * (l - 1.0)); }};
  throw ValidationError("unknown target signal '" + name + "'");
}

const std::vector<std::string>& builtin_target_names() {
  static const std::vector<std::string> names{"band", "combine", "high", "low", "reject"};
  return names;
}

SignalMatrix make_target(const TargetSignal& signal, const EigenSystem& es, const SignalMatrix& x) {
  if (!signal.response) throw ValidationError("target signal has no response");
  return spectral_filter_oracle(es, signal.response, x);
}

namespace {

using ConstVec = Eigen::Map<const Vector>;

ConstVec flat(const SignalMatrix& m) { return ConstVec(m.data(), m.size()); }

// 1 - |residual|^2 / sum_j |z_j - mean(z_j)|^2
double pooled_r2(const SignalMatrix& pred, const SignalMatrix& z) {
  const double ss_res = (z - pred).squaredNorm();
  const double ss_tot = (z.rowwise() - z.colwise().mean()).squaredNorm();
  if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
  return 1.0 - ss_res / ss_tot;
}

void check_pair(const SignalMatrix& x, const SignalMatrix& z) {
  if (x.rows() != z.rows() || x.cols() != z.cols()) throw ShapeError("target must have the same shape as the input");
  if (!x.allFinite() || !z.allFinite()) throw NumericalError("regression input or target is not finite");
}

}  // namespace

RegressionReport fit_linear(const FilterSpec& spec, const NormalizedAdjacency& adj, const SignalMatrix& x,
                            const SignalMatrix& z) {
  if (!is_theta_linear(spec.basis)) {
    throw ValidationError(std::string(basis_name(spec.basis)) +
                          " is not linear in theta; fit its hyperparameters with fit_hyper");
  }
  check_pair(x, z);
  FilterSpec s = spec;
  s.theta.assign(static_cast<std::size_t>(spec.K) + 1, 1.0);
  const BasisStack st = export_basis(s, adj, x);

  const Eigen::Index rows = x.size();
  const auto cols = static_cast<Eigen::Index>(st.size());
  DenseMatrix B(rows, cols);
  Vector scale(cols);
  RegressionReport rep;
  rep.filter = format_filter_spec(spec);
  rep.notes = st.notes;
  for (Eigen::Index k = 0; k < cols; ++k) {
    B.col(k) = flat(st.images[static_cast<std::size_t>(k)]);
    const double nk = B.col(k).norm();
    scale[k] = nk > 0.0 ? 1.0 / nk : 1.0;
    if (nk == 0.0) rep.notes.push_back("basis column " + std::to_string(k) + " is zero");
  }
  B = B * scale.asDiagonal();

  // full numerical rank: plain least squares. Otherwise the damped normal
  // equations (B^T B + eps I) t = B^T z, solved as [B; sqrt(eps) I] t = [z; 0]
  const Eigen::ColPivHouseholderQR<DenseMatrix> qr(B);
  const bool full_rank = qr.rank() == cols;
  Vector t;
  if (full_rank) {
    t = qr.solve(flat(z));
  } else {
    DenseMatrix stacked(rows + cols, cols);
    stacked.topRows(rows) = B;
    stacked.bottomRows(cols) = std::sqrt(kTikhonov) * DenseMatrix::Identity(cols, cols);
    Vector rhs = Vector::Zero(rows + cols);
    rhs.head(rows) = flat(z);
    t = stacked.colPivHouseholderQr().solve(rhs);
  }
  const Vector theta = scale.asDiagonal() * t;

  const Eigen::JacobiSVD<DenseMatrix> svd(B);
  const Vector sv = svd.singularValues();
  const double smax = sv.size() ? sv.maxCoeff() : 0.0;
  // more columns than rows leaves cols - rows singular values at zero
  const double smin = (sv.size() && rows >= cols) ? sv.minCoeff() : 0.0;
  rep.condition_estimate = smin > 0.0 ? (smax / smin) * (smax / smin) : std::numeric_limits<double>::infinity();
  rep.ill_conditioned = !full_rank;
  if (rep.ill_conditioned) rep.notes.push_back("basis is numerically rank deficient; damped solve, theta is not unique");

  rep.theta_fit.assign(theta.data(), theta.data() + theta.size());
  SignalMatrix pred = SignalMatrix::Zero(x.rows(), x.cols());
  for (std::size_t k = 0; k < st.size(); ++k) pred += theta[static_cast<Eigen::Index>(k)] * st.images[k];
  rep.residual_norm = (z - pred).norm();
  rep.r2 = pooled_r2(pred, z);
  return rep;
}

std::vector<double> default_alpha_grid(Basis basis) {
  double hi = 0.0;
  switch (basis) {
    case Basis::kPPR:
    case Basis::kGNNLFHF: hi = 1.0; break;
    case Basis::kHK:
    case Basis::kGaussian:
    case Basis::kG2CN: hi = 5.0; break;
    default: return {};
  }
  std::vector<double> grid;
  for (int i = 1; 0.05 * i <= hi + 1e-12; ++i) grid.push_back(0.05 * i);
  return grid;
}

RegressionReport fit_hyper(const FilterSpec& spec, const NormalizedAdjacency& adj, const SignalMatrix& x,
                           const SignalMatrix& z, std::span<const double> grid) {
  check_pair(x, z);
  if (spec.taxonomy() == Taxonomy::kVariable) {
    throw ValidationError(std::string(basis_name(spec.basis)) + " has free coefficients; use fit_linear");
  }
  if (grid.empty()) throw ValidationError("fit_hyper needs a non-empty alpha grid");
  const bool has_alpha = !default_alpha_grid(spec.basis).empty();
  std::vector<double> sorted(grid.begin(), grid.end());
  std::sort(sorted.begin(), sorted.end());
  if (!has_alpha) sorted.resize(1);

  RegressionReport best;
  best.filter = format_filter_spec(spec);
  bool have = false;
  for (double a : sorted) {
    FilterSpec s = spec;
    if (has_alpha) s.alpha = {a};
    const SignalMatrix out = apply_filter(s, adj, x);
    const double energy = out.squaredNorm();
    const double gain = energy > 0.0 ? flat(out).dot(flat(z)) / energy : 0.0;
    const SignalMatrix pred = gain * out;
    const double r2 = pooled_r2(pred, z);
    if (!have || r2 > best.r2) {
      have = true;
      best.r2 = r2;
      best.residual_norm = (z - pred).norm();
      best.theta_fit = {gain};
      best.hyper_fit = has_alpha ? std::vector<double>{a} : std::vector<double>{};
    }
  }
  best.condition_estimate = 1.0;
  if (!has_alpha) best.notes.push_back("filter has no alpha; grid ignored");
  return best;
}

double r2_score(const SignalMatrix& pred, const SignalMatrix& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) throw ShapeError("r2_score: shape mismatch");
  if (target.cols() == 0 || target.rows() == 0) throw ShapeError("r2_score: empty input");
  double sum = 0.0;
  for (Eigen::Index j = 0; j < target.cols(); ++j) {
    const double mean = target.col(j).mean();
    const double ss_res = (target.col(j) - pred.col(j)).squaredNorm();
    const double ss_tot = (target.col(j).array() - mean).square().sum();
    sum += ss_tot == 0.0 ? (ss_res == 0.0 ? 1.0 : 0.0) : 1.0 - ss_res / ss_tot;
  }
  return sum / static_cast<double>(target.cols());
}

}  // namespace sgf
