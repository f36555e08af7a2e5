#include "sgf/propagate.hpp"

#include <stdexcept>
#include <string>
#include <vector>

#include "sgf/errors.hpp"

namespace sgf {

void check_rows(const NormalizedAdjacency& adj, const SignalMatrix& x) {
  if (static_cast<std::size_t>(x.rows()) != adj.n()) {
    throw ShapeError("signal has " + std::to_string(x.rows()) + " rows, graph has " +
                     std::to_string(adj.n()) + " nodes");
  }
}

void propagate_into(const NormalizedAdjacency& adj, const SignalMatrix& src, SignalMatrix& dst,
                    const HopCoeffs& c, const SignalMatrix* extra) {
  if (&src == &dst) throw std::logic_error("propagate_into: dst aliases src");
  check_rows(adj, src);
  const auto n = static_cast<Eigen::Index>(adj.n());
  const Eigen::Index f = src.cols();
  if (dst.rows() != n || dst.cols() != f) dst.setZero(n, f);
  if (extra && (extra->rows() != n || extra->cols() != f)) throw ShapeError("extra term shape mismatch");

  const auto& indptr = adj.graph().indptr();
  const auto& indices = adj.graph().indices();
  const auto& w = adj.values();
  std::vector<double> acc(static_cast<std::size_t>(f));

  const double* sp = src.data();
  double* dp = dst.data();
  const double* ep = extra ? extra->data() : nullptr;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t e = indptr[i]; e < indptr[i + 1]; ++e) {
      const double we = w[e];
      const double* sr = sp + static_cast<Eigen::Index>(indices[e]) * f;
      for (Eigen::Index j = 0; j < f; ++j) acc[j] += we * sr[j];
    }
    const double* si = sp + i * f;
    double* di = dp + i * f;
    const double* ei = ep ? ep + i * f : nullptr;
    for (Eigen::Index j = 0; j < f; ++j) {
      double v = c.adj * acc[j];
      if (c.self != 0.0) v += c.self * si[j];
      if (c.keep != 0.0) v += c.keep * di[j];
      if (ei && c.input != 0.0) v += c.input * ei[j];
      di[j] = v;
    }
  }
}

void propagate_columns_into(const NormalizedAdjacency& adj, const SignalMatrix& src,
                            SignalMatrix& dst, const Vector& a, const Vector& s, const Vector& k,
                            Vector* dot) {
  if (&src == &dst) throw std::logic_error("propagate_columns_into: dst aliases src");
  check_rows(adj, src);
  const auto n = static_cast<Eigen::Index>(adj.n());
  const Eigen::Index f = src.cols();
  if (a.size() != f || s.size() != f || k.size() != f) throw ShapeError("column coefficient length mismatch");
  if (dst.rows() != n || dst.cols() != f) dst.setZero(n, f);
  if (dot) dot->setZero(f);

  const auto& indptr = adj.graph().indptr();
  const auto& indices = adj.graph().indices();
  const auto& w = adj.values();
  std::vector<double> acc(static_cast<std::size_t>(f));
  const double* sp = src.data();
  double* dp = dst.data();
  for (Eigen::Index i = 0; i < n; ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t e = indptr[i]; e < indptr[i + 1]; ++e) {
      const double we = w[e];
      const double* sr = sp + static_cast<Eigen::Index>(indices[e]) * f;
      for (Eigen::Index j = 0; j < f; ++j) acc[j] += we * sr[j];
    }
    const double* si = sp + i * f;
    double* di = dp + i * f;
    for (Eigen::Index j = 0; j < f; ++j) {
      if (dot) (*dot)[j] += acc[j] * si[j];
      double v = a[j] * acc[j] + s[j] * si[j];
      if (k[j] != 0.0) v += k[j] * di[j];
      di[j] = v;
    }
  }
}

}  // namespace sgf
