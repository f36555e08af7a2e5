#pragma once

#include "sgf/graph.hpp"
#include "sgf/signal.hpp"

namespace sgf {

// Coefficients of the fused hop kernel
//   dst = adj * A~ src + self * src + keep * dst + input * extra.
struct HopCoeffs {
  double adj = 0.0;
  double self = 0.0;
  double keep = 0.0;
  double input = 0.0;
};

// One sparse hop fused with row-local axpy terms. dst must not alias src;
// extra may alias dst. Row-parallel in principle, sequential here.
void propagate_into(const NormalizedAdjacency& adj, const SignalMatrix& src, SignalMatrix& dst,
                    const HopCoeffs& c, const SignalMatrix* extra = nullptr);

// Column-scaled variant: dst = (A~ src) diag(a) + src diag(s) + dst diag(k).
// When dot is non-null it receives, per column, sum_i (A~ src)_i * src_i.
void propagate_columns_into(const NormalizedAdjacency& adj, const SignalMatrix& src,
                            SignalMatrix& dst, const Vector& a, const Vector& s, const Vector& k,
                            Vector* dot = nullptr);

void check_rows(const NormalizedAdjacency& adj, const SignalMatrix& x);

}  // namespace sgf
