#pragma once

#include <Eigen/Dense>

#include "crlab/fields/chart.hpp"

namespace crlab {

using Mat4 = Eigen::Matrix4d;

// Minimum-norm solution of  eta J - J eta = C  for a 4x4 almost complex J and
// an anticommuting right-hand side (J C + C J = 0). The same solve serves the
// higher-order jet equations, which share the algebraic form.
inline Mat4 match_jets(const Mat4& J, const Mat4& C, double j_tol = 1e-12,
                       double anticommute_tol = 1e-10) {
  if (((J * J) + Mat4::Identity()).cwiseAbs().maxCoeff() > j_tol)
    throw Error("match_jets: J is not an almost complex structure");
  if ((J * C + C * J).cwiseAbs().maxCoeff() > anticommute_tol)
    throw Error("unsolvable jet: right-hand side does not anticommute with J");

  // column-major vec: vec(eta J) = (J^T (x) I) vec(eta),
  //                   vec(J eta) = (I (x) J) vec(eta)
  Eigen::Matrix<double, 16, 16> M;
  Eigen::Matrix<double, 16, 1> rhs;
  for (int col = 0; col < 4; ++col)
    for (int row = 0; row < 4; ++row) rhs(col * 4 + row) = C(row, col);
  for (int c = 0; c < 4; ++c)
    for (int r = 0; r < 4; ++r)
      for (int v = 0; v < 4; ++v)
        for (int u = 0; u < 4; ++u)
          M(c * 4 + r, v * 4 + u) =
              J(v, c) * double(r == u) - double(c == v) * J(r, u);

  Eigen::Matrix<double, 16, 1> x =
      M.completeOrthogonalDecomposition().solve(rhs);
  Mat4 eta;
  for (int col = 0; col < 4; ++col)
    for (int row = 0; row < 4; ++row) eta(row, col) = x(col * 4 + row);

  if ((eta * J - J * eta - C).cwiseAbs().maxCoeff() > 1e-10)
    throw Error("unsolvable jet: no eta satisfies the commutator equation");
  return eta;
}

// canonical 4x4 block form of J used for the block-relation cross-checks
inline Mat4 canonical_J() {
  Mat4 j = Mat4::Zero();
  // two 2x2 blocks [[0, 1], [-1, 0]]
  j(0, 1) = 1;
  j(1, 0) = -1;
  j(2, 3) = 1;
  j(3, 2) = -1;
  return j;
}

} // namespace crlab
