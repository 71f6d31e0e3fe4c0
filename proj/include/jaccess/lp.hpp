#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "jaccess/types.hpp"

namespace jaccess {

template <typename Scalar>
struct FeasibilityResultT {
  bool feasible = false;
  // Present iff feasible; satisfies ||witness||_inf <= 1.
  std::optional<VectorX<Scalar>> witness;
  // Smallest response a_i . witness over margin-coupled rows, recomputed
  // from the witness itself so the stored pair is always consistent.
  Scalar margin = Scalar(0);
};

using FeasibilityResult = FeasibilityResultT<double>;

namespace detail {

enum class SimplexStatus { Optimal, Infeasible, Unbounded, IterationLimit };

template <typename Scalar>
using RowVecX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

// Dense two-phase tableau simplex with Bland's anti-cycling rule for
//   min c.z  s.t.  G z <= h,  z >= 0.
// Writes the minimizer into z on Optimal.
template <typename Scalar>
SimplexStatus simplex_min(const MatrixX<Scalar>& G, const VectorX<Scalar>& h,
                          const VectorX<Scalar>& c, VectorX<Scalar>& z) {
  const Index m = G.rows();
  const Index nv = G.cols();
  constexpr Scalar kPivotEps = Scalar(1e-10);

  Index na = 0;
  for (Index i = 0; i < m; ++i)
    if (h(i) < Scalar(0)) ++na;

  const Index slack0 = nv;
  const Index art0 = nv + m;
  const Index width = nv + m + na + 1;
  const Index rhs = width - 1;

  MatrixX<Scalar> T = MatrixX<Scalar>::Zero(m, width);
  std::vector<Index> basic(static_cast<std::size_t>(m));
  {
    Index art = art0;
    for (Index i = 0; i < m; ++i) {
      if (h(i) >= Scalar(0)) {
        T.block(i, 0, 1, nv) = G.row(i);
        T(i, slack0 + i) = Scalar(1);
        T(i, rhs) = h(i);
        basic[i] = slack0 + i;
      } else {
        T.block(i, 0, 1, nv) = -G.row(i);
        T(i, slack0 + i) = Scalar(-1);
        T(i, art) = Scalar(1);
        T(i, rhs) = -h(i);
        basic[i] = art++;
      }
    }
  }

  RowVecX<Scalar> obj = RowVecX<Scalar>::Zero(width);

  const auto pivot = [&](Index r, Index col) {
    T.row(r) /= T(r, col);
    for (Index i = 0; i < m; ++i) {
      if (i == r) continue;
      const Scalar f = T(i, col);
      if (f != Scalar(0)) T.row(i) -= f * T.row(r);
    }
    const Scalar fo = obj(col);
    if (fo != Scalar(0)) obj -= fo * T.row(r);
    basic[r] = col;
  };

  // Once an artificial leaves the basis it is withdrawn for good; in phase 2
  // artificial columns are never eligible.
  std::vector<bool> banned(static_cast<std::size_t>(width), false);

  const auto run_phase = [&](Index eligible_end) -> SimplexStatus {
    const Index iter_cap = 2000 + 50 * (m + nv);
    for (Index iter = 0; iter < iter_cap; ++iter) {
      // Bland entering rule: lowest-index improving column.
      Index enter = -1;
      for (Index j = 0; j < eligible_end; ++j) {
        if (banned[j]) continue;
        if (obj(j) < -kPivotEps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return SimplexStatus::Optimal;

      // Bland leaving rule: min ratio, ties to the smallest basic index.
      Index leave = -1;
      Scalar best = std::numeric_limits<Scalar>::max();
      for (Index i = 0; i < m; ++i) {
        const Scalar a = T(i, enter);
        if (a <= kPivotEps) continue;
        const Scalar ratio = T(i, rhs) / a;
        if (leave < 0 || ratio < best - kPivotEps ||
            (ratio < best + kPivotEps && basic[i] < basic[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return SimplexStatus::Unbounded;

      const Index leaving_col = basic[leave];
      pivot(leave, enter);
      if (leaving_col >= art0) banned[leaving_col] = true;
    }
    return SimplexStatus::IterationLimit;
  };

  if (na > 0) {
    // Phase 1: min sum of artificials. Reduced costs with artificials basic.
    for (Index i = 0; i < m; ++i)
      if (basic[i] >= art0) obj -= T.row(i);
    for (Index j = art0; j < rhs; ++j) obj(j) += Scalar(1);

    const SimplexStatus st = run_phase(rhs);
    if (st != SimplexStatus::Optimal) return st;

    Scalar infeas = Scalar(0);
    for (Index i = 0; i < m; ++i)
      if (basic[i] >= art0) infeas += T(i, rhs);
    if (infeas > Scalar(1e-7)) return SimplexStatus::Infeasible;

    // Drive remaining zero-level artificials out of the basis when a pivot
    // exists; a fully zero row is redundant and stays inert.
    for (Index i = 0; i < m; ++i) {
      if (basic[i] < art0) continue;
      for (Index j = 0; j < art0; ++j) {
        if (std::abs(T(i, j)) > kPivotEps) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  // Phase 2 reduced costs for the true objective under the current basis.
  obj.setZero();
  obj.head(nv) = c.transpose();
  for (Index i = 0; i < m; ++i) {
    const Index b = basic[i];
    const Scalar cb = b < nv ? c(b) : Scalar(0);
    if (cb != Scalar(0)) obj -= cb * T.row(i);
  }
  for (Index j = art0; j < rhs; ++j) banned[j] = true;

  const SimplexStatus st = run_phase(rhs);
  if (st != SimplexStatus::Optimal) return st;

  z = VectorX<Scalar>::Zero(nv);
  for (Index i = 0; i < m; ++i)
    if (basic[i] < nv) z(basic[i]) = T(i, rhs);
  return SimplexStatus::Optimal;
}

}  // namespace detail

// Decides feasibility of the mixed homogeneous system
//   a_i . u > 0   for strict rows,
//   a_i . u >= 0  for the remaining rows,
// via the bounded program  max delta  s.t.  A u >= delta on strict rows,
// a_i . u >= 0 elsewhere, -1 <= u <= 1.  Homogeneity of the target system
// makes the box constraint lossless.  The verdict compares the margin
// recomputed from the recovered witness against `tolerance`; margins at or
// below it count as infeasible.
template <typename Scalar>
FeasibilityResultT<Scalar> lp_strict_feasible_mixed(
    const MatrixX<Scalar>& A, const std::vector<bool>& strict,
    Scalar tolerance) {
  const Index m = A.rows();
  const Index d = A.cols();
  if (m == 0 || d == 0)
    throw std::invalid_argument("lp_strict_feasible: matrix must be nonempty");
  if (!(tolerance > Scalar(0)) || tolerance > Scalar(1e-3))
    throw std::invalid_argument(
        "lp_strict_feasible: tolerance must lie in (0, 1e-3]");
  if (!A.allFinite())
    throw DataError("lp_strict_feasible: matrix contains non-finite entries");
  if (static_cast<Index>(strict.size()) != m)
    throw std::invalid_argument("lp_strict_feasible: strict mask size");
  Index n_strict = 0;
  for (bool s : strict) n_strict += s ? 1 : 0;
  if (n_strict == 0)
    throw std::invalid_argument(
        "lp_strict_feasible: at least one strict row required");

  // Variables z = (x, delta) with x = u + 1 in [0, 2] and delta >= 0
  // (delta >= 0 is attainable: u = 0 satisfies every row at level 0).
  const Index nv = d + 1;
  MatrixX<Scalar> G = MatrixX<Scalar>::Zero(m + d, nv);
  VectorX<Scalar> h(m + d);
  for (Index i = 0; i < m; ++i) {
    G.block(i, 0, 1, d) = -A.row(i);
    if (strict[i]) G(i, d) = Scalar(1);
    h(i) = -A.row(i).sum();
  }
  for (Index j = 0; j < d; ++j) {
    G(m + j, j) = Scalar(1);
    h(m + j) = Scalar(2);
  }
  VectorX<Scalar> c = VectorX<Scalar>::Zero(nv);
  c(d) = Scalar(-1);  // max delta

  VectorX<Scalar> z;
  switch (detail::simplex_min(G, h, c, z)) {
    case detail::SimplexStatus::Optimal:
      break;
    case detail::SimplexStatus::IterationLimit:
      throw NumericsError("lp_strict_feasible: simplex iteration cap reached");
    default:
      // The program always admits (u, delta) = (0, 0); anything else here is
      // a numerical breakdown, not a verdict.
      throw NumericsError("lp_strict_feasible: solver lost feasibility");
  }

  VectorX<Scalar> u = z.head(d).array() - Scalar(1);
  u = u.cwiseMax(Scalar(-1)).cwiseMin(Scalar(1));

  const VectorX<Scalar> response = A * u;
  Scalar margin = std::numeric_limits<Scalar>::max();
  for (Index i = 0; i < m; ++i) {
    if (strict[i]) {
      margin = std::min(margin, response(i));
    } else if (response(i) < Scalar(-1e-7)) {
      throw NumericsError("lp_strict_feasible: witness violates a zero row");
    }
  }

  FeasibilityResultT<Scalar> result;
  result.margin = margin;
  result.feasible = margin > tolerance;
  if (result.feasible) result.witness = std::move(u);
  return result;
}

// All-strict convenience form: decides whether A u > 0 admits a solution.
template <typename Scalar>
FeasibilityResultT<Scalar> lp_strict_feasible(const MatrixX<Scalar>& A,
                                              Scalar tolerance) {
  return lp_strict_feasible_mixed(
      A, std::vector<bool>(static_cast<std::size_t>(A.rows()), true),
      tolerance);
}

}  // namespace jaccess
