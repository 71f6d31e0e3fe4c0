#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "jaccess/types.hpp"

namespace jaccess {

// argmin_u ||A u - b||^2 + ridge ||u||^2.
// ridge == 0 with rank-deficient A yields the minimum-norm solution.
template <typename Scalar>
VectorX<Scalar> least_squares(const MatrixX<Scalar>& A,
                              const VectorX<Scalar>& b,
                              Scalar ridge = Scalar(0)) {
  if (b.size() != A.rows())
    throw std::invalid_argument("least_squares: b length must equal A rows");
  if (ridge < Scalar(0))
    throw std::invalid_argument("least_squares: ridge must be nonnegative");
  if (!A.allFinite() || !b.allFinite())
    throw DataError("least_squares: non-finite input");

  if (ridge > Scalar(0)) {
    MatrixX<Scalar> gram = A.transpose() * A;
    gram.diagonal().array() += ridge;
    return Eigen::LLT<MatrixX<Scalar>>(gram).solve(A.transpose() * b);
  }
  return Eigen::BDCSVD<MatrixX<Scalar>>(A, Eigen::ComputeThinU |
                                               Eigen::ComputeThinV)
      .solve(b);
}

}  // namespace jaccess
