#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace jaccess {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;
using Index = Eigen::Index;

// Malformed or inconsistent input: bad files, out-of-range indices,
// incompatible shapes discovered at data boundaries.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure: solver non-convergence, divergence to NaN.
// Never used to report an infeasible-but-well-posed problem.
class NumericsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace jaccess
