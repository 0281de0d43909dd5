#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>

namespace uvos {

// Dense 2-D grids are row-major so that flat storage matches the on-disk
// layout (last dimension fastest).
template <class Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using PlaneXd = Plane<double>;
using VecXd = Vec<double>;

// Per-pixel boolean grid, foreground = true.
using Mask = Plane<bool>;

// Per-pixel displacement in pixels; u horizontal, v vertical.
struct FlowField {
  PlaneXd u;
  PlaneXd v;

  Eigen::Index height() const { return u.rows(); }
  Eigen::Index width() const { return u.cols(); }
};

// Malformed byte streams and files.
struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite values where the algorithm requires finite ones.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Coefficient-wise logistic link, evaluated through std::exp so results are
// reproducible against scalar oracles.
template <class Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& r) {
  return r.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

// L2 normalization; an all-zero vector stays zero.
inline VecXd l2_normalized(VecXd v) {
  const double n = v.norm();
  if (n > 0.0) v /= n;
  return v;
}

}  // namespace uvos
