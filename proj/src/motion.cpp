#include "uvos/motion.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace uvos {

PlaneXd flow_magnitude(const FlowField& f) {
  return (f.u.square() + f.v.square()).sqrt();
}

Mask border_seeds(Eigen::Index rows, Eigen::Index cols) {
  Mask m = Mask::Constant(rows, cols, false);
  m.row(0).setConstant(true);
  m.row(rows - 1).setConstant(true);
  m.col(0).setConstant(true);
  m.col(cols - 1).setConstant(true);
  return m;
}

PlaneXd fast_mbd(const PlaneXd& cost, const Mask& seeds, int max_passes, double tol,
                 MbdStats* stats) {
  const Eigen::Index rows = cost.rows();
  const Eigen::Index cols = cost.cols();
  if (seeds.rows() != rows || seeds.cols() != cols)
    throw std::invalid_argument("fast_mbd: seed mask shape mismatch");
  if (!seeds.any()) throw std::invalid_argument("fast_mbd: seed set is empty");

  constexpr double inf = std::numeric_limits<double>::infinity();
  PlaneXd dist = PlaneXd::Constant(rows, cols, inf);
  PlaneXd hi = PlaneXd::Constant(rows, cols, -inf);
  PlaneXd lo = PlaneXd::Constant(rows, cols, inf);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      if (seeds(r, c)) {
        dist(r, c) = 0.0;
        hi(r, c) = cost(r, c);
        lo(r, c) = cost(r, c);
      }

  auto relax = [&](Eigen::Index pr, Eigen::Index pc, Eigen::Index qr, Eigen::Index qc,
                   double& change) {
    if (dist(qr, qc) == inf) return;  // no path through q yet
    const double u = std::max(hi(qr, qc), cost(pr, pc));
    const double l = std::min(lo(qr, qc), cost(pr, pc));
    const double d = u - l;
    if (d < dist(pr, pc)) {
      change = std::max(change, dist(pr, pc) - d);
      dist(pr, pc) = d;
      hi(pr, pc) = u;
      lo(pr, pc) = l;
    }
  };

  MbdStats local;
  for (int pass = 0; pass < max_passes; ++pass) {
    double change = 0.0;
    if (pass % 2 == 0) {
      // forward: relax from the left and top neighbors
      for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
          if (c > 0) relax(r, c, r, c - 1, change);
          if (r > 0) relax(r, c, r - 1, c, change);
        }
    } else {
      // backward: relax from the right and bottom neighbors
      for (Eigen::Index r = rows - 1; r >= 0; --r)
        for (Eigen::Index c = cols - 1; c >= 0; --c) {
          if (c + 1 < cols) relax(r, c, r, c + 1, change);
          if (r + 1 < rows) relax(r, c, r + 1, c, change);
        }
    }
    ++local.passes;
    if (change < tol) {
      local.converged = true;
      break;
    }
  }
  if (stats) *stats = local;
  return dist;
}

SaliencyMap motion_saliency(const FlowField& f, int max_passes, double tol) {
  const PlaneXd mag = flow_magnitude(f);
  const PlaneXd dist = fast_mbd(mag, border_seeds(mag.rows(), mag.cols()), max_passes, tol);
  const double lo = dist.minCoeff();
  const double hi = dist.maxCoeff();
  if (!(hi > lo)) return PlaneXd::Zero(dist.rows(), dist.cols());
  return (dist - lo) / (hi - lo);
}

}  // namespace uvos
