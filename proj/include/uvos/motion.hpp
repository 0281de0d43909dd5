#pragma once

#include "uvos/types.hpp"

namespace uvos {

// Motion saliency from optical flow: the flow magnitude image is treated as
// a cost map and transformed with a raster-scan approximation of the minimum
// barrier distance (MBD), seeded at the image border. A path's cost is
// max - min of the values along it; the distance is the minimum over paths
// from the seed set, so pixels that move like the border score near zero.

using SaliencyMap = PlaneXd;  // rank-2, values in [0, 1]

PlaneXd flow_magnitude(const FlowField& f);

Mask border_seeds(Eigen::Index rows, Eigen::Index cols);

struct MbdStats {
  int passes = 0;        // raster sweeps actually run
  bool converged = false;  // largest per-pass change fell below tol
};

// Alternating forward/backward raster sweeps over (dist, pathmax, pathmin)
// per pixel. Seeds start at (0, cost, cost), everything else at
// (+inf, -inf, +inf). Relaxing p from q proposes
//   dist' = max(pathmax_q, cost_p) - min(pathmin_q, cost_p)
// and is accepted iff dist' < dist_p. Stops after max_passes sweeps or when
// the largest per-sweep change drops below tol. The result upper-bounds the
// exact MBD because every relaxation chain realizes an actual path.
PlaneXd fast_mbd(const PlaneXd& cost, const Mask& seeds, int max_passes = 10,
                 double tol = 1e-6, MbdStats* stats = nullptr);

// fast_mbd over the flow magnitude with border seeds, then min-max
// normalized to [0, 1]. A constant distance map yields all zeros.
SaliencyMap motion_saliency(const FlowField& f, int max_passes = 10, double tol = 1e-6);

}  // namespace uvos
