#pragma once

#include <vector>

#include "uvos/tensor.hpp"
#include "uvos/types.hpp"

namespace uvos {

// Run-length-encoded pixel set over row-major linear indices. Runs are
// sorted, non-overlapping and maximal.
class PixelRuns {
 public:
  struct Run {
    Eigen::Index start = 0;
    Eigen::Index length = 0;
    bool operator==(const Run&) const = default;
  };

  PixelRuns() = default;

  // indices must be sorted and distinct
  static PixelRuns from_sorted_indices(const std::vector<Eigen::Index>& indices);

  const std::vector<Run>& runs() const { return runs_; }
  Eigen::Index area() const { return area_; }
  bool empty() const { return area_ == 0; }
  Eigen::Index first_pixel() const;

  template <class Fn>
  void for_each_pixel(Fn&& fn) const {
    for (const Run& run : runs_)
      for (Eigen::Index i = 0; i < run.length; ++i) fn(run.start + i);
  }

  Mask to_mask(Eigen::Index rows, Eigen::Index cols) const;
  void paint(Mask& m) const;

  bool operator==(const PixelRuns&) const = default;

 private:
  std::vector<Run> runs_;
  Eigen::Index area_ = 0;
};

// One connected foreground component in one frame.
struct Segment {
  int frame = 0;
  int id = 0;
  PixelRuns pixels;
  VecXd feat_mine;  // unit norm (or zero), dimension D_mine
  VecXd feat_sim;   // unit norm (or zero), dimension D_sim
  double objectness = 0.0;  // mean foreground probability over the segment
  double motion = 0.0;      // mean motion saliency over the segment
};

struct ProposalSet {
  std::vector<Segment> segments;
  int frame_count = 0;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;

  int size() const { return static_cast<int>(segments.size()); }
};

struct ExtractConfig {
  double tau = 0.5;            // binarization threshold on probability
  int connectivity = 8;        // 4 or 8
  double min_area_frac = 0.001;  // components below this fraction of W*H are dropped
};

// fg iff prob >= tau
Mask binarize(const PlaneXd& prob, double tau);

// Maximal connected foreground components in deterministic order (by
// row-major first pixel); components smaller than min_area_frac * (W*H)
// are discarded.
std::vector<PixelRuns> connected_components(const Mask& m, int connectivity,
                                            double min_area_frac = 0.0);

// Per-channel mean of a [C,H,W] stack over the pixel set, before
// normalization.
VecXd segment_mean(const PixelRuns& pixels, const Tensor& stack);

// segment_mean followed by L2 normalization (zero vector stays zero)
VecXd pool_features(const PixelRuns& pixels, const Tensor& stack);

double region_mean(const PixelRuns& pixels, const PlaneXd& map);

inline double objectness(const PixelRuns& pixels, const PlaneXd& prob) {
  return region_mean(pixels, prob);
}

inline double motion_score(const PixelRuns& pixels, const PlaneXd& saliency) {
  return region_mean(pixels, saliency);
}

// Per frame: binarize -> connected components -> score; segment ids are
// assigned 0..n-1 by frame, then by discovery order.
ProposalSet extract_proposals(const std::vector<PlaneXd>& prob,
                              const std::vector<Tensor>& feat_mine,
                              const std::vector<Tensor>& feat_sim,
                              const std::vector<PlaneXd>& saliency,
                              const ExtractConfig& cfg);

}  // namespace uvos
