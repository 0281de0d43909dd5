#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "uvos/bundle.hpp"
#include "uvos/transfer.hpp"
#include "uvos/types.hpp"

namespace uvos {

// Deterministic synthetic scenarios with exact ground truth. A rectangular
// object whose response signature is a convex mix of two seen categories
// moves across the frames; optional static distractor blobs answer to the
// remaining categories, look object-like in appearance, but carry no motion.

struct SynthParams {
  std::uint64_t seed = 7;
  int frames = 8;
  Eigen::Index rows = 64;
  Eigen::Index cols = 64;
  int channels = 4;          // seen categories C_s
  int sim_block = 4;         // dims per category in the similarity space
  int mine_dims = 8;

  Eigen::Index obj_rows = 16, obj_cols = 16;
  Eigen::Index start_row = 10, start_col = 10;
  Eigen::Index step_row = 1, step_col = 2;

  int cat_a = 1, cat_b = 3;  // the two categories the object mixes
  double mix_a = 0.6;        // mix_b = 1 - mix_a
  double noise = 0.3;        // response noise sigma
  double logit = 8.0;        // response amplitude inside/outside

  int distractors = 0;       // static blob count
  Eigen::Index blob_rows = 12, blob_cols = 12;

  int gallery_per_cat = 5;
  double gallery_jitter = 0.1;

  int sim_dims() const { return (channels + 1) * sim_block; }
};

struct Scenario {
  SynthParams params;
  VideoBundle bundle;
  SourceGallery gallery;
  std::vector<Mask> gt;
  VecXd signature;  // per-category mix of the unseen object, sums to 1
};

Scenario gen_scenario(const SynthParams& params);

// Writes dir/bundle (with gt_%04d.pgm alongside) and dir/gallery.
void write_scenario(const Scenario& s, const std::filesystem::path& dir);

// |a and b| / |a or b|; both empty counts as 1.
double iou(const Mask& a, const Mask& b);

struct VideoReport {
  std::vector<double> per_frame;
  double mean = 0.0;
};

// Pairs the .pgm files of the two directories in name order.
VideoReport video_report(const std::filesystem::path& pred_dir,
                         const std::filesystem::path& gt_dir);

std::string format_report(const VideoReport& report);

}  // namespace uvos
