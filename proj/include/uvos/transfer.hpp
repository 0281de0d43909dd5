#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "uvos/tensor.hpp"
#include "uvos/types.hpp"

namespace uvos {

// The transferable layer: a response map for the unseen category is a linear
// combination of the seen-category response maps, r = sum_c w_c r_c, with an
// optional per-channel affine adapter (a, b) standing in for backbone
// adaptation. Weights are fitted to mined pseudo-labels with SGD on a
// binary cross-entropy loss.

// Per-category feature vectors from the source domain; rows of vectors[c]
// are unit-norm D_sim-dimensional descriptors.
struct SourceGallery {
  std::vector<std::string> categories;
  std::vector<Eigen::MatrixXd> vectors;  // vectors[c] is J_c x D_sim

  int category_count() const { return static_cast<int>(categories.size()); }
};

struct TransferWeights {
  VecXd w;                     // mixing weight per seen category
  bool affine_enabled = false;
  VecXd a;                     // per-channel scale, identity when disabled
  VecXd b;                     // per-channel bias, zero when disabled

  static TransferWeights make(int categories, bool affine = false);
  int category_count() const { return static_cast<int>(w.size()); }
};

struct TrainConfig {
  double learning_rate = 0.1;
  double momentum = 0.9;
  int epochs = 50;
  double prob_clip_eps = 1e-7;
};

// Similarity-based initialization: w_c is the average over target frames of
// the largest inner product against source category c's vectors.
TransferWeights init_weights(const std::vector<VecXd>& target_frames, const SourceGallery& g);

// Weakly-supervised initialization: weight 1 on the known category.
TransferWeights one_hot_weights(int category, int category_count);

struct ForwardResult {
  PlaneXd response;  // r = sum_c w_c (a_c R_c + b_c)
  PlaneXd prob;      // logistic(r)
};

ForwardResult forward(const Tensor& response_stack, const TransferWeights& theta);

// Mean over pixels of -[y ln p + (1-y) ln(1-p)] with p clipped to
// [eps, 1-eps].
double bce_loss(const PlaneXd& prob, const Mask& y, double eps);

struct Gradients {
  VecXd dw, da, db;
};

// Full-batch analytic gradients of the mean BCE over the given labeled
// frames. Pixels whose probability lands outside [eps, 1-eps] sit on the
// flat part of the clip and contribute zero.
Gradients loss_gradients(std::span<const Tensor> response_stacks, const TransferWeights& theta,
                         std::span<const Mask> labels, double eps);

double batch_loss(std::span<const Tensor> response_stacks, const TransferWeights& theta,
                  std::span<const Mask> labels, double eps);

struct TrainResult {
  TransferWeights weights;
  std::vector<double> loss_trace;  // loss before each update, one per epoch
};

// SGD with momentum: v <- momentum * v - lr * grad; param <- param + v.
// Aborts with NumericError if the loss turns non-finite.
TrainResult train_transfer(std::span<const Tensor> response_stacks, std::span<const Mask> labels,
                           const TransferWeights& init, const TrainConfig& cfg);

// Whole-frame (or union-of-segments) pooled similarity feature per frame,
// L2-normalized; used as F_t for init_weights. A null/empty mask means the
// whole frame.
VecXd pooled_frame_vector(const Tensor& feat_sim_stack, const Mask* region);

// weights file: rank-1 tensor [C_s] with w; companion rank-2 [2, C_s]
// "<stem>_affine" tensor holds (a; b) when the adapter is enabled.
void save_weights(const TransferWeights& theta, const std::filesystem::path& file);
TransferWeights load_weights(const std::filesystem::path& file);

// gallery directory: categories.txt, one name per line, plus cat_<idx>.sgt
// rank-2 tensors [J_c, D_sim]; rows are normalized on load.
void save_gallery(const SourceGallery& g, const std::filesystem::path& dir);
SourceGallery load_gallery(const std::filesystem::path& dir);

}  // namespace uvos
