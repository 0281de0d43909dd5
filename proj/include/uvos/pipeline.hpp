#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "uvos/bundle.hpp"
#include "uvos/mining.hpp"
#include "uvos/motion.hpp"
#include "uvos/proposals.hpp"
#include "uvos/transfer.hpp"

namespace uvos {

// Alternating optimization: mine object-like segments from the current
// predictions, train the transferable layer on them as pseudo ground truth,
// and repeat until the selected proposals stabilize (frame-averaged IoU of
// the selected unions between consecutive iterations reaches iou_converge).

struct PipelineConfig {
  MiningConfig mining;
  TrainConfig train;
  ExtractConfig extract;
  double iou_converge = 0.9;
  int max_outer_iters = 10;
  double refine_blend = 0.5;  // weight of the prediction vs the motion prior
  int mbd_max_passes = 10;
  double mbd_tol = 1e-6;
  int threads = 1;
};

struct IterationRecord {
  int iter = 0;          // 1-based outer iteration
  int proposal_count = 0;
  int selected_count = 0;
  double energy = 0.0;   // E_s of the selection
  double loss = 0.0;     // mean training loss this iteration
  double iou = 0.0;      // selected-union IoU vs the previous iteration (0 for iter 1)
};

struct PipelineResult {
  std::vector<Mask> masks;              // final refined per-frame masks
  std::vector<IterationRecord> records;
  TransferWeights weights;
  TransferWeights initial_weights;
  std::vector<ProposalSet> proposal_sets;  // per iteration, for observability
  std::vector<Selection> selections;
  std::string warning;  // nonempty when iteration 1 found no proposals
};

// Per-frame union of the selected segments; frames with no selected segment
// are flagged unlabeled and excluded from training.
std::pair<std::vector<Mask>, std::vector<char>> pseudo_masks(const Selection& sel,
                                                             const ProposalSet& p);

// Frame-averaged IoU between the selected unions of two iterations; frames
// where both unions are empty count as 1.
double proposal_iou(const ProposalSet& prev_p, const Selection& prev_s,
                    const ProposalSet& cur_p, const Selection& cur_s);

// fused = blend * prob + (1 - blend) * saliency; mask = fused >= tau
Mask refine(const PlaneXd& prob, const SaliencyMap& sal, double blend, double tau);

// Motion saliency for every frame; the last frame reuses the previous
// frame's map (there is no forward flow for it).
std::vector<SaliencyMap> bundle_saliency(const VideoBundle& b, const PipelineConfig& cfg);

// Full run. Exactly one of gallery / category selects the initialization:
// similarity averaging over the gallery, or one-hot on a known category.
PipelineResult run_pipeline(const VideoBundle& b, const SourceGallery* gallery, int category,
                            const PipelineConfig& cfg);

// Output directory: final_%04d.pgm, iters.txt ("iter |P| |A| Es loss iou"
// per line), weights.sgt.
void save_outputs(const PipelineResult& result, const std::filesystem::path& dir);

}  // namespace uvos
