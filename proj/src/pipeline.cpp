#include "uvos/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "uvos/io.hpp"
#include "uvos/parallel.hpp"

namespace uvos {

std::pair<std::vector<Mask>, std::vector<char>> pseudo_masks(const Selection& sel,
                                                             const ProposalSet& p) {
  std::vector<Mask> masks(static_cast<std::size_t>(p.frame_count),
                          Mask::Constant(p.rows, p.cols, false));
  std::vector<char> labeled(static_cast<std::size_t>(p.frame_count), 0);
  for (int id : sel.ids) {
    if (id < 0 || id >= p.size()) throw std::invalid_argument("pseudo_masks: id out of range");
    const Segment& s = p.segments[id];
    s.pixels.paint(masks[static_cast<std::size_t>(s.frame)]);
    labeled[static_cast<std::size_t>(s.frame)] = 1;
  }
  return {std::move(masks), std::move(labeled)};
}

namespace {

double mask_iou(const Mask& a, const Mask& b) {
  const auto inter = (a && b).count();
  const auto uni = (a || b).count();
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

double proposal_iou(const ProposalSet& prev_p, const Selection& prev_s,
                    const ProposalSet& cur_p, const Selection& cur_s) {
  if (prev_p.frame_count != cur_p.frame_count || prev_p.rows != cur_p.rows ||
      prev_p.cols != cur_p.cols)
    throw std::invalid_argument("proposal_iou: frame grid mismatch");
  const auto prev = pseudo_masks(prev_s, prev_p).first;
  const auto cur = pseudo_masks(cur_s, cur_p).first;
  double acc = 0.0;
  for (std::size_t f = 0; f < prev.size(); ++f) acc += mask_iou(prev[f], cur[f]);
  return prev.empty() ? 1.0 : acc / static_cast<double>(prev.size());
}

Mask refine(const PlaneXd& prob, const SaliencyMap& sal, double blend, double tau) {
  if (prob.rows() != sal.rows() || prob.cols() != sal.cols())
    throw std::invalid_argument("refine: shape mismatch");
  return (blend * prob + (1.0 - blend) * sal) >= tau;
}

std::vector<SaliencyMap> bundle_saliency(const VideoBundle& b, const PipelineConfig& cfg) {
  if (b.frames < 2 || b.flows.size() + 1 != static_cast<std::size_t>(b.frames))
    throw std::invalid_argument("bundle_saliency: need frames - 1 flow fields");
  const std::size_t n_flows = b.flows.size();
  std::vector<SaliencyMap> sal(static_cast<std::size_t>(b.frames));
  parallel_for(static_cast<Eigen::Index>(n_flows), cfg.threads, [&](Eigen::Index f) {
    sal[static_cast<std::size_t>(f)] =
        motion_saliency(b.flows[static_cast<std::size_t>(f)], cfg.mbd_max_passes, cfg.mbd_tol);
  });
  // no forward flow for the last frame
  sal.back() = sal[static_cast<std::size_t>(b.frames - 2)];
  return sal;
}

namespace {

std::vector<PlaneXd> forward_frames(const VideoBundle& b, const TransferWeights& theta,
                                    int threads) {
  std::vector<PlaneXd> prob(static_cast<std::size_t>(b.frames));
  parallel_for(b.frames, threads, [&](Eigen::Index f) {
    prob[static_cast<std::size_t>(f)] = forward(b.resp[static_cast<std::size_t>(f)], theta).prob;
  });
  return prob;
}

}  // namespace

PipelineResult run_pipeline(const VideoBundle& b, const SourceGallery* gallery, int category,
                            const PipelineConfig& cfg) {
  if (b.frames < 2) throw std::invalid_argument("pipeline: bundle must have >= 2 frames");
  if ((gallery != nullptr) == (category >= 0))
    throw std::invalid_argument("pipeline: supply exactly one of gallery / category");
  if (cfg.max_outer_iters < 1)
    throw std::invalid_argument("pipeline: max_outer_iters must be >= 1");

  PipelineResult result;

  if (gallery) {
    std::vector<VecXd> frame_vecs(static_cast<std::size_t>(b.frames));
    for (int f = 0; f < b.frames; ++f)
      frame_vecs[static_cast<std::size_t>(f)] =
          pooled_frame_vector(b.feat_sim[static_cast<std::size_t>(f)], nullptr);
    result.weights = init_weights(frame_vecs, *gallery);
  } else {
    result.weights = one_hot_weights(category, b.channels);
  }
  result.initial_weights = result.weights;

  const std::vector<SaliencyMap> saliency = bundle_saliency(b, cfg);
  std::vector<PlaneXd> prob;

  for (int iter = 1; iter <= cfg.max_outer_iters; ++iter) {
    prob = forward_frames(b, result.weights, cfg.threads);
    ProposalSet proposals = extract_proposals(prob, b.feat_mine, b.feat_sim, saliency, cfg.extract);

    IterationRecord rec;
    rec.iter = iter;
    rec.proposal_count = proposals.size();

    if (proposals.size() == 0) {
      if (iter == 1) {
        result.warning = "no proposals in iteration 1; emitting motion-refined masks only";
        result.records.push_back(rec);
        result.masks.reserve(static_cast<std::size_t>(b.frames));
        for (int f = 0; f < b.frames; ++f)
          result.masks.push_back(saliency[static_cast<std::size_t>(f)] >= cfg.extract.tau);
        return result;
      }
      // predictions collapsed after training: keep the previous iteration
      result.records.push_back(rec);
      break;
    }

    const SimilarityMatrix W = similarity_matrix(proposals);
    Selection sel = greedy_select(proposals, W, cfg.mining);
    rec.selected_count = static_cast<int>(sel.ids.size());
    rec.energy = sel.energy;

    bool converged = false;
    if (!result.selections.empty()) {
      rec.iou = proposal_iou(result.proposal_sets.back(), result.selections.back(),
                             proposals, sel);
      converged = rec.iou >= cfg.iou_converge;
    }

    auto [labels, labeled] = pseudo_masks(sel, proposals);
    std::vector<Tensor> train_stacks;
    std::vector<Mask> train_labels;
    for (int f = 0; f < b.frames; ++f) {
      if (labeled[static_cast<std::size_t>(f)]) {
        train_stacks.push_back(b.resp[static_cast<std::size_t>(f)]);
        train_labels.push_back(labels[static_cast<std::size_t>(f)]);
      }
    }

    result.proposal_sets.push_back(std::move(proposals));
    result.selections.push_back(std::move(sel));

    if (converged || iter == cfg.max_outer_iters || train_stacks.empty()) {
      if (!train_stacks.empty())
        rec.loss = batch_loss(train_stacks, result.weights, train_labels, cfg.train.prob_clip_eps);
      result.records.push_back(rec);
      break;
    }

    const TrainResult trained =
        train_transfer(train_stacks, train_labels, result.weights, cfg.train);
    result.weights = trained.weights;
    double mean_loss = 0.0;
    for (double l : trained.loss_trace) mean_loss += l;
    rec.loss = mean_loss / static_cast<double>(trained.loss_trace.size());
    result.records.push_back(rec);
  }

  result.masks.reserve(static_cast<std::size_t>(b.frames));
  for (int f = 0; f < b.frames; ++f)
    result.masks.push_back(refine(prob[static_cast<std::size_t>(f)],
                                  saliency[static_cast<std::size_t>(f)], cfg.refine_blend,
                                  cfg.extract.tau));
  return result;
}

void save_outputs(const PipelineResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t f = 0; f < result.masks.size(); ++f)
    save_pgm_mask(result.masks[f], dir / frame_name("final_", static_cast<int>(f), ".pgm"));

  std::ofstream iters(dir / "iters.txt");
  if (!iters) throw FormatError("pipeline: cannot write iters.txt");
  char buf[160];
  for (const IterationRecord& r : result.records) {
    std::snprintf(buf, sizeof(buf), "%d %d %d %.10g %.10g %.10g\n", r.iter, r.proposal_count,
                  r.selected_count, r.energy, r.loss, r.iou);
    iters << buf;
  }
  iters.close();
  save_weights(result.weights, dir / "weights.sgt");
}

}  // namespace uvos
