#include "uvos/proposals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uvos {

PixelRuns PixelRuns::from_sorted_indices(const std::vector<Eigen::Index>& indices) {
  PixelRuns p;
  for (Eigen::Index idx : indices) {
    if (!p.runs_.empty() && p.runs_.back().start + p.runs_.back().length == idx) {
      ++p.runs_.back().length;
    } else {
      p.runs_.push_back({idx, 1});
    }
  }
  p.area_ = static_cast<Eigen::Index>(indices.size());
  return p;
}

Eigen::Index PixelRuns::first_pixel() const {
  if (runs_.empty()) throw std::invalid_argument("pixel runs: empty set");
  return runs_.front().start;
}

Mask PixelRuns::to_mask(Eigen::Index rows, Eigen::Index cols) const {
  Mask m = Mask::Constant(rows, cols, false);
  paint(m);
  return m;
}

void PixelRuns::paint(Mask& m) const {
  bool* data = m.data();
  for_each_pixel([&](Eigen::Index i) { data[i] = true; });
}

Mask binarize(const PlaneXd& prob, double tau) { return prob >= tau; }

std::vector<PixelRuns> connected_components(const Mask& m, int connectivity,
                                            double min_area_frac) {
  if (connectivity != 4 && connectivity != 8)
    throw std::invalid_argument("connected_components: connectivity must be 4 or 8");
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  const Eigen::Index min_area =
      static_cast<Eigen::Index>(std::ceil(min_area_frac * static_cast<double>(rows * cols)));

  std::vector<char> visited(static_cast<std::size_t>(rows * cols), 0);
  const bool* fg = m.data();
  std::vector<PixelRuns> out;
  std::vector<Eigen::Index> stack;
  std::vector<Eigen::Index> pixels;

  for (Eigen::Index start = 0; start < rows * cols; ++start) {
    if (!fg[start] || visited[start]) continue;
    pixels.clear();
    stack.assign(1, start);
    visited[start] = 1;
    while (!stack.empty()) {
      const Eigen::Index p = stack.back();
      stack.pop_back();
      pixels.push_back(p);
      const Eigen::Index r = p / cols;
      const Eigen::Index c = p % cols;
      for (Eigen::Index dr = -1; dr <= 1; ++dr)
        for (Eigen::Index dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          if (connectivity == 4 && dr != 0 && dc != 0) continue;
          const Eigen::Index nr = r + dr;
          const Eigen::Index nc = c + dc;
          if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
          const Eigen::Index q = nr * cols + nc;
          if (fg[q] && !visited[q]) {
            visited[q] = 1;
            stack.push_back(q);
          }
        }
    }
    if (static_cast<Eigen::Index>(pixels.size()) < min_area) continue;
    std::sort(pixels.begin(), pixels.end());
    out.push_back(PixelRuns::from_sorted_indices(pixels));
  }
  return out;
}

VecXd segment_mean(const PixelRuns& pixels, const Tensor& stack) {
  if (stack.rank() != 3) throw std::invalid_argument("segment_mean: stack must be rank 3");
  if (pixels.empty()) throw std::invalid_argument("segment_mean: empty pixel set");
  const Eigen::Index C = stack.channels();
  const Eigen::Index plane_size = stack.rows() * stack.cols();
  VecXd mean = VecXd::Zero(C);
  for (Eigen::Index c = 0; c < C; ++c) {
    const double* base = stack.data() + c * plane_size;
    double sum = 0.0;
    pixels.for_each_pixel([&](Eigen::Index i) {
      if (i < 0 || i >= plane_size) throw std::invalid_argument("segment_mean: pixel out of bounds");
      sum += base[i];
    });
    mean[c] = sum / static_cast<double>(pixels.area());
  }
  return mean;
}

VecXd pool_features(const PixelRuns& pixels, const Tensor& stack) {
  return l2_normalized(segment_mean(pixels, stack));
}

double region_mean(const PixelRuns& pixels, const PlaneXd& map) {
  if (pixels.empty()) throw std::invalid_argument("region_mean: empty pixel set");
  const Eigen::Index n = map.size();
  const double* base = map.data();
  double sum = 0.0;
  pixels.for_each_pixel([&](Eigen::Index i) {
    if (i < 0 || i >= n) throw std::invalid_argument("region_mean: pixel out of bounds");
    sum += base[i];
  });
  return sum / static_cast<double>(pixels.area());
}

ProposalSet extract_proposals(const std::vector<PlaneXd>& prob,
                              const std::vector<Tensor>& feat_mine,
                              const std::vector<Tensor>& feat_sim,
                              const std::vector<PlaneXd>& saliency,
                              const ExtractConfig& cfg) {
  const std::size_t frames = prob.size();
  if (feat_mine.size() != frames || feat_sim.size() != frames || saliency.size() != frames)
    throw std::invalid_argument("extract_proposals: frame count mismatch");
  if (frames == 0) return {};

  ProposalSet set;
  set.frame_count = static_cast<int>(frames);
  set.rows = prob[0].rows();
  set.cols = prob[0].cols();

  int next_id = 0;
  for (std::size_t f = 0; f < frames; ++f) {
    if (prob[f].rows() != set.rows || prob[f].cols() != set.cols ||
        saliency[f].rows() != set.rows || saliency[f].cols() != set.cols ||
        feat_mine[f].rows() != set.rows || feat_mine[f].cols() != set.cols ||
        feat_sim[f].rows() != set.rows || feat_sim[f].cols() != set.cols)
      throw std::invalid_argument("extract_proposals: frame dimension mismatch");
    const Mask fg = binarize(prob[f], cfg.tau);
    for (PixelRuns& comp : connected_components(fg, cfg.connectivity, cfg.min_area_frac)) {
      Segment s;
      s.frame = static_cast<int>(f);
      s.id = next_id++;
      s.feat_mine = pool_features(comp, feat_mine[f]);
      s.feat_sim = pool_features(comp, feat_sim[f]);
      s.objectness = objectness(comp, prob[f]);
      s.motion = motion_score(comp, saliency[f]);
      s.pixels = std::move(comp);
      set.segments.push_back(std::move(s));
    }
  }
  return set;
}

}  // namespace uvos
