#include "uvos/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

#include "uvos/io.hpp"

namespace uvos {

namespace {

struct Rect {
  Eigen::Index top, left, height, width;

  bool contains(Eigen::Index r, Eigen::Index c) const {
    return r >= top && r < top + height && c >= left && c < left + width;
  }
  bool intersects(const Rect& o) const {
    return top < o.top + o.height && o.top < top + height && left < o.left + o.width &&
           o.left < left + width;
  }
};

Rect object_rect(const SynthParams& p, int frame) {
  return {p.start_row + frame * p.step_row, p.start_col + frame * p.step_col, p.obj_rows,
          p.obj_cols};
}

std::vector<Rect> blob_rects(const SynthParams& p) {
  std::vector<Rect> blobs;
  const Eigen::Index top = p.rows - p.blob_rows - 4;
  for (int k = 0; k < p.distractors; ++k)
    blobs.push_back({top, 4 + k * (p.blob_cols + 8), p.blob_rows, p.blob_cols});
  return blobs;
}

// unit vector supported on category c's block of the similarity space
VecXd category_direction(const SynthParams& p, int c) {
  VecXd v = VecXd::Zero(p.sim_dims());
  v[c * p.sim_block] = 1.0;
  return v;
}

}  // namespace

Scenario gen_scenario(const SynthParams& p) {
  if (p.frames < 2) throw std::invalid_argument("scenario: need at least 2 frames");
  if (p.channels < 2) throw std::invalid_argument("scenario: need at least 2 categories");
  if (p.cat_a == p.cat_b || p.cat_a >= p.channels || p.cat_b >= p.channels)
    throw std::invalid_argument("scenario: bad signature categories");
  if (p.mix_a <= 0.0 || p.mix_a >= 1.0)
    throw std::invalid_argument("scenario: mix must be inside (0, 1)");
  {
    const Rect last = object_rect(p, p.frames - 1);
    const Rect first = object_rect(p, 0);
    if (first.top < 0 || first.left < 0 || last.top < 0 || last.left < 0 ||
        last.top + last.height > p.rows || last.left + last.width > p.cols ||
        first.top + first.height > p.rows || first.left + first.width > p.cols)
      throw std::invalid_argument("scenario: trajectory out of bounds");
  }

  Scenario s;
  s.params = p;
  s.signature = VecXd::Zero(p.channels);
  s.signature[p.cat_a] = p.mix_a;
  s.signature[p.cat_b] = 1.0 - p.mix_a;

  const std::vector<Rect> blobs = blob_rects(p);
  for (const Rect& blob : blobs) {
    if (blob.top < 0 || blob.left < 0 || blob.top + blob.height > p.rows ||
        blob.left + blob.width > p.cols)
      throw std::invalid_argument("scenario: distractor out of bounds");
    for (int f = 0; f < p.frames; ++f)
      if (blob.intersects(object_rect(p, f)))
        throw std::invalid_argument("scenario: distractor intersects the trajectory");
  }

  // Distractors respond to the two lowest categories outside the signature.
  VecXd blob_signature = VecXd::Zero(p.channels);
  if (p.distractors > 0) {
    std::vector<int> others;
    for (int c = 0; c < p.channels; ++c)
      if (c != p.cat_a && c != p.cat_b) others.push_back(c);
    if (others.empty()) throw std::invalid_argument("scenario: no spare category for distractors");
    blob_signature[others[0]] = 0.5;
    blob_signature[others.size() > 1 ? others[1] : others[0]] += 0.5;
  }

  // similarity-space patterns
  VecXd obj_sim = l2_normalized(p.mix_a * category_direction(p, p.cat_a) +
                                (1.0 - p.mix_a) * category_direction(p, p.cat_b));
  VecXd blob_sim = VecXd::Zero(p.sim_dims());
  for (int c = 0; c < p.channels; ++c)
    if (blob_signature[c] > 0.0) blob_sim += blob_signature[c] * category_direction(p, c);
  blob_sim = l2_normalized(blob_sim);
  VecXd bg_sim = VecXd::Zero(p.sim_dims());
  bg_sim[p.channels * p.sim_block] = 1.0;

  // mining-space patterns: object and blobs are orthogonal, background apart
  VecXd obj_mine = VecXd::Zero(p.mine_dims);
  obj_mine[0] = 1.0;
  VecXd blob_mine = VecXd::Zero(p.mine_dims);
  blob_mine[1] = 1.0;
  VecXd bg_mine = VecXd::Zero(p.mine_dims);
  bg_mine[2] = 1.0;

  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  VideoBundle& b = s.bundle;
  b.frames = p.frames;
  b.rows = p.rows;
  b.cols = p.cols;
  b.channels = p.channels;
  b.dsim = p.sim_dims();

  for (int f = 0; f < p.frames; ++f) {
    const Rect obj = object_rect(p, f);

    Tensor resp = Tensor::stack(p.channels, p.rows, p.cols);
    for (int c = 0; c < p.channels; ++c) {
      auto plane = resp.channel(c);
      for (Eigen::Index r = 0; r < p.rows; ++r)
        for (Eigen::Index col = 0; col < p.cols; ++col) {
          double level;
          if (obj.contains(r, col)) {
            level = s.signature[c];
          } else {
            bool in_blob = false;
            for (const Rect& blob : blobs) in_blob = in_blob || blob.contains(r, col);
            level = in_blob ? blob_signature[c] : -(s.signature[c] + blob_signature[c]);
          }
          const double n = p.noise > 0.0 ? p.noise * gauss(rng) : 0.0;
          plane(r, col) = p.logit * level + n;
        }
    }
    b.resp.push_back(std::move(resp));

    auto fill_stack = [&](const VecXd& obj_v, const VecXd& blob_v, const VecXd& bg_v) {
      Tensor t = Tensor::stack(obj_v.size(), p.rows, p.cols);
      for (Eigen::Index d = 0; d < obj_v.size(); ++d) {
        auto plane = t.channel(d);
        for (Eigen::Index r = 0; r < p.rows; ++r)
          for (Eigen::Index col = 0; col < p.cols; ++col) {
            if (obj.contains(r, col)) {
              plane(r, col) = obj_v[d];
            } else {
              bool in_blob = false;
              for (const Rect& blob : blobs) in_blob = in_blob || blob.contains(r, col);
              plane(r, col) = in_blob ? blob_v[d] : bg_v[d];
            }
          }
      }
      return t;
    };
    b.feat_mine.push_back(fill_stack(obj_mine, blob_mine, bg_mine));
    b.feat_sim.push_back(fill_stack(obj_sim, blob_sim, bg_sim));

    Mask gt = Mask::Constant(p.rows, p.cols, false);
    for (Eigen::Index r = obj.top; r < obj.top + obj.height; ++r)
      for (Eigen::Index c = obj.left; c < obj.left + obj.width; ++c) gt(r, c) = true;
    s.gt.push_back(std::move(gt));
  }

  for (int f = 0; f + 1 < p.frames; ++f) {
    const Rect obj = object_rect(p, f);
    FlowField flow{PlaneXd::Zero(p.rows, p.cols), PlaneXd::Zero(p.rows, p.cols)};
    for (Eigen::Index r = obj.top; r < obj.top + obj.height; ++r)
      for (Eigen::Index c = obj.left; c < obj.left + obj.width; ++c) {
        flow.u(r, c) = static_cast<double>(p.step_col);
        flow.v(r, c) = static_cast<double>(p.step_row);
      }
    b.flows.push_back(std::move(flow));
  }

  // gallery: unit vectors jittered within each category's own block
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int c = 0; c < p.channels; ++c) {
    s.gallery.categories.push_back("cat" + std::to_string(c));
    Eigen::MatrixXd vecs(p.gallery_per_cat, p.sim_dims());
    for (int j = 0; j < p.gallery_per_cat; ++j) {
      VecXd v = category_direction(p, c);
      for (int d = 0; d < p.sim_block; ++d)
        v[c * p.sim_block + d] += p.gallery_jitter * uni(rng);
      vecs.row(j) = l2_normalized(v).transpose();
    }
    s.gallery.vectors.push_back(std::move(vecs));
  }
  return s;
}

void write_scenario(const Scenario& s, const std::filesystem::path& dir) {
  const auto bundle_dir = dir / "bundle";
  save_bundle(s.bundle, bundle_dir);
  for (std::size_t f = 0; f < s.gt.size(); ++f)
    save_pgm_mask(s.gt[f], bundle_dir / frame_name("gt_", static_cast<int>(f), ".pgm"));
  save_gallery(s.gallery, dir / "gallery");
}

double iou(const Mask& a, const Mask& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("iou: shape mismatch");
  const auto inter = (a && b).count();
  const auto uni = (a || b).count();
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

VideoReport video_report(const std::filesystem::path& pred_dir,
                         const std::filesystem::path& gt_dir) {
  auto list_pgms = [](const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    if (!std::filesystem::is_directory(dir)) throw FormatError("eval: not a directory: " + dir.string());
    for (const auto& entry : std::filesystem::directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".pgm")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
  };
  const auto pred = list_pgms(pred_dir);
  const auto gt = list_pgms(gt_dir);
  if (pred.size() != gt.size() || pred.empty())
    throw std::invalid_argument("eval: frame count mismatch between pred and gt");

  VideoReport report;
  double acc = 0.0;
  for (std::size_t f = 0; f < pred.size(); ++f) {
    const double v = iou(load_pgm_mask(pred[f]), load_pgm_mask(gt[f]));
    report.per_frame.push_back(v);
    acc += v;
  }
  report.mean = acc / static_cast<double>(pred.size());
  return report;
}

std::string format_report(const VideoReport& report) {
  std::ostringstream out;
  char buf[64];
  for (std::size_t f = 0; f < report.per_frame.size(); ++f) {
    std::snprintf(buf, sizeof(buf), "%04zu %.6f\n", f, report.per_frame[f]);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "mean %.6f\n", report.mean);
  out << buf;
  return out.str();
}

}  // namespace uvos
