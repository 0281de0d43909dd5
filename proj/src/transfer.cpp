#include "uvos/transfer.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "uvos/io.hpp"

namespace uvos {

TransferWeights TransferWeights::make(int categories, bool affine) {
  TransferWeights t;
  t.w = VecXd::Zero(categories);
  t.affine_enabled = affine;
  t.a = VecXd::Ones(categories);
  t.b = VecXd::Zero(categories);
  return t;
}

TransferWeights init_weights(const std::vector<VecXd>& target_frames, const SourceGallery& g) {
  if (target_frames.empty()) throw std::invalid_argument("init_weights: no target frames");
  const int C = g.category_count();
  if (C < 1 || static_cast<int>(g.vectors.size()) != C)
    throw std::invalid_argument("init_weights: bad gallery");
  const Eigen::Index d = target_frames[0].size();
  TransferWeights theta = TransferWeights::make(C);
  for (int c = 0; c < C; ++c) {
    const Eigen::MatrixXd& vecs = g.vectors[c];
    if (vecs.rows() == 0) throw std::invalid_argument("init_weights: empty gallery category");
    if (vecs.cols() != d) throw std::invalid_argument("init_weights: dimension mismatch");
    double acc = 0.0;
    for (const VecXd& frame : target_frames) {
      if (frame.size() != d) throw std::invalid_argument("init_weights: dimension mismatch");
      acc += (vecs * frame).maxCoeff();
    }
    theta.w[c] = acc / static_cast<double>(target_frames.size());
  }
  return theta;
}

TransferWeights one_hot_weights(int category, int category_count) {
  if (category < 0 || category >= category_count)
    throw std::invalid_argument("one_hot_weights: category index out of range");
  TransferWeights theta = TransferWeights::make(category_count);
  theta.w[category] = 1.0;
  return theta;
}

ForwardResult forward(const Tensor& response_stack, const TransferWeights& theta) {
  if (response_stack.rank() != 3)
    throw std::invalid_argument("forward: response stack must be rank 3");
  const int C = theta.category_count();
  if (response_stack.channels() != C)
    throw std::invalid_argument("forward: channel count mismatch");
  ForwardResult out;
  out.response = PlaneXd::Zero(response_stack.rows(), response_stack.cols());
  for (int c = 0; c < C; ++c)
    out.response += theta.w[c] * (theta.a[c] * response_stack.channel(c) + theta.b[c]);
  out.prob = sigmoid(out.response);
  return out;
}

double bce_loss(const PlaneXd& prob, const Mask& y, double eps) {
  if (prob.rows() != y.rows() || prob.cols() != y.cols())
    throw std::invalid_argument("bce_loss: shape mismatch");
  const PlaneXd p = prob.min(1.0 - eps).max(eps);
  const PlaneXd yd = y.cast<double>();
  return -(yd * p.log() + (1.0 - yd) * (1.0 - p).log()).mean();
}

namespace {

struct BatchEval {
  double loss = 0.0;
  Gradients grads;
};

BatchEval evaluate(std::span<const Tensor> stacks, const TransferWeights& theta,
                   std::span<const Mask> labels, double eps) {
  if (stacks.empty()) throw std::invalid_argument("transfer: no labeled frames");
  if (stacks.size() != labels.size())
    throw std::invalid_argument("transfer: frames/labels count mismatch");
  const int C = theta.category_count();
  BatchEval ev;
  ev.grads.dw = VecXd::Zero(C);
  ev.grads.da = VecXd::Zero(C);
  ev.grads.db = VecXd::Zero(C);

  double loss_sum = 0.0;
  Eigen::Index total_pixels = 0;
  for (std::size_t f = 0; f < stacks.size(); ++f) {
    const Tensor& R = stacks[f];
    const Mask& y = labels[f];
    const ForwardResult fw = forward(R, theta);
    if (y.rows() != fw.prob.rows() || y.cols() != fw.prob.cols())
      throw std::invalid_argument("transfer: label shape mismatch");

    const PlaneXd p = fw.prob.min(1.0 - eps).max(eps);
    const PlaneXd yd = y.cast<double>();
    loss_sum += -(yd * p.log() + (1.0 - yd) * (1.0 - p).log()).sum();
    total_pixels += y.size();

    // error signal; clipped pixels sit on the flat part of the clip
    const PlaneXd active =
        ((fw.prob >= eps) && (fw.prob <= 1.0 - eps)).cast<double>();
    const PlaneXd e = (fw.prob - yd) * active;
    const double e_sum = e.sum();
    for (int c = 0; c < C; ++c) {
      const auto rc = R.channel(c);
      const double er_sum = (e * rc).sum();
      ev.grads.dw[c] += er_sum * theta.a[c] + e_sum * theta.b[c];
      ev.grads.da[c] += theta.w[c] * er_sum;
      ev.grads.db[c] += theta.w[c] * e_sum;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(total_pixels);
  ev.loss = loss_sum * inv_n;
  ev.grads.dw *= inv_n;
  ev.grads.da *= inv_n;
  ev.grads.db *= inv_n;
  return ev;
}

}  // namespace

Gradients loss_gradients(std::span<const Tensor> response_stacks, const TransferWeights& theta,
                         std::span<const Mask> labels, double eps) {
  return evaluate(response_stacks, theta, labels, eps).grads;
}

double batch_loss(std::span<const Tensor> response_stacks, const TransferWeights& theta,
                  std::span<const Mask> labels, double eps) {
  return evaluate(response_stacks, theta, labels, eps).loss;
}

TrainResult train_transfer(std::span<const Tensor> response_stacks, std::span<const Mask> labels,
                           const TransferWeights& init, const TrainConfig& cfg) {
  if (cfg.learning_rate < 0.0) throw std::invalid_argument("train: learning_rate must be >= 0");
  if (cfg.momentum < 0.0 || cfg.momentum >= 1.0)
    throw std::invalid_argument("train: momentum must be in [0, 1)");
  if (cfg.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  TrainResult result;
  result.weights = init;
  TransferWeights& theta = result.weights;
  VecXd vw = VecXd::Zero(theta.category_count());
  VecXd va = VecXd::Zero(theta.category_count());
  VecXd vb = VecXd::Zero(theta.category_count());

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const BatchEval ev = evaluate(response_stacks, theta, labels, cfg.prob_clip_eps);
    if (!std::isfinite(ev.loss)) throw NumericError("train: loss became non-finite");
    result.loss_trace.push_back(ev.loss);
    vw = cfg.momentum * vw - cfg.learning_rate * ev.grads.dw;
    theta.w += vw;
    if (theta.affine_enabled) {
      va = cfg.momentum * va - cfg.learning_rate * ev.grads.da;
      vb = cfg.momentum * vb - cfg.learning_rate * ev.grads.db;
      theta.a += va;
      theta.b += vb;
    }
    if (!theta.w.allFinite() || !theta.a.allFinite() || !theta.b.allFinite())
      throw NumericError("train: parameters became non-finite");
  }
  return result;
}

VecXd pooled_frame_vector(const Tensor& feat_sim_stack, const Mask* region) {
  if (feat_sim_stack.rank() != 3)
    throw std::invalid_argument("pooled_frame_vector: stack must be rank 3");
  const Eigen::Index C = feat_sim_stack.channels();
  VecXd mean = VecXd::Zero(C);
  if (region && region->any()) {
    const double n = static_cast<double>(region->count());
    const PlaneXd sel = region->cast<double>();
    for (Eigen::Index c = 0; c < C; ++c)
      mean[c] = (feat_sim_stack.channel(c) * sel).sum() / n;
  } else {
    for (Eigen::Index c = 0; c < C; ++c) mean[c] = feat_sim_stack.channel(c).mean();
  }
  return l2_normalized(mean);
}

void save_weights(const TransferWeights& theta, const std::filesystem::path& file) {
  save_tensor(Tensor::from_vec(theta.w), file);
  if (theta.affine_enabled) {
    PlaneXd ab(2, theta.category_count());
    ab.row(0) = theta.a.transpose().array();
    ab.row(1) = theta.b.transpose().array();
    std::filesystem::path companion = file;
    companion.replace_filename(file.stem().string() + "_affine" + file.extension().string());
    save_tensor(Tensor::from_plane(ab), companion);
  }
}

TransferWeights load_weights(const std::filesystem::path& file) {
  const Tensor t = load_tensor(file);
  if (t.rank() != 1) throw FormatError("weights: expected rank-1 tensor");
  TransferWeights theta = TransferWeights::make(static_cast<int>(t.size()));
  theta.w = t.flat().matrix();
  std::filesystem::path companion = file;
  companion.replace_filename(file.stem().string() + "_affine" + file.extension().string());
  if (std::filesystem::exists(companion)) {
    const Tensor ab = load_tensor(companion);
    if (ab.rank() != 2 || ab.dims()[0] != 2 || ab.dims()[1] != t.size())
      throw FormatError("weights: bad affine companion shape");
    theta.affine_enabled = true;
    theta.a = ab.plane().row(0).transpose().matrix();
    theta.b = ab.plane().row(1).transpose().matrix();
  }
  return theta;
}

void save_gallery(const SourceGallery& g, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream names(dir / "categories.txt");
  if (!names) throw FormatError("gallery: cannot write categories.txt");
  for (const std::string& name : g.categories) names << name << "\n";
  names.close();
  for (int c = 0; c < g.category_count(); ++c) {
    PlaneXd rows = g.vectors[c].array();
    save_tensor(Tensor::from_plane(rows), dir / ("cat_" + std::to_string(c) + ".sgt"));
  }
}

SourceGallery load_gallery(const std::filesystem::path& dir) {
  std::ifstream names(dir / "categories.txt");
  if (!names) throw FormatError("gallery: cannot open categories.txt");
  SourceGallery g;
  std::string line;
  while (std::getline(names, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) g.categories.push_back(line);
  }
  if (g.categories.empty()) throw FormatError("gallery: no categories");
  for (int c = 0; c < g.category_count(); ++c) {
    const Tensor t = load_tensor(dir / ("cat_" + std::to_string(c) + ".sgt"));
    if (t.rank() != 2) throw FormatError("gallery: cat_" + std::to_string(c) + " must be rank 2");
    Eigen::MatrixXd rows = t.plane().matrix();
    for (Eigen::Index j = 0; j < rows.rows(); ++j) {
      const double n = rows.row(j).norm();
      if (n > 0.0) rows.row(j) /= n;
    }
    g.vectors.push_back(std::move(rows));
  }
  return g;
}

}  // namespace uvos
