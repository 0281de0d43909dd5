#include "uvos/mining.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace uvos {

SimilarityMatrix similarity_matrix(const ProposalSet& p) {
  const int n = p.size();
  if (n == 0) throw std::invalid_argument("similarity_matrix: empty proposal set");
  const Eigen::Index d = p.segments[0].feat_mine.size();
  Eigen::MatrixXd features(n, d);
  for (int i = 0; i < n; ++i) {
    if (p.segments[i].feat_mine.size() != d)
      throw std::invalid_argument("similarity_matrix: feature dimension mismatch");
    features.row(i) = p.segments[i].feat_mine.transpose();
  }
  return features * features.transpose();
}

namespace {

void check_ids(const std::vector<int>& selected, Eigen::Index n, const char* who) {
  for (int id : selected)
    if (id < 0 || id >= n) throw std::invalid_argument(std::string(who) + ": id out of range");
}

}  // namespace

double facility_term(const std::vector<int>& selected, const SimilarityMatrix& W,
                     double alpha, FacilityVariant variant) {
  check_ids(selected, W.rows(), "facility_term");
  if (selected.empty()) return 0.0;
  const double open_cost = static_cast<double>(selected.size()) * alpha;
  if (variant == FacilityVariant::Sum) {
    double total = 0.0;
    for (int i : selected) total += W.row(i).sum();
    return total - open_cost;
  }
  VecXd covered = VecXd::Constant(W.cols(), -std::numeric_limits<double>::infinity());
  for (int i : selected) covered = covered.cwiseMax(W.row(i).transpose());
  return covered.sum() - open_cost;
}

double unary_term(const std::vector<int>& selected, const ProposalSet& p,
                  double lambda_o, double lambda_m) {
  check_ids(selected, p.size(), "unary_term");
  double sum_o = 0.0, sum_m = 0.0;
  for (int i : selected) {
    sum_o += p.segments[i].objectness;
    sum_m += p.segments[i].motion;
  }
  return lambda_o * sum_o + lambda_m * sum_m;
}

double mining_energy(const std::vector<int>& selected, const SimilarityMatrix& W,
                     const ProposalSet& p, const MiningConfig& cfg) {
  return facility_term(selected, W, cfg.alpha, cfg.variant) +
         unary_term(selected, p, cfg.lambda_o, cfg.lambda_m);
}

double marginal_gain(int candidate, bool selection_empty, const VecXd& covered,
                     const VecXd& unary, const SimilarityMatrix& W,
                     const MiningConfig& cfg) {
  double facility;
  if (cfg.variant == FacilityVariant::Sum || selection_empty) {
    facility = W.row(candidate).sum();
  } else {
    facility = (W.row(candidate).transpose() - covered).cwiseMax(0.0).sum();
  }
  return facility - cfg.alpha + unary[candidate];
}

double marginal_gain(int candidate, const std::vector<int>& selected,
                     const SimilarityMatrix& W, const ProposalSet& p,
                     const MiningConfig& cfg) {
  check_ids(selected, W.rows(), "marginal_gain");
  if (candidate < 0 || candidate >= W.rows())
    throw std::invalid_argument("marginal_gain: candidate out of range");
  VecXd covered = VecXd::Constant(W.cols(), -std::numeric_limits<double>::infinity());
  for (int i : selected) covered = covered.cwiseMax(W.row(i).transpose());
  VecXd unary(p.size());
  for (int i = 0; i < p.size(); ++i)
    unary[i] = cfg.lambda_o * p.segments[i].objectness + cfg.lambda_m * p.segments[i].motion;
  return marginal_gain(candidate, selected.empty(), covered, unary, W, cfg);
}

Selection greedy_select(const ProposalSet& p, const SimilarityMatrix& W,
                        const MiningConfig& cfg) {
  const int n = p.size();
  Selection sel;
  if (n == 0) return sel;
  if (W.rows() != n || W.cols() != n)
    throw std::invalid_argument("greedy_select: similarity matrix shape mismatch");

  const int cap = static_cast<int>(std::ceil(cfg.na_frac * static_cast<double>(n)));
  VecXd unary(n);
  for (int i = 0; i < n; ++i)
    unary[i] = cfg.lambda_o * p.segments[i].objectness + cfg.lambda_m * p.segments[i].motion;
  VecXd covered = VecXd::Constant(n, -std::numeric_limits<double>::infinity());
  std::vector<char> in_selection(n, 0);

  while (true) {
    if (static_cast<int>(sel.ids.size()) >= cap) {
      sel.stop = StopReason::CapReached;
      break;
    }
    int best = -1;
    double best_gain = 0.0;
    for (int a = 0; a < n; ++a) {
      if (in_selection[a]) continue;
      const double g = marginal_gain(a, sel.ids.empty(), covered, unary, W, cfg);
      if (best < 0 || g > best_gain) {
        best = a;
        best_gain = g;
      }
    }
    if (best < 0) {
      sel.stop = StopReason::Exhausted;
      break;
    }
    if (best_gain <= 0.0) {
      sel.stop = StopReason::NonPositiveGain;
      break;
    }
    if (!sel.gains.empty() && best_gain < cfg.beta * sel.gains.back()) {
      sel.stop = StopReason::GainRatio;
      break;
    }
    sel.ids.push_back(best);
    sel.gains.push_back(best_gain);
    in_selection[best] = 1;
    covered = covered.cwiseMax(W.row(best).transpose());
  }
  sel.energy = mining_energy(sel.ids, W, p, cfg);
  return sel;
}

void write_selection(const Selection& s, std::ostream& out) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", s.energy);
  out << "Es " << buf << "\n";
  for (std::size_t i = 0; i < s.ids.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", s.gains[i]);
    out << (i + 1) << " " << s.ids[i] << " " << buf << "\n";
  }
}

}  // namespace uvos
