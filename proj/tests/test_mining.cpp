#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "uvos/mining.hpp"

using namespace uvos;

namespace {

// Proposal set with only the fields mining reads: features and scores.
ProposalSet stub_proposals(const std::vector<VecXd>& features,
                           const std::vector<double>& phi_o,
                           const std::vector<double>& phi_m) {
  ProposalSet p;
  p.frame_count = 1;
  p.rows = p.cols = 4;
  for (std::size_t i = 0; i < features.size(); ++i) {
    Segment s;
    s.id = static_cast<int>(i);
    s.feat_mine = features[i];
    s.feat_sim = features[i];
    s.objectness = phi_o[i];
    s.motion = phi_m[i];
    s.pixels = PixelRuns::from_sorted_indices({static_cast<Eigen::Index>(i)});
    p.segments.push_back(std::move(s));
  }
  return p;
}

ProposalSet random_instance(std::mt19937& rng, int n, int dims, bool nonneg,
                            SimilarityMatrix* W_out) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::uniform_real_distribution<double> d01(0.0, 1.0);
  std::vector<VecXd> features;
  std::vector<double> phi_o, phi_m;
  for (int i = 0; i < n; ++i) {
    VecXd v(dims);
    for (int k = 0; k < dims; ++k) v[k] = nonneg ? d01(rng) : d(rng);
    features.push_back(l2_normalized(v));
    phi_o.push_back(d01(rng));
    phi_m.push_back(d01(rng));
  }
  ProposalSet p = stub_proposals(features, phi_o, phi_m);
  if (W_out) *W_out = similarity_matrix(p);
  return p;
}

// Definition-level recomputation used as the oracle everywhere below.
double oracle_facility(const std::vector<int>& A, const SimilarityMatrix& W, double alpha,
                       FacilityVariant variant) {
  if (A.empty()) return 0.0;
  double h = 0.0;
  if (variant == FacilityVariant::Sum) {
    for (int i : A)
      for (Eigen::Index j = 0; j < W.cols(); ++j) h += W(i, j);
  } else {
    for (Eigen::Index j = 0; j < W.cols(); ++j) {
      double best = -std::numeric_limits<double>::infinity();
      for (int i : A) best = std::max(best, W(i, j));
      h += best;
    }
  }
  return h - static_cast<double>(A.size()) * alpha;
}

double oracle_unary(const std::vector<int>& A, const ProposalSet& p, double lo, double lm) {
  double so = 0.0, sm = 0.0;
  for (int i : A) {
    so += p.segments[i].objectness;
    sm += p.segments[i].motion;
  }
  return lo * so + lm * sm;
}

double oracle_energy(const std::vector<int>& A, const SimilarityMatrix& W, const ProposalSet& p,
                     const MiningConfig& cfg) {
  return oracle_facility(A, W, cfg.alpha, cfg.variant) +
         oracle_unary(A, p, cfg.lambda_o, cfg.lambda_m);
}

// Independent greedy: recomputes E_s from scratch for every candidate and
// applies the same stopping rules.
Selection oracle_greedy(const ProposalSet& p, const SimilarityMatrix& W,
                        const MiningConfig& cfg) {
  Selection sel;
  const int n = p.size();
  const int cap = static_cast<int>(std::ceil(cfg.na_frac * n));
  std::vector<char> used(n, 0);
  while (true) {
    if (static_cast<int>(sel.ids.size()) >= cap) {
      sel.stop = StopReason::CapReached;
      break;
    }
    int best = -1;
    double best_gain = 0.0;
    const double base = oracle_energy(sel.ids, W, p, cfg);
    for (int a = 0; a < n; ++a) {
      if (used[a]) continue;
      std::vector<int> trial = sel.ids;
      trial.push_back(a);
      const double gain = oracle_energy(trial, W, p, cfg) - base;
      if (best < 0 || gain > best_gain) {
        best = a;
        best_gain = gain;
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
    used[best] = 1;
  }
  sel.energy = oracle_energy(sel.ids, W, p, cfg);
  return sel;
}

}  // namespace

TEST_CASE("similarity_matrix: orthogonal unit features give the identity") {
  std::vector<VecXd> f;
  for (int i = 0; i < 4; ++i) {
    VecXd v = VecXd::Zero(4);
    v[i] = 1.0;
    f.push_back(v);
  }
  const ProposalSet p = stub_proposals(f, {0, 0, 0, 0}, {0, 0, 0, 0});
  const SimilarityMatrix W = similarity_matrix(p);
  CHECK(W.isApprox(Eigen::MatrixXd::Identity(4, 4), 0.0));
}

TEST_CASE("similarity_matrix: identical features give all ones") {
  VecXd v(3);
  v << 1, 0, 0;
  const ProposalSet p = stub_proposals({v, v, v}, {0, 0, 0}, {0, 0, 0});
  const SimilarityMatrix W = similarity_matrix(p);
  CHECK(W.isApprox(Eigen::MatrixXd::Ones(3, 3), 0.0));
}

TEST_CASE("similarity_matrix: matches a double-loop oracle") {
  std::mt19937 rng(3);
  SimilarityMatrix W;
  const ProposalSet p = random_instance(rng, 7, 5, false, &W);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) {
      double dot = 0.0;
      for (int k = 0; k < 5; ++k) dot += p.segments[i].feat_mine[k] * p.segments[j].feat_mine[k];
      CHECK(std::abs(W(i, j) - dot) < 1e-12);
      CHECK(std::abs(W(i, j) - W(j, i)) < 1e-15);
      CHECK(W(i, j) >= -1.0 - 1e-12);
      CHECK(W(i, j) <= 1.0 + 1e-12);
    }
}

TEST_CASE("facility_term: empty selection is 0 by convention") {
  const SimilarityMatrix W = Eigen::MatrixXd::Identity(3, 3);
  CHECK(facility_term({}, W, 1.0, FacilityVariant::Max) == 0.0);
  CHECK(facility_term({}, W, 1.0, FacilityVariant::Sum) == 0.0);
}

TEST_CASE("facility_term: two-vertex hand evaluation") {
  const SimilarityMatrix W = Eigen::MatrixXd::Identity(2, 2);
  CHECK(facility_term({0}, W, 1.0, FacilityVariant::Max) == 0.0);  // (1 + 0) - 1
}

TEST_CASE("facility_term: both variants match the exhaustive definition oracle") {
  std::mt19937 rng(9);
  std::uniform_int_distribution<int> n_d(1, 8);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = n_d(rng);
    SimilarityMatrix W;
    random_instance(rng, n, 4, false, &W);
    std::uniform_int_distribution<int> size_d(0, n);
    std::vector<int> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(size_d(rng));
    std::sort(ids.begin(), ids.end());
    for (auto variant : {FacilityVariant::Max, FacilityVariant::Sum})
      CHECK(std::abs(facility_term(ids, W, 1.0, variant) -
                     oracle_facility(ids, W, 1.0, variant)) < 1e-10);
  }
}

TEST_CASE("facility_term: out-of-range id is an error") {
  const SimilarityMatrix W = Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(facility_term({5}, W, 1.0, FacilityVariant::Max), std::invalid_argument);
}

TEST_CASE("unary_term: direct substitution") {
  VecXd v(2);
  v << 1, 0;
  const ProposalSet p = stub_proposals({v}, {0.5}, {0.2});
  CHECK(unary_term({}, p, 20.0, 35.0) == 0.0);
  CHECK(unary_term({0}, p, 20.0, 35.0) == 17.0);  // 20*0.5 + 35*0.2
}

TEST_CASE("unary_term and energy: match the definition oracle") {
  std::mt19937 rng(15);
  SimilarityMatrix W;
  const ProposalSet p = random_instance(rng, 6, 4, false, &W);
  MiningConfig cfg;
  std::vector<int> ids = {0, 2, 5};
  CHECK(unary_term(ids, p, cfg.lambda_o, cfg.lambda_m) ==
        oracle_unary(ids, p, cfg.lambda_o, cfg.lambda_m));
  CHECK(std::abs(mining_energy(ids, W, p, cfg) - oracle_energy(ids, W, p, cfg)) < 1e-10);
}

TEST_CASE("greedy_select: empty proposal set yields an empty selection") {
  const Selection sel = greedy_select(ProposalSet{}, SimilarityMatrix(), MiningConfig{});
  CHECK(sel.ids.empty());
  CHECK(sel.energy == 0.0);
}

TEST_CASE("greedy_select: picks the similar high-score pair, not the outlier") {
  VecXd a(3), b(3);
  a << 1, 0, 0;
  b << 0, 1, 0;
  const ProposalSet p = stub_proposals({a, a, b}, {0.9, 0.9, 0.05}, {0.9, 0.9, 0.05});
  const SimilarityMatrix W = similarity_matrix(p);
  const MiningConfig cfg;  // defaults
  const Selection sel = greedy_select(p, W, cfg);

  CHECK(sel.ids == std::vector<int>{0, 1});
  CHECK(sel.stop == StopReason::GainRatio);
  CHECK(sel.gains[0] == doctest::Approx(50.5).epsilon(1e-12));
  CHECK(sel.gains[1] == doctest::Approx(48.5).epsilon(1e-12));
  CHECK(sel.energy == doctest::Approx(99.0).epsilon(1e-12));

  // exhaustive evaluation over all 8 subsets confirms the greedy trajectory:
  // each pick is the stepwise argmax and {0,1} is the best 2-subset
  double best_pair = -1e300;
  std::vector<int> best_pair_ids;
  for (int mask = 0; mask < 8; ++mask) {
    std::vector<int> ids;
    for (int i = 0; i < 3; ++i)
      if (mask & (1 << i)) ids.push_back(i);
    if (ids.size() == 2 && oracle_energy(ids, W, p, cfg) > best_pair) {
      best_pair = oracle_energy(ids, W, p, cfg);
      best_pair_ids = ids;
    }
  }
  CHECK(best_pair_ids == std::vector<int>{0, 1});
  // extending with the outlier has sub-beta gain, so greedy stops at {0,1}
  const double outlier_gain =
      oracle_energy({0, 1, 2}, W, p, cfg) - oracle_energy({0, 1}, W, p, cfg);
  CHECK(outlier_gain < cfg.beta * sel.gains.back());
  const Selection want = oracle_greedy(p, W, cfg);
  CHECK(want.ids == sel.ids);
  CHECK(want.stop == sel.stop);
}

TEST_CASE("greedy_select: every step matches the brute-force oracle") {
  std::mt19937 rng(55);
  std::uniform_int_distribution<int> n_d(1, 12);
  std::bernoulli_distribution dup(0.3);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = n_d(rng);
    SimilarityMatrix W;
    ProposalSet p = random_instance(rng, n, 5, true, &W);
    if (n >= 2 && dup(rng)) {
      // force exact ties to exercise lowest-id tie-breaking
      p.segments[n - 1].feat_mine = p.segments[0].feat_mine;
      p.segments[n - 1].objectness = p.segments[0].objectness;
      p.segments[n - 1].motion = p.segments[0].motion;
      W = similarity_matrix(p);
    }
    MiningConfig cfg;
    if (trial % 2 == 0) cfg.variant = FacilityVariant::Sum;

    const Selection got = greedy_select(p, W, cfg);
    const Selection want = oracle_greedy(p, W, cfg);
    CHECK(got.ids == want.ids);
    CHECK(got.stop == want.stop);
    REQUIRE(got.gains.size() == want.gains.size());
    for (std::size_t i = 0; i < got.gains.size(); ++i)
      CHECK(std::abs(got.gains[i] - want.gains[i]) < 1e-9);
    CHECK(std::abs(got.energy - want.energy) < 1e-9);
    CHECK(static_cast<double>(got.ids.size()) <= std::ceil(cfg.na_frac * n));
  }
}

TEST_CASE("mining energy is submodular for nonnegative W (max variant)") {
  std::mt19937 rng(77);
  std::uniform_int_distribution<int> n_d(2, 8);
  MiningConfig cfg;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = n_d(rng);
    SimilarityMatrix W;
    const ProposalSet p = random_instance(rng, n, 4, true, &W);

    std::vector<int> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), rng);
    const int a = ids[0];
    std::uniform_int_distribution<int> bigger_d(0, n - 1);
    const int big = bigger_d(rng);
    std::vector<int> superset(ids.begin() + 1, ids.begin() + 1 + big);
    std::uniform_int_distribution<int> smaller_d(0, big);
    std::vector<int> subset(superset.begin(), superset.begin() + smaller_d(rng));

    const double gain_small = marginal_gain(a, subset, W, p, cfg);
    const double gain_big = marginal_gain(a, superset, W, p, cfg);
    CHECK(gain_small >= gain_big - 1e-9);
  }
}

TEST_CASE("greedy marginal gains are non-increasing for nonnegative W") {
  std::mt19937 rng(79);
  MiningConfig cfg;
  cfg.na_frac = 1.0;
  cfg.beta = 1e-12;  // observe the full trajectory
  for (int trial = 0; trial < 20; ++trial) {
    SimilarityMatrix W;
    const ProposalSet p = random_instance(rng, 8, 4, true, &W);
    const Selection sel = greedy_select(p, W, cfg);
    for (std::size_t i = 1; i < sel.gains.size(); ++i)
      CHECK(sel.gains[i] <= sel.gains[i - 1] + 1e-9);
  }
}

TEST_CASE("sum variant is modular: the gain never depends on the selection") {
  std::mt19937 rng(81);
  MiningConfig cfg;
  cfg.variant = FacilityVariant::Sum;
  SimilarityMatrix W;
  const ProposalSet p = random_instance(rng, 7, 4, false, &W);
  for (int a = 0; a < 7; ++a) {
    const double alone = marginal_gain(a, {}, W, p, cfg);
    CHECK(marginal_gain(a, {1, 3}, W, p, cfg) == alone);
    CHECK(marginal_gain(a, {0, 2, 4, 5}, W, p, cfg) == alone);
  }
}

TEST_CASE("greedy_select: a nonpositive best gain stops before any harmful pick") {
  std::mt19937 rng(91);
  SimilarityMatrix W;
  ProposalSet p = random_instance(rng, 5, 4, true, &W);
  for (Segment& s : p.segments) {
    s.objectness = 0.0;
    s.motion = 0.0;
  }
  MiningConfig cfg;
  cfg.alpha = 100.0;  // opening any facility costs more than it covers
  const Selection sel = greedy_select(p, W, cfg);
  CHECK(sel.ids.empty());
  CHECK(sel.stop == StopReason::NonPositiveGain);
  CHECK(sel.energy == 0.0);
}

TEST_CASE("greedy_select: deterministic across runs") {
  std::mt19937 rng(83);
  SimilarityMatrix W;
  const ProposalSet p = random_instance(rng, 10, 5, true, &W);
  const Selection s1 = greedy_select(p, W, MiningConfig{});
  const Selection s2 = greedy_select(p, W, MiningConfig{});
  CHECK(s1.ids == s2.ids);
  CHECK(s1.gains == s2.gains);
  CHECK(s1.energy == s2.energy);
}

TEST_CASE("greedy_select: invariant to power-of-two rescaling of scores and weights") {
  std::mt19937 rng(87);
  SimilarityMatrix W;
  ProposalSet p = random_instance(rng, 9, 4, true, &W);
  for (Segment& s : p.segments) {
    s.objectness *= 0.25;  // keep the scaled version within [0, 1]
    s.motion *= 0.25;
  }
  MiningConfig cfg;
  const Selection base = greedy_select(p, W, cfg);

  ProposalSet scaled = p;
  for (Segment& s : scaled.segments) {
    s.objectness *= 4.0;
    s.motion *= 4.0;
  }
  MiningConfig cfg2 = cfg;
  cfg2.lambda_o = cfg.lambda_o / 4.0;
  cfg2.lambda_m = cfg.lambda_m / 4.0;
  const Selection rescaled = greedy_select(scaled, W, cfg2);
  CHECK(rescaled.ids == base.ids);
  CHECK(rescaled.gains == base.gains);
}

TEST_CASE("selection serialization: header plus one line per pick") {
  Selection sel;
  sel.ids = {4, 1};
  sel.gains = {50.5, 48.5};
  sel.energy = 99.0;
  std::ostringstream out;
  write_selection(sel, out);
  CHECK(out.str() == "Es 99\n1 4 50.5\n2 1 48.5\n");
}
