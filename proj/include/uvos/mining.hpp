#pragma once

#include <iosfwd>
#include <vector>

#include "uvos/proposals.hpp"

namespace uvos {

// Segment mining: pick the subset A of proposals that maximizes
//   E_s(A) = H(A) + U(A)
// where H is a facility-location term over pairwise feature similarities and
// U is a unary term rewarding per-segment objectness and motion scores.

// W(i, j) = <feat_mine_i, feat_mine_j>; symmetric, entries in [-1, 1] for
// unit-norm features.
using SimilarityMatrix = Eigen::MatrixXd;

SimilarityMatrix similarity_matrix(const ProposalSet& p);

// Max is the classic facility-location form and is submodular; Sum opens
// every facility against every vertex and is modular. Both are kept so the
// choice stays observable.
enum class FacilityVariant { Max, Sum };

struct MiningConfig {
  double alpha = 1.0;      // cost to open a facility
  double lambda_o = 20.0;  // objectness weight
  double lambda_m = 35.0;  // motion weight
  double na_frac = 0.8;    // selection cap as a fraction of |P|
  double beta = 0.8;       // minimum allowed gain ratio between rounds
  FacilityVariant variant = FacilityVariant::Max;
};

// variant=Max: H(A) = sum_j max_{i in A} W(i,j) - |A| * alpha, H(empty) = 0.
// variant=Sum: H(A) = sum_{i in A} sum_j W(i,j)  - |A| * alpha.
double facility_term(const std::vector<int>& selected, const SimilarityMatrix& W,
                     double alpha, FacilityVariant variant);

// U(A) = lambda_o * sum Phi_o + lambda_m * sum Phi_m
double unary_term(const std::vector<int>& selected, const ProposalSet& p,
                  double lambda_o, double lambda_m);

double mining_energy(const std::vector<int>& selected, const SimilarityMatrix& W,
                     const ProposalSet& p, const MiningConfig& cfg);

// Marginal gain of adding candidate a to the selection. `covered` is the
// per-vertex running max over the selected rows (only read for Max when the
// selection is nonempty); `unary` is the precomputed per-segment unary score.
double marginal_gain(int candidate, bool selection_empty, const VecXd& covered,
                     const VecXd& unary, const SimilarityMatrix& W,
                     const MiningConfig& cfg);

// Convenience overload that derives covered/unary from the selection.
double marginal_gain(int candidate, const std::vector<int>& selected,
                     const SimilarityMatrix& W, const ProposalSet& p,
                     const MiningConfig& cfg);

enum class StopReason { Exhausted, CapReached, GainRatio, NonPositiveGain };

struct Selection {
  std::vector<int> ids;       // chosen segment ids, in selection order
  std::vector<double> gains;  // marginal gain D(A^i) per committed step
  double energy = 0.0;        // E_s of the final selection
  StopReason stop = StopReason::Exhausted;
};

// Greedy maximization of E_s with deterministic lowest-id tie-breaking.
// Stops when the selection would exceed ceil(na_frac * |P|), when the gain
// ratio D(A^i)/D(A^{i-1}) falls below beta (i >= 2), or when the best
// marginal gain is nonpositive.
Selection greedy_select(const ProposalSet& p, const SimilarityMatrix& W,
                        const MiningConfig& cfg);

// Text form: header "Es <final energy>", then one "step id gain" line per
// chosen segment.
void write_selection(const Selection& s, std::ostream& out);

}  // namespace uvos
