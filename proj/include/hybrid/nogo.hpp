#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hybrid/channel.hpp"
#include "hybrid/sectors.hpp"

namespace hybrid {

/// Conditional POVM family: F[y][x] is the effect whose expectation on the
/// quantum input gives the probability of classical output y for classical
/// input x.
struct EffectiveObservables {
  int n = 0;
  int d = 0;
  std::vector<std::vector<Mat>> F;  // F[x][y], Hermitian d x d

  const Mat& at(int y, int x) const { return F[x][y]; }
};

/// Assemble F_{y|x}[a,b] = <y| Tr_S R(|x><x| (x) |b><a|) |y> by linearity.
/// When require_cq is set, a non-CQ-preserving channel is a structure error.
EffectiveObservables effective_observables(const Channel& R, int classical_factor = 0,
                                           bool require_cq = true);

/// Certified signalling upper bound: max_x (1/2) sum_y (lmax - lmin) of
/// F_{y|x}. Zero iff every effect is proportional to the identity.
double signalling_bound(const EffectiveObservables& F);

/// The proof's composite E_s = Tr_G . (R^-1 (x) I_C) . (m (x) I_S) . R . (s (x) .),
/// with m the canonical copy leak. Maps S -> S (x) C.
Channel build_composite(const Channel& R, const ClassicalDistribution& s);

/// Same composite with the inverse supplied directly (skips the transfer
/// inversion; used by the sampling campaign).
Channel build_composite(const Channel& R, const Channel& R_inverse,
                        const ClassicalDistribution& s);

/// Max over a spanning operator set of the trace distance between
/// Tr_C E(rho) and rho, extended by linearity.
double nondisturbance_residual(const Channel& E);

struct PointerState {
  ClassicalDistribution chi;
  double independence_residual = 0.0;
};

PointerState pointer_state(const Channel& R, const ClassicalDistribution& s,
                           const std::vector<DensityMatrix>& probes);

/// Variants taking an already-built composite E: S -> S (x) C.
PointerState pointer_state_of(const Channel& E, const std::vector<DensityMatrix>& probes);
double factorization_residual_of(const Channel& E);

/// Max over operator-basis inputs of || E_s(rho) - rho (x) chi ||_1.
double factorization_residual(const Channel& R, const ClassicalDistribution& s);

/// Max over (y, x) of the off-block-constant part of F_{y|x} in the sector
/// basis; certifies that the G-marginal factors through the which-sector
/// measurement.
double sector_factorization_residual(const Channel& R, const SectorDecomposition& sd);

/// The stochastic sector-label processing extracted from F for classical
/// input x: entry (y, i) = block-averaged trace of F_{y|x} on sector i.
StochasticMatrix extract_sector_stochastic(const EffectiveObservables& F,
                                           const SectorDecomposition& sd, int x);

struct TheoremFalsified : NumericalError {
  explicit TheoremFalsified(const std::string& what) : NumericalError(what) {}
};

struct TheoremVerdict {
  bool cond_i = false;    // S fully nonclassical
  bool cond_ii = false;   // interaction reversible (on the superselected domain)
  bool cond_iii = false;  // signalling S -> G above tolerance
  bool cond_iv = false;   // G classical (channel CQ-preserving)
  std::vector<std::string> violated;
  std::vector<std::pair<std::string, double>> residuals;

  bool falsified() const { return cond_i && cond_ii && cond_iii && cond_iv; }
};

/// Reversibility restricted to the superselected domain of S: operators
/// block-diagonal in the sector basis (tensored with anything on G).
ReversibilityVerdict reversibility_on_domain(const Channel& c, const SectorDecomposition& sd,
                                             int classical_factor = 0,
                                             double tol = kSpectralTol);

/// Classify an interaction against the four theorem conditions. Throws
/// NumericalError if all four come out true (the falsification hook).
TheoremVerdict theorem_report(const Channel& R, const std::vector<Mat>& generators,
                              double tol = 1e-8);

struct NormalForm {
  std::vector<int> perm;
  std::vector<Mat> unitaries;
  double residual = 0.0;
};

/// Recover (perm, unitaries) of a reversible CQ-preserving channel; failure
/// carries the reconstruction residual.
std::optional<NormalForm> decompose_reversible(const Channel& R, double tol = 1e-8,
                                               double* residual_out = nullptr);

struct SearchResult {
  double best_signalling = 0.0;        // unpenalized best over the whole search
  double best_irreversibility = 0.0;   // irreversibility at the best objective point
  double best_objective = 0.0;
  double constrained_signalling = 0.0;  // best signalling among near-reversible points
  std::vector<double> trace;            // best objective per restart
};

/// Derivative-free search over CQ channels maximizing signalling minus
/// penalty * irreversibility. Theorem 2 predicts the constrained frontier
/// pins to zero.
SearchResult adversarial_search(int n, int d, int restarts, double penalty,
                                std::uint64_t seed, int iterations = 200);

/// Irreversibility residual used by the search: trace-preservation defect of
/// the linear inverse plus total Choi negativity; 10 when singular.
double irreversibility_residual(const Channel& c);

struct CampaignReport {
  int samples = 0;
  double max_signalling = 0.0;
  double max_nondisturbance = 0.0;
  double max_pointer_independence = 0.0;
  double max_factorization = 0.0;
  std::uint64_t seed = 0;
  bool falsification_triggered = false;
  std::string failure_detail;
};

/// Sample random reversible CQ interactions and check every nogo invariant.
CampaignReport run_campaign(const std::vector<std::pair<int, int>>& dims, int samples,
                            std::uint64_t seed, int threads = 0);

}  // namespace hybrid
