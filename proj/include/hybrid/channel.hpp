#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hybrid/states.hpp"

namespace hybrid {

/// CPTP map between multi-factor systems, stored in Kraus form. Immutable;
/// the Choi matrix is memoized on first use (single-assignment).
class Channel {
 public:
  Channel(std::vector<int> in_dims, std::vector<int> out_dims, std::vector<Mat> kraus);

  // Skips the CPTP checks; used for witness demonstrations only.
  static Channel unchecked(std::vector<int> in_dims, std::vector<int> out_dims,
                           std::vector<Mat> kraus);

  const std::vector<int>& in_dims() const { return in_dims_; }
  const std::vector<int>& out_dims() const { return out_dims_; }
  int in_total() const { return in_total_; }
  int out_total() const { return out_total_; }
  const std::vector<Mat>& kraus() const { return kraus_; }

  /// sum_k K rho K^dag; accepts arbitrary operators, not just states.
  Mat apply(const Mat& rho) const;
  DensityMatrix apply(const DensityMatrix& rho) const;

  /// Choi matrix with input-major index (i*out_total + m).
  const Mat& choi() const;

  /// Superoperator on column-major vec'd operators.
  Mat transfer() const;

  double trace_preservation_residual() const;

  /// Minimal-Kraus canonical form via Choi eigendecomposition.
  Channel canonicalized() const;

 private:
  Channel(std::vector<int> in_dims, std::vector<int> out_dims, std::vector<Mat> kraus,
          bool validate);

  std::vector<int> in_dims_, out_dims_;
  int in_total_, out_total_;
  std::vector<Mat> kraus_;
  struct ChoiCache {
    std::once_flag once;
    Mat value;
  };
  std::shared_ptr<ChoiCache> choi_cache_;
};

/// Column-stochastic matrix: classical channel on distributions.
class StochasticMatrix {
 public:
  explicit StochasticMatrix(RMat entries);
  int rows() const { return static_cast<int>(m_.rows()); }
  int cols() const { return static_cast<int>(m_.cols()); }
  const RMat& entries() const { return m_; }
  ClassicalDistribution apply(const ClassicalDistribution& p) const;

 private:
  RMat m_;
};

/// Normal form of a reversible classical-quantum interaction: a relabeling
/// of the classical register and one unitary per classical label.
struct ReversibleCQInteraction {
  int n = 0;
  int d = 0;
  std::vector<int> perm;
  std::vector<Mat> unitaries;

  ReversibleCQInteraction(int n, int d, std::vector<int> perm, std::vector<Mat> unitaries);

  Channel to_channel() const;
  ReversibleCQInteraction inverted() const;
  static ReversibleCQInteraction random(Rng& rng, int n, int d);
};

Channel compose(const Channel& f, const Channel& g);
Channel tensor_channels(const Channel& a, const Channel& b);

Channel identity_channel(std::vector<int> dims);
Channel unitary_channel(std::vector<int> dims, const Mat& u);
Channel dephase_channel(std::vector<int> dims, int classical_factor);
Channel trace_out_channel(std::vector<int> dims, int factor);
Channel permute_channel(std::vector<int> dims, const std::vector<int>& perm);
/// rho |-> s (x) rho, prepending a classical register in state s.
Channel prepend_state_channel(const ClassicalDistribution& s, std::vector<int> sys_dims);

/// Canonical classical copy leak m: G -> G (x) C.
Channel leak_copy(int n);

/// sum_x |x><x| (x) U_x rho U_x^dag on [n, d].
Channel controlled_unitary_channel(int n, const std::vector<Mat>& unitaries);

struct CQResidual {
  bool preserving = false;
  double residual = 0.0;
};

/// True iff dephase . c . dephase == c . dephase on a spanning operator set.
CQResidual is_cq_preserving(const Channel& c, int classical_factor, double tol = kMapTol);

enum class IrreversibilityWitness { rank_deficient, inverse_not_completely_positive };

struct ReversibilityVerdict {
  bool reversible = false;
  std::optional<Channel> inverse;
  IrreversibilityWitness witness = IrreversibilityWitness::rank_deficient;
  /// rank_deficient: smallest singular value of the transfer matrix, plus the
  /// lost operator direction; inverse_not_cp: most negative Choi eigenvalue.
  double witness_value = 0.0;
  Mat lost_direction;
  int transfer_rank = 0;
};

/// Constructive reversibility decision: invert the transfer matrix and test
/// physicality of the inverse.
ReversibilityVerdict reversibility(const Channel& c, double tol = kSpectralTol);

Mat kraus_to_choi(const std::vector<Mat>& kraus, int in_total, int out_total);
std::vector<Mat> choi_to_kraus(const Mat& choi, int in_total, int out_total,
                               double cutoff = 1e-12);
Mat choi_to_transfer(const Mat& choi, int in_total, int out_total);
Mat transfer_to_choi(const Mat& transfer, int in_total, int out_total);

/// The paper-derived fixture interactions, all on [G, S] with G classical.
struct FixtureSet {
  Channel entangling_cnot;     // unitary CNOT, S controls G
  Channel decohered_cnot;      // G dephased before and after the CNOT
  Channel sector_measurement;  // which-sector readout of the (1,3)-superselected S
  std::vector<Mat> sector_generators;  // block operator basis of C^1 + C^3
  std::vector<Mat> qubit_generators;   // {sigma_x, sigma_z}: irreducible S
};

FixtureSet fixtures();

}  // namespace hybrid
