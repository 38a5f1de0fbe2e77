#pragma once

#include <vector>

#include "hybrid/channel.hpp"

namespace hybrid {

inline constexpr std::uint64_t kSectorSeed = 0x5EC7;

/// Basis change plus block dimensions realizing V = (+)_i V_i. Conjugating
/// every generator by basis_change yields block-diagonal matrices.
struct SectorDecomposition {
  int dim = 0;
  Mat basis_change;             // columns: decomposed basis, blocks contiguous
  std::vector<int> block_dims;  // ascending

  int sector_count() const { return static_cast<int>(block_dims.size()); }
  /// Projector onto block i, expressed in the original basis.
  Mat projector(int i) const;
  int block_offset(int i) const;
  /// Max off-block magnitude of basis_change^dag g basis_change over generators.
  double off_block_residual(const std::vector<Mat>& generators) const;
};

/// Orthonormal (Hilbert-Schmidt) basis of the smallest *-algebra containing
/// the generators and the identity.
std::vector<Mat> algebra_closure(const std::vector<Mat>& generators, int max_dim = 4096);

/// Hermitian basis of the commutant of the generated algebra.
std::vector<Mat> commutant_basis(const std::vector<Mat>& generators);

SectorDecomposition decompose(const std::vector<Mat>& generators,
                              std::uint64_t seed = kSectorSeed);

bool is_fully_nonclassical(const std::vector<Mat>& generators,
                           std::uint64_t seed = kSectorSeed);

/// Non-disturbing which-sector readout M: S -> S (x) C_k,
/// rho |-> sum_i P_i rho P_i (x) |i><i|.
Channel which_sector_channel(const SectorDecomposition& s);

}  // namespace hybrid
