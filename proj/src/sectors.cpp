#include "hybrid/sectors.hpp"

#include <algorithm>
#include <cmath>

namespace hybrid {

namespace {

// Eigenvalue clusters closer than this are merged into one block.
constexpr double kGapThreshold = 1e-7;

void check_generators(const std::vector<Mat>& generators) {
  if (generators.empty()) throw DimensionError("generator list is empty");
  int d = static_cast<int>(generators.front().rows());
  for (const Mat& g : generators)
    if (g.rows() != d || g.cols() != d)
      throw DimensionError("generators must be square matrices of equal dimension");
}

// Gram-Schmidt a candidate against the running basis; returns false if it is
// already in the span.
bool absorb(std::vector<Mat>& basis, Mat candidate) {
  for (const Mat& b : basis) candidate -= hs_inner(b, candidate) * b;
  double norm = std::sqrt(hs_inner(candidate, candidate).real());
  if (norm < 1e-9) return false;
  basis.push_back(candidate / norm);
  return true;
}

}  // namespace

Mat SectorDecomposition::projector(int i) const {
  Mat p = Mat::Zero(dim, dim);
  int off = block_offset(i);
  for (int a = 0; a < block_dims[i]; ++a) {
    const Vec col = basis_change.col(off + a);
    p += col * col.adjoint();
  }
  return p;
}

int SectorDecomposition::block_offset(int i) const {
  int off = 0;
  for (int j = 0; j < i; ++j) off += block_dims[j];
  return off;
}

double SectorDecomposition::off_block_residual(const std::vector<Mat>& generators) const {
  double worst = 0.0;
  for (const Mat& g : generators) {
    Mat b = basis_change.adjoint() * g * basis_change;
    int roff = 0;
    for (int i = 0; i < sector_count(); ++i) {
      int coff = 0;
      for (int j = 0; j < sector_count(); ++j) {
        if (i != j)
          worst = std::max(
              worst, b.block(roff, coff, block_dims[i], block_dims[j]).cwiseAbs().maxCoeff());
        coff += block_dims[j];
      }
      roff += block_dims[i];
    }
  }
  return worst;
}

std::vector<Mat> algebra_closure(const std::vector<Mat>& generators, int max_dim) {
  check_generators(generators);
  int d = static_cast<int>(generators.front().rows());
  if (d * d > max_dim) throw SizeError("algebra closure exceeds configured maximum");
  std::vector<Mat> basis;
  double scale = 1.0 / std::sqrt(static_cast<double>(d));
  absorb(basis, Mat::Identity(d, d) * scale);
  for (const Mat& g : generators) {
    absorb(basis, g);
    absorb(basis, g.adjoint());
  }
  // Multiply pairs until no new directions appear.
  bool grew = true;
  while (grew) {
    grew = false;
    size_t count = basis.size();
    for (size_t i = 0; i < count && !grew; ++i)
      for (size_t j = 0; j < count && !grew; ++j)
        if (absorb(basis, basis[i] * basis[j])) grew = true;
  }
  return basis;
}

std::vector<Mat> commutant_basis(const std::vector<Mat>& generators) {
  check_generators(generators);
  int d = static_cast<int>(generators.front().rows());
  // Solve [X, G] = 0 and [X, G^dag] = 0 over Hermitian X, parameterized by
  // d^2 real coordinates.
  std::vector<Mat> herm_basis;
  for (int a = 0; a < d; ++a) {
    Mat e = Mat::Zero(d, d);
    e(a, a) = 1.0;
    herm_basis.push_back(e);
  }
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      Mat e = Mat::Zero(d, d);
      e(a, b) = e(b, a) = 1.0 / std::sqrt(2.0);
      herm_basis.push_back(e);
      Mat f = Mat::Zero(d, d);
      f(a, b) = cplx(0, 1.0 / std::sqrt(2.0));
      f(b, a) = cplx(0, -1.0 / std::sqrt(2.0));
      herm_basis.push_back(f);
    }

  const int params = d * d;
  const int rows_per = 2 * d * d;  // real and imaginary parts of [X, G]
  RMat system(rows_per * 2 * generators.size(), params);
  int row0 = 0;
  for (const Mat& g : generators) {
    for (int use_adjoint : {0, 1}) {
      Mat gm = use_adjoint ? Mat(g.adjoint()) : g;
      for (int p = 0; p < params; ++p) {
        Mat comm = herm_basis[p] * gm - gm * herm_basis[p];
        for (int r = 0; r < d; ++r)
          for (int c = 0; c < d; ++c) {
            system(row0 + r * d + c, p) = comm(r, c).real();
            system(row0 + d * d + r * d + c, p) = comm(r, c).imag();
          }
      }
      row0 += rows_per;
    }
  }
  Eigen::JacobiSVD<RMat> svd(system, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double cut = 1e-8 * std::max(1.0, sv.size() > 0 ? sv(0) : 1.0);
  std::vector<Mat> null_basis;
  for (int c = 0; c < svd.matrixV().cols(); ++c) {
    double s = c < sv.size() ? sv(c) : 0.0;
    if (s > cut) continue;
    Mat x = Mat::Zero(d, d);
    for (int p = 0; p < params; ++p) x += svd.matrixV()(p, c) * herm_basis[p];
    null_basis.push_back(std::move(x));
  }
  return null_basis;
}

SectorDecomposition decompose(const std::vector<Mat>& generators, std::uint64_t seed) {
  check_generators(generators);
  int d = static_cast<int>(generators.front().rows());
  std::vector<Mat> comm = commutant_basis(generators);

  // Random Hermitian commutant element; its eigenspaces are invariant under
  // every generator and give the block decomposition.
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat w = Mat::Zero(d, d);
  for (const Mat& x : comm) w += gauss(rng) * x;

  Eigen::SelfAdjointEigenSolver<Mat> es(w);
  if (es.info() != Eigen::Success)
    throw NumericalError("sector decomposition: eigensolve did not converge");
  RVec vals = es.eigenvalues();
  Mat vecs = es.eigenvectors();

  // Cluster eigenvalues at the gap threshold (values come sorted).
  std::vector<std::pair<int, int>> clusters;  // (start, size)
  int start = 0;
  for (int i = 1; i <= d; ++i) {
    if (i == d || vals(i) - vals(i - 1) > kGapThreshold) {
      clusters.emplace_back(start, i - start);
      start = i;
    }
  }
  std::stable_sort(clusters.begin(), clusters.end(),
                   [](const auto& a, const auto& b) { return a.second < b.second; });

  SectorDecomposition sd;
  sd.dim = d;
  sd.basis_change = Mat(d, d);
  int col = 0;
  for (const auto& [off, size] : clusters) {
    sd.block_dims.push_back(size);
    sd.basis_change.block(0, col, d, size) = vecs.block(0, off, d, size);
    col += size;
  }
  return sd;
}

bool is_fully_nonclassical(const std::vector<Mat>& generators, std::uint64_t seed) {
  return decompose(generators, seed).sector_count() == 1;
}

Channel which_sector_channel(const SectorDecomposition& s) {
  int d = s.dim;
  int k = s.sector_count();
  std::vector<Mat> kraus;
  for (int i = 0; i < k; ++i) {
    Mat p = s.projector(i);
    Mat m = Mat::Zero(d * k, d);
    for (int row = 0; row < d; ++row) m.row(row * k + i) = p.row(row);
    kraus.push_back(std::move(m));
  }
  return Channel({d}, {d, k}, std::move(kraus));
}

}  // namespace hybrid
