#include "hybrid/states.hpp"

#include <cmath>

namespace hybrid {

DensityMatrix::DensityMatrix(Mat entries) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1)
    throw DimensionError("density matrix must be square and nonempty");
  if (hermiticity_residual(m_) > kStructTol)
    throw StructureError("density matrix not Hermitian");
  if (std::abs(m_.trace() - cplx(1.0, 0.0)) > kStructTol)
    throw StructureError("density matrix trace != 1");
  // Negativity beyond the spectral tolerance is a hard failure, not a repair:
  // silently projecting would mask genuine CPTP violations.
  if (min_eigenvalue(m_) < -kSpectralTol)
    throw StructureError("density matrix not positive semidefinite");
}

DensityMatrix DensityMatrix::pure(const Vec& amplitudes) {
  Vec v = amplitudes / amplitudes.norm();
  return DensityMatrix(v * v.adjoint());
}

DensityMatrix DensityMatrix::basis_state(int dim, int index) {
  Vec v = Vec::Zero(dim);
  v(index) = 1.0;
  return DensityMatrix(v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  return DensityMatrix(Mat::Identity(dim, dim) / static_cast<double>(dim));
}

ClassicalDistribution::ClassicalDistribution(RVec weights) : w_(std::move(weights)) {
  if (w_.size() < 1) throw DimensionError("distribution must be nonempty");
  for (int i = 0; i < w_.size(); ++i) {
    if (w_(i) < -1e-12) throw StructureError("negative probability weight");
    if (w_(i) < 0) w_(i) = 0.0;
  }
  if (std::abs(w_.sum() - 1.0) > kStructTol)
    throw StructureError("probability weights do not sum to 1");
}

Mat ClassicalDistribution::as_diagonal() const {
  Mat m = Mat::Zero(size(), size());
  for (int i = 0; i < size(); ++i) m(i, i) = w_(i);
  return m;
}

ClassicalDistribution ClassicalDistribution::point(int n, int index) {
  RVec w = RVec::Zero(n);
  w(index) = 1.0;
  return ClassicalDistribution(w);
}

ClassicalDistribution ClassicalDistribution::uniform(int n) {
  return ClassicalDistribution(RVec::Constant(n, 1.0 / n));
}

ClassicalDistribution ClassicalDistribution::from_diagonal(const Mat& diagonal_density) {
  RVec w(diagonal_density.rows());
  for (int i = 0; i < w.size(); ++i) w(i) = diagonal_density(i, i).real();
  return ClassicalDistribution(w);
}

CQState::CQState(int n, int d, std::vector<std::pair<double, DensityMatrix>> branches)
    : n_(n), d_(d), branches_(std::move(branches)) {
  if (static_cast<int>(branches_.size()) != n)
    throw DimensionError("CQ state needs one branch per classical label");
  RVec w(n);
  for (int x = 0; x < n; ++x) {
    if (branches_[x].second.dim() != d)
      throw DimensionError("CQ branch has wrong quantum dimension");
    w(x) = branches_[x].first;
  }
  ClassicalDistribution check(w);  // validates the weights
  for (int x = 0; x < n; ++x) branches_[x].first = check[x];
}

ClassicalDistribution CQState::marginal() const {
  RVec w(n_);
  for (int x = 0; x < n_; ++x) w(x) = branches_[x].first;
  return ClassicalDistribution(w);
}

DensityMatrix CQState::embed() const {
  Mat m = Mat::Zero(n_ * d_, n_ * d_);
  for (int x = 0; x < n_; ++x)
    m.block(x * d_, x * d_, d_, d_) = branches_[x].first * branches_[x].second.mat();
  return DensityMatrix(m);
}

CQState CQState::extract(const DensityMatrix& rho, int n, int d) {
  if (rho.dim() != n * d) throw DimensionError("CQ extract: dimension mismatch");
  const Mat& m = rho.mat();
  if ((m - dephase(m, {n, d}, 0)).cwiseAbs().maxCoeff() > kStructTol)
    throw StructureError("state has coherence across classical labels");
  std::vector<std::pair<double, DensityMatrix>> branches;
  branches.reserve(n);
  for (int x = 0; x < n; ++x) {
    Mat block = m.block(x * d, x * d, d, d);
    double w = block.trace().real();
    if (w > 1e-14) {
      branches.emplace_back(w, DensityMatrix(block / w));
    } else {
      branches.emplace_back(0.0, DensityMatrix::maximally_mixed(d));
    }
  }
  return CQState(n, d, std::move(branches));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  long long prod = static_cast<long long>(a.dim()) * b.dim();
  if (prod > kMaxCompositeDim)
    throw SizeError("composite dimension exceeds configured maximum");
  return DensityMatrix(kron(a.mat(), b.mat()));
}

Mat partial_trace(const Mat& m, const std::vector<int>& dims, const std::vector<int>& keep) {
  int total = total_dim(dims);
  if (m.rows() != total || m.cols() != total)
    throw DimensionError("partial_trace: dims inconsistent with matrix size");
  const int nf = static_cast<int>(dims.size());
  std::vector<bool> kept(nf, false);
  for (int k : keep) {
    if (k < 0 || k >= nf) throw DimensionError("partial_trace: bad factor index");
    kept[k] = true;
  }
  int out_dim = 1;
  for (int f = 0; f < nf; ++f)
    if (kept[f]) out_dim *= dims[f];

  auto split = [&](int idx, std::vector<int>& factors) {
    for (int f = nf - 1; f >= 0; --f) {
      factors[f] = idx % dims[f];
      idx /= dims[f];
    }
  };
  std::vector<int> ri(nf), ci(nf);
  Mat out = Mat::Zero(out_dim, out_dim);
  for (int r = 0; r < total; ++r) {
    split(r, ri);
    for (int c = 0; c < total; ++c) {
      split(c, ci);
      bool traced_match = true;
      int orow = 0, ocol = 0;
      for (int f = 0; f < nf; ++f) {
        if (kept[f]) {
          orow = orow * dims[f] + ri[f];
          ocol = ocol * dims[f] + ci[f];
        } else if (ri[f] != ci[f]) {
          traced_match = false;
          break;
        }
      }
      if (traced_match) out(orow, ocol) += m(r, c);
    }
  }
  return out;
}

Mat dephase(const Mat& m, const std::vector<int>& dims, int classical_factor) {
  int total = total_dim(dims);
  if (m.rows() != total || m.cols() != total)
    throw DimensionError("dephase: dims inconsistent with matrix size");
  if (classical_factor < 0 || classical_factor >= static_cast<int>(dims.size()))
    throw DimensionError("dephase: bad factor index");
  int right = 1;
  for (size_t f = classical_factor + 1; f < dims.size(); ++f) right *= dims[f];
  int dc = dims[classical_factor];
  Mat out = m;
  for (int r = 0; r < total; ++r)
    for (int c = 0; c < total; ++c) {
      int rl = (r / right) % dc;
      int cl = (c / right) % dc;
      if (rl != cl) out(r, c) = 0.0;
    }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& dims,
                            const std::vector<int>& keep) {
  return DensityMatrix(partial_trace(rho.mat(), dims, keep));
}

DensityMatrix dephase(const DensityMatrix& rho, const std::vector<int>& dims,
                      int classical_factor) {
  return DensityMatrix(dephase(rho.mat(), dims, classical_factor));
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw DimensionError("trace_distance: dimension mismatch");
  return 0.5 * trace_norm(rho.mat() - sigma.mat());
}

double total_variation(const ClassicalDistribution& p, const ClassicalDistribution& q) {
  if (p.size() != q.size()) throw DimensionError("total_variation: length mismatch");
  return 0.5 * (p.weights() - q.weights()).cwiseAbs().sum();
}

}  // namespace hybrid
