#include "hybrid/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hybrid {

namespace {

Mat vec_col(const Mat& m) {
  return Eigen::Map<const Vec>(m.data(), m.size());
}

}  // namespace

Channel::Channel(std::vector<int> in_dims, std::vector<int> out_dims, std::vector<Mat> kraus)
    : Channel(std::move(in_dims), std::move(out_dims), std::move(kraus), true) {}

Channel Channel::unchecked(std::vector<int> in_dims, std::vector<int> out_dims,
                           std::vector<Mat> kraus) {
  return Channel(std::move(in_dims), std::move(out_dims), std::move(kraus), false);
}

Channel::Channel(std::vector<int> in_dims, std::vector<int> out_dims, std::vector<Mat> kraus,
                 bool validate)
    : in_dims_(std::move(in_dims)),
      out_dims_(std::move(out_dims)),
      in_total_(total_dim(in_dims_)),
      out_total_(total_dim(out_dims_)),
      kraus_(std::move(kraus)),
      choi_cache_(std::make_shared<ChoiCache>()) {
  if (kraus_.empty()) throw StructureError("channel needs at least one Kraus operator");
  for (const Mat& k : kraus_)
    if (k.rows() != out_total_ || k.cols() != in_total_)
      throw DimensionError("Kraus operator shape inconsistent with channel dims");
  if (validate) {
    if (trace_preservation_residual() > kSpectralTol)
      throw StructureError("channel is not trace-preserving");
    if (min_eigenvalue(choi()) < -kSpectralTol)
      throw StructureError("channel is not completely positive");
  }
}

Mat Channel::apply(const Mat& rho) const {
  if (rho.rows() != in_total_ || rho.cols() != in_total_)
    throw DimensionError("channel apply: dimension mismatch");
  Mat out = Mat::Zero(out_total_, out_total_);
  for (const Mat& k : kraus_) out += k * rho * k.adjoint();
  return out;
}

DensityMatrix Channel::apply(const DensityMatrix& rho) const {
  return DensityMatrix(apply(rho.mat()));
}

const Mat& Channel::choi() const {
  std::call_once(choi_cache_->once, [this] {
    choi_cache_->value = kraus_to_choi(kraus_, in_total_, out_total_);
  });
  return choi_cache_->value;
}

Mat Channel::transfer() const {
  Mat t = Mat::Zero(out_total_ * out_total_, in_total_ * in_total_);
  for (const Mat& k : kraus_) t += kron(k.conjugate(), k);
  return t;
}

double Channel::trace_preservation_residual() const {
  Mat acc = Mat::Zero(in_total_, in_total_);
  for (const Mat& k : kraus_) acc += k.adjoint() * k;
  return (acc - Mat::Identity(in_total_, in_total_)).cwiseAbs().maxCoeff();
}

Channel Channel::canonicalized() const {
  return Channel(in_dims_, out_dims_, choi_to_kraus(choi(), in_total_, out_total_), false);
}

Mat kraus_to_choi(const std::vector<Mat>& kraus, int in_total, int out_total) {
  const int dim = in_total * out_total;
  Mat choi = Mat::Zero(dim, dim);
  Vec v(dim);
  for (const Mat& k : kraus) {
    for (int i = 0; i < in_total; ++i)
      for (int m = 0; m < out_total; ++m) v(i * out_total + m) = k(m, i);
    choi += v * v.adjoint();
  }
  return choi;
}

std::vector<Mat> choi_to_kraus(const Mat& choi, int in_total, int out_total, double cutoff) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(choi));
  if (es.info() != Eigen::Success) throw NumericalError("Choi eigensolve failed");
  std::vector<Mat> kraus;
  for (int l = 0; l < es.eigenvalues().size(); ++l) {
    double lambda = es.eigenvalues()(l);
    if (lambda <= cutoff) continue;
    Vec w = std::sqrt(lambda) * es.eigenvectors().col(l);
    Mat k(out_total, in_total);
    for (int i = 0; i < in_total; ++i)
      for (int m = 0; m < out_total; ++m) k(m, i) = w(i * out_total + m);
    kraus.push_back(std::move(k));
  }
  if (kraus.empty()) kraus.push_back(Mat::Zero(out_total, in_total));
  return kraus;
}

Mat choi_to_transfer(const Mat& choi, int in_total, int out_total) {
  Mat t(out_total * out_total, in_total * in_total);
  for (int a = 0; a < in_total; ++a)
    for (int b = 0; b < in_total; ++b)
      for (int m = 0; m < out_total; ++m)
        for (int n = 0; n < out_total; ++n)
          t(m + out_total * n, a + in_total * b) = choi(a * out_total + m, b * out_total + n);
  return t;
}

Mat transfer_to_choi(const Mat& transfer, int in_total, int out_total) {
  Mat choi(in_total * out_total, in_total * out_total);
  for (int a = 0; a < in_total; ++a)
    for (int b = 0; b < in_total; ++b)
      for (int m = 0; m < out_total; ++m)
        for (int n = 0; n < out_total; ++n)
          choi(a * out_total + m, b * out_total + n) = transfer(m + out_total * n, a + in_total * b);
  return choi;
}

Channel compose(const Channel& f, const Channel& g) {
  if (f.in_total() != g.out_total())
    throw DimensionError("compose: inner dimensions do not match");
  std::vector<Mat> kraus;
  kraus.reserve(f.kraus().size() * g.kraus().size());
  for (const Mat& a : f.kraus())
    for (const Mat& b : g.kraus()) kraus.push_back(a * b);
  Channel c = Channel::unchecked(g.in_dims(), f.out_dims(), std::move(kraus));
  // Keep the Kraus rank at most in*out so long composition chains stay cheap.
  if (static_cast<int>(c.kraus().size()) > c.in_total() * c.out_total())
    return c.canonicalized();
  return c;
}

Channel tensor_channels(const Channel& a, const Channel& b) {
  std::vector<int> in_dims = a.in_dims(), out_dims = a.out_dims();
  in_dims.insert(in_dims.end(), b.in_dims().begin(), b.in_dims().end());
  out_dims.insert(out_dims.end(), b.out_dims().begin(), b.out_dims().end());
  std::vector<Mat> kraus;
  for (const Mat& ka : a.kraus())
    for (const Mat& kb : b.kraus()) kraus.push_back(kron(ka, kb));
  return Channel::unchecked(std::move(in_dims), std::move(out_dims), std::move(kraus));
}

Channel identity_channel(std::vector<int> dims) {
  int t = total_dim(dims);
  return Channel::unchecked(dims, dims, {Mat::Identity(t, t)});
}

Channel unitary_channel(std::vector<int> dims, const Mat& u) {
  int t = total_dim(dims);
  if (u.rows() != t || u.cols() != t) throw DimensionError("unitary_channel: size mismatch");
  if ((u.adjoint() * u - Mat::Identity(t, t)).cwiseAbs().maxCoeff() > kStructTol)
    throw StructureError("matrix is not unitary");
  return Channel::unchecked(dims, dims, {u});
}

Channel dephase_channel(std::vector<int> dims, int classical_factor) {
  int total = total_dim(dims);
  int dc = dims.at(classical_factor);
  int right = 1;
  for (size_t f = classical_factor + 1; f < dims.size(); ++f) right *= dims[f];
  std::vector<Mat> kraus;
  for (int x = 0; x < dc; ++x) {
    Mat p = Mat::Zero(total, total);
    for (int i = 0; i < total; ++i)
      if ((i / right) % dc == x) p(i, i) = 1.0;
    kraus.push_back(std::move(p));
  }
  return Channel::unchecked(dims, dims, std::move(kraus));
}

Channel trace_out_channel(std::vector<int> dims, int factor) {
  int total = total_dim(dims);
  std::vector<int> out_dims;
  for (size_t f = 0; f < dims.size(); ++f)
    if (static_cast<int>(f) != factor) out_dims.push_back(dims[f]);
  if (out_dims.empty()) out_dims.push_back(1);
  int out_total = total / dims.at(factor);
  int right = 1;
  for (size_t f = factor + 1; f < dims.size(); ++f) right *= dims[f];
  std::vector<Mat> kraus;
  for (int x = 0; x < dims[factor]; ++x) {
    Mat k = Mat::Zero(out_total, total);
    for (int i = 0; i < total; ++i) {
      if ((i / right) % dims[factor] != x) continue;
      int hi = i / (right * dims[factor]);
      int lo = i % right;
      k(hi * right + lo, i) = 1.0;
    }
    kraus.push_back(std::move(k));
  }
  return Channel::unchecked(dims, std::move(out_dims), std::move(kraus));
}

Channel permute_channel(std::vector<int> dims, const std::vector<int>& perm) {
  // perm[f] = source factor placed at output slot f.
  int total = total_dim(dims);
  const int nf = static_cast<int>(dims.size());
  if (static_cast<int>(perm.size()) != nf) throw DimensionError("permute_channel: bad perm");
  std::vector<int> out_dims(nf);
  for (int f = 0; f < nf; ++f) out_dims[f] = dims[perm[f]];
  Mat u = Mat::Zero(total, total);
  std::vector<int> idx(nf), oidx(nf);
  for (int i = 0; i < total; ++i) {
    int rem = i;
    for (int f = nf - 1; f >= 0; --f) {
      idx[f] = rem % dims[f];
      rem /= dims[f];
    }
    for (int f = 0; f < nf; ++f) oidx[f] = idx[perm[f]];
    u(composite_index(out_dims, oidx), i) = 1.0;
  }
  return Channel::unchecked(dims, out_dims, {u});
}

Channel prepend_state_channel(const ClassicalDistribution& s, std::vector<int> sys_dims) {
  int d = total_dim(sys_dims);
  int n = s.size();
  std::vector<int> out_dims{n};
  out_dims.insert(out_dims.end(), sys_dims.begin(), sys_dims.end());
  std::vector<Mat> kraus;
  for (int x = 0; x < n; ++x) {
    if (s[x] <= 0) continue;
    Mat k = Mat::Zero(n * d, d);
    k.block(x * d, 0, d, d) = std::sqrt(s[x]) * Mat::Identity(d, d);
    kraus.push_back(std::move(k));
  }
  return Channel::unchecked(sys_dims, std::move(out_dims), std::move(kraus));
}

Channel leak_copy(int n) {
  if (n < 1) throw DimensionError("leak_copy: n must be >= 1");
  std::vector<Mat> kraus;
  for (int x = 0; x < n; ++x) {
    Mat k = Mat::Zero(n * n, n);
    k(x * n + x, x) = 1.0;
    kraus.push_back(std::move(k));
  }
  return Channel::unchecked({n}, {n, n}, std::move(kraus));
}

Channel controlled_unitary_channel(int n, const std::vector<Mat>& unitaries) {
  if (static_cast<int>(unitaries.size()) != n)
    throw DimensionError("controlled_unitary_channel: need one unitary per label");
  int d = static_cast<int>(unitaries.front().rows());
  Mat u = Mat::Zero(n * d, n * d);
  for (int x = 0; x < n; ++x) u.block(x * d, x * d, d, d) = unitaries[x];
  return unitary_channel({n, d}, u);
}

StochasticMatrix::StochasticMatrix(RMat entries) : m_(std::move(entries)) {
  if (m_.minCoeff() < -1e-12) throw StructureError("stochastic matrix has negative entry");
  m_ = m_.cwiseMax(0.0);
  for (int c = 0; c < m_.cols(); ++c)
    if (std::abs(m_.col(c).sum() - 1.0) > kStructTol)
      throw StructureError("stochastic matrix column does not sum to 1");
}

ClassicalDistribution StochasticMatrix::apply(const ClassicalDistribution& p) const {
  if (p.size() != cols()) throw DimensionError("stochastic apply: size mismatch");
  return ClassicalDistribution(m_ * p.weights());
}

ReversibleCQInteraction::ReversibleCQInteraction(int n_, int d_, std::vector<int> perm_,
                                                 std::vector<Mat> unitaries_)
    : n(n_), d(d_), perm(std::move(perm_)), unitaries(std::move(unitaries_)) {
  if (static_cast<int>(perm.size()) != n || static_cast<int>(unitaries.size()) != n)
    throw DimensionError("ReversibleCQInteraction: need perm and unitary per label");
  std::vector<bool> hit(n, false);
  for (int p : perm) {
    if (p < 0 || p >= n || hit[p]) throw StructureError("perm is not a bijection");
    hit[p] = true;
  }
  for (const Mat& u : unitaries)
    if (u.rows() != d || u.cols() != d ||
        (u.adjoint() * u - Mat::Identity(d, d)).cwiseAbs().maxCoeff() > kStructTol)
      throw StructureError("conditional unitary fails U^dag U = I");
}

Channel ReversibleCQInteraction::to_channel() const {
  Mat u = Mat::Zero(n * d, n * d);
  for (int x = 0; x < n; ++x) u.block(perm[x] * d, x * d, d, d) = unitaries[x];
  return unitary_channel({n, d}, u);
}

ReversibleCQInteraction ReversibleCQInteraction::inverted() const {
  std::vector<int> inv_perm(n);
  std::vector<Mat> inv_u(n);
  for (int x = 0; x < n; ++x) inv_perm[perm[x]] = x;
  for (int y = 0; y < n; ++y) inv_u[y] = unitaries[inv_perm[y]].adjoint();
  return ReversibleCQInteraction(n, d, std::move(inv_perm), std::move(inv_u));
}

ReversibleCQInteraction ReversibleCQInteraction::random(Rng& rng, int n, int d) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Mat> us;
  us.reserve(n);
  for (int x = 0; x < n; ++x) us.push_back(random_unitary(rng, d));
  return ReversibleCQInteraction(n, d, std::move(perm), std::move(us));
}

CQResidual is_cq_preserving(const Channel& c, int classical_factor, double tol) {
  double worst = 0.0;
  const auto& in_dims = c.in_dims();
  const auto& out_dims = c.out_dims();
  int t = c.in_total();
  for (int a = 0; a < t; ++a)
    for (int b = 0; b < t; ++b) {
      Mat e = Mat::Zero(t, t);
      e(a, b) = 1.0;
      Mat de = dephase(e, in_dims, classical_factor);
      if (de.cwiseAbs().maxCoeff() == 0.0) continue;
      Mat through = c.apply(de);
      Mat residual = dephase(through, out_dims, classical_factor) - through;
      worst = std::max(worst, trace_norm(residual));
    }
  return {worst <= tol, worst};
}

ReversibilityVerdict reversibility(const Channel& c, double tol) {
  if (c.in_total() != c.out_total())
    throw DimensionError("reversibility: input and output dimensions differ");
  const int t = c.in_total();
  Mat transfer = c.transfer();
  Eigen::JacobiSVD<Mat> svd(transfer, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  double smax = sv(0);
  double rank_cut = std::max(1e-10, 1e-12 * smax);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > rank_cut) ++rank;

  ReversibilityVerdict v;
  v.transfer_rank = rank;
  if (rank < sv.size()) {
    v.reversible = false;
    v.witness = IrreversibilityWitness::rank_deficient;
    v.witness_value = sv(sv.size() - 1);
    Vec lost = svd.matrixV().col(sv.size() - 1);
    v.lost_direction = Eigen::Map<const Mat>(lost.data(), t, t);
    return v;
  }
  Mat inv_transfer = transfer.partialPivLu().solve(Mat::Identity(t * t, t * t));
  Mat inv_choi = hermitize(transfer_to_choi(inv_transfer, t, t));
  double min_eig = min_eigenvalue(inv_choi);
  if (min_eig < -tol) {
    v.reversible = false;
    v.witness = IrreversibilityWitness::inverse_not_completely_positive;
    v.witness_value = min_eig;
    return v;
  }
  Channel inverse =
      Channel::unchecked(c.out_dims(), c.in_dims(), choi_to_kraus(inv_choi, t, t));
  if (inverse.trace_preservation_residual() > tol) {
    v.reversible = false;
    v.witness = IrreversibilityWitness::inverse_not_completely_positive;
    v.witness_value = min_eig;
    return v;
  }
  v.reversible = true;
  v.inverse = std::move(inverse);
  return v;
}

FixtureSet fixtures() {
  // CNOT on [G, S]: S is the control, G the target. |g,s> -> |g+s mod 2, s>.
  Mat cnot = Mat::Zero(4, 4);
  cnot(0, 0) = 1;  // |0,0> -> |0,0>
  cnot(3, 1) = 1;  // |0,1> -> |1,1>
  cnot(2, 2) = 1;  // |1,0> -> |1,0>
  cnot(1, 3) = 1;  // |1,1> -> |0,1>
  Channel entangling = unitary_channel({2, 2}, cnot);
  Channel dephase_g = dephase_channel({2, 2}, 0);
  Channel decohered = compose(dephase_g, compose(entangling, dephase_g));

  // Which-sector measurement on the (1,3)-superselected 4-dim system: the
  // classical register is shifted by the sector label.
  Mat p0 = Mat::Zero(4, 4);
  p0(0, 0) = 1;
  Mat p1 = Mat::Identity(4, 4) - p0;
  Mat shift = Mat::Zero(2, 2);
  shift(1, 0) = 1;
  shift(0, 1) = 1;
  std::vector<Mat> sector_kraus{kron(Mat::Identity(2, 2), p0), kron(shift, p1)};
  Channel sector = Channel({2, 4}, {2, 4}, std::move(sector_kraus));

  std::vector<Mat> sector_generators;
  sector_generators.push_back(p0);
  for (int a = 1; a < 4; ++a)
    for (int b = 1; b < 4; ++b) {
      Mat e = Mat::Zero(4, 4);
      e(a, b) = 1.0;
      sector_generators.push_back(std::move(e));
    }

  Mat sx = Mat::Zero(2, 2), sz = Mat::Zero(2, 2);
  sx(0, 1) = 1;
  sx(1, 0) = 1;
  sz(0, 0) = 1;
  sz(1, 1) = -1;

  return FixtureSet{std::move(entangling), std::move(decohered), std::move(sector),
                    std::move(sector_generators), {sx, sz}};
}

}  // namespace hybrid
