#include "hybrid/nogo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

namespace hybrid {

namespace {

void require_cq_shape(const Channel& R) {
  if (R.in_dims().size() < 2 || R.in_dims() != R.out_dims())
    throw DimensionError("expected a channel on [classical, quantum] factors");
}

int quantum_dim(const Channel& R) { return R.in_total() / R.in_dims().front(); }

Mat basis_op(int dim, int row, int col) {
  Mat e = Mat::Zero(dim, dim);
  e(row, col) = 1.0;
  return e;
}

Mat inverse_sqrt(const Mat& psd) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(psd));
  Vec inv = Vec::Zero(psd.rows());
  for (int i = 0; i < psd.rows(); ++i) {
    double v = es.eigenvalues()(i);
    inv(i) = (v > 1e-14) ? 1.0 / std::sqrt(v) : 0.0;
  }
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

EffectiveObservables effective_observables(const Channel& R, int classical_factor,
                                           bool require_cq) {
  require_cq_shape(R);
  if (classical_factor != 0)
    throw DimensionError("classical register must be the first factor");
  if (require_cq) {
    CQResidual cq = is_cq_preserving(R, 0);
    if (!cq.preserving)
      throw StructureError("effective_observables: channel is not CQ-preserving");
  }
  const int n = R.in_dims().front();
  const int d = quantum_dim(R);
  std::vector<int> marg_dims{n, d};

  EffectiveObservables eo;
  eo.n = n;
  eo.d = d;
  eo.F.assign(n, std::vector<Mat>(n, Mat::Zero(d, d)));
  for (int x = 0; x < n; ++x) {
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        Mat out = R.apply(kron(basis_op(n, x, x), basis_op(d, b, a)));
        Mat marg = partial_trace(out, marg_dims, {0});
        for (int y = 0; y < n; ++y) eo.F[x][y](a, b) = marg(y, y);
      }
    Mat sum = Mat::Zero(d, d);
    for (int y = 0; y < n; ++y) {
      eo.F[x][y] = hermitize(eo.F[x][y]);
      if (min_eigenvalue(eo.F[x][y]) < -kSpectralTol)
        throw StructureError("effective observable is not positive");
      sum += eo.F[x][y];
    }
    if ((sum - Mat::Identity(d, d)).cwiseAbs().maxCoeff() > kSpectralTol)
      throw StructureError("effective observables do not form a POVM");
  }
  return eo;
}

double signalling_bound(const EffectiveObservables& F) {
  double bound = 0.0;
  for (int x = 0; x < F.n; ++x) {
    double spread = 0.0;
    for (int y = 0; y < F.n; ++y) {
      Eigen::SelfAdjointEigenSolver<Mat> es(F.F[x][y], Eigen::EigenvaluesOnly);
      spread += es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
    }
    bound = std::max(bound, 0.5 * spread);
  }
  return bound;
}

Channel build_composite(const Channel& R, const Channel& R_inverse,
                        const ClassicalDistribution& s) {
  require_cq_shape(R);
  const int n = R.in_dims().front();
  const int d = quantum_dim(R);
  if (s.size() != n) throw DimensionError("build_composite: field state has wrong dimension");

  Channel prep = prepend_state_channel(s, {d});                              // S -> GS
  Channel leak = tensor_channels(leak_copy(n), identity_channel({d}));       // GS -> GCS
  Channel to_gsc = permute_channel({n, n, d}, {0, 2, 1});                    // GCS -> GSC
  Channel rinv_c = tensor_channels(R_inverse, identity_channel({n}));       // GSC -> GSC
  Channel drop_g = trace_out_channel({n, d, n}, 0);                          // GSC -> SC

  Channel e = compose(R, prep);
  e = compose(leak, e);
  e = compose(to_gsc, e);
  e = compose(rinv_c, e);
  e = compose(drop_g, e);
  return e;
}

Channel build_composite(const Channel& R, const ClassicalDistribution& s) {
  ReversibilityVerdict v = reversibility(R);
  if (!v.reversible)
    throw StructureError(
        v.witness == IrreversibilityWitness::rank_deficient
            ? "build_composite: interaction is irreversible (rank-deficient transfer)"
            : "build_composite: interaction is irreversible (inverse not completely positive)");
  return build_composite(R, *v.inverse, s);
}

double nondisturbance_residual(const Channel& E) {
  const auto& out_dims = E.out_dims();
  std::vector<int> keep(out_dims.size() - 1);
  std::iota(keep.begin(), keep.end(), 0);
  const int d = E.in_total();
  double worst = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      Mat e = basis_op(d, a, b);
      Mat marg = partial_trace(E.apply(e), out_dims, keep);
      worst = std::max(worst, 0.5 * trace_norm(marg - e));
    }
  return worst;
}

PointerState pointer_state_of(const Channel& E, const std::vector<DensityMatrix>& probes) {
  const auto& out_dims = E.out_dims();
  int pointer = static_cast<int>(out_dims.size()) - 1;
  std::vector<DensityMatrix> use = probes;
  if (use.empty()) use.push_back(DensityMatrix::maximally_mixed(E.in_total()));

  std::vector<ClassicalDistribution> chis;
  for (const DensityMatrix& probe : use) {
    Mat pc = partial_trace(E.apply(probe.mat()), out_dims, {pointer});
    chis.push_back(ClassicalDistribution::from_diagonal(pc));
  }
  double residual = 0.0;
  for (size_t i = 0; i < chis.size(); ++i)
    for (size_t j = i + 1; j < chis.size(); ++j)
      residual = std::max(residual, total_variation(chis[i], chis[j]));
  return {chis.front(), residual};
}

PointerState pointer_state(const Channel& R, const ClassicalDistribution& s,
                           const std::vector<DensityMatrix>& probes) {
  return pointer_state_of(build_composite(R, s), probes);
}

double factorization_residual_of(const Channel& E) {
  const int d = E.in_total();
  PointerState ps = pointer_state_of(E, {DensityMatrix::maximally_mixed(d)});
  Mat chi = ps.chi.as_diagonal();
  double worst = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      Mat e = basis_op(d, a, b);
      worst = std::max(worst, trace_norm(E.apply(e) - kron(e, chi)));
    }
  return worst;
}

double factorization_residual(const Channel& R, const ClassicalDistribution& s) {
  return factorization_residual_of(build_composite(R, s));
}

double sector_factorization_residual(const Channel& R, const SectorDecomposition& sd) {
  EffectiveObservables eo = effective_observables(R, 0, true);
  if (sd.dim != eo.d) throw DimensionError("sector decomposition does not match S");
  double worst = 0.0;
  for (int x = 0; x < eo.n; ++x)
    for (int y = 0; y < eo.n; ++y) {
      Mat b = sd.basis_change.adjoint() * eo.F[x][y] * sd.basis_change;
      Mat approx = Mat::Zero(eo.d, eo.d);
      for (int i = 0; i < sd.sector_count(); ++i) {
        int off = sd.block_offset(i);
        int bd = sd.block_dims[i];
        cplx c = b.block(off, off, bd, bd).trace() / static_cast<double>(bd);
        approx.block(off, off, bd, bd) = c * Mat::Identity(bd, bd);
      }
      worst = std::max(worst, operator_norm(b - approx));
    }
  return worst;
}

StochasticMatrix extract_sector_stochastic(const EffectiveObservables& F,
                                           const SectorDecomposition& sd, int x) {
  RMat sigma(F.n, sd.sector_count());
  for (int y = 0; y < F.n; ++y) {
    Mat b = sd.basis_change.adjoint() * F.F[x][y] * sd.basis_change;
    for (int i = 0; i < sd.sector_count(); ++i) {
      int off = sd.block_offset(i);
      int bd = sd.block_dims[i];
      sigma(y, i) = (b.block(off, off, bd, bd).trace() / static_cast<double>(bd)).real();
    }
  }
  return StochasticMatrix(sigma);
}

ReversibilityVerdict reversibility_on_domain(const Channel& c, const SectorDecomposition& sd,
                                             int classical_factor, double tol) {
  require_cq_shape(c);
  if (classical_factor != 0)
    throw DimensionError("classical register must be the first factor");
  if (sd.sector_count() == 1) return reversibility(c, tol);

  const int n = c.in_dims().front();
  const int d = quantum_dim(c);
  if (sd.dim != d) throw DimensionError("sector decomposition does not match S");
  const int t = n * d;

  // Isometry onto the superselected operator subspace: anything on G tensored
  // with block-diagonal operators on S in the sector basis.
  int sub = 0;
  for (int bd : sd.block_dims) sub += bd * bd;
  sub *= n * n;
  Mat B(t * t, sub);
  int col = 0;
  for (int gx = 0; gx < n; ++gx)
    for (int gy = 0; gy < n; ++gy)
      for (int i = 0; i < sd.sector_count(); ++i) {
        int off = sd.block_offset(i);
        for (int a = 0; a < sd.block_dims[i]; ++a)
          for (int b = 0; b < sd.block_dims[i]; ++b) {
            Mat s_op = sd.basis_change.col(off + a) * sd.basis_change.col(off + b).adjoint();
            Mat op = kron(basis_op(n, gx, gy), s_op);
            B.col(col++) = Eigen::Map<const Vec>(op.data(), op.size());
          }
      }

  Mat transfer = c.transfer();
  ReversibilityVerdict v;
  Mat tb = transfer * B;
  Mat tr = B.adjoint() * tb;  // restricted action
  double invariance = (tb - B * tr).cwiseAbs().maxCoeff();
  if (invariance > 100 * tol) {
    // The interaction leaves the superselected theory; no inverse within it.
    v.reversible = false;
    v.witness = IrreversibilityWitness::rank_deficient;
    v.witness_value = invariance;
    return v;
  }

  Eigen::JacobiSVD<Mat> svd(tr, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > std::max(1e-10, 1e-12 * sv(0))) ++rank;
  v.transfer_rank = rank;
  if (rank < sv.size()) {
    v.reversible = false;
    v.witness = IrreversibilityWitness::rank_deficient;
    v.witness_value = sv(sv.size() - 1);
    Vec lost = B * svd.matrixV().col(sv.size() - 1);
    v.lost_direction = Eigen::Map<const Mat>(lost.data(), t, t);
    return v;
  }

  // Candidate inverse: restricted linear inverse composed with the projection
  // channel onto the domain (sector dephasing on S).
  std::vector<Mat> proj_kraus;
  for (int i = 0; i < sd.sector_count(); ++i)
    proj_kraus.push_back(kron(Mat::Identity(n, n), sd.projector(i)));
  Channel domain_proj = Channel::unchecked(c.in_dims(), c.in_dims(), std::move(proj_kraus));

  Mat tr_inv = tr.partialPivLu().solve(Mat::Identity(sub, sub));
  Mat w = B * tr_inv * B.adjoint() * domain_proj.transfer();
  Mat choi_w = hermitize(transfer_to_choi(w, t, t));
  double min_eig = min_eigenvalue(choi_w);
  if (min_eig < -tol) {
    v.reversible = false;
    v.witness = IrreversibilityWitness::inverse_not_completely_positive;
    v.witness_value = min_eig;
    return v;
  }
  Channel inverse = Channel::unchecked(c.out_dims(), c.in_dims(), choi_to_kraus(choi_w, t, t));
  double identity_residual = (w * transfer * B - B).cwiseAbs().maxCoeff();
  if (inverse.trace_preservation_residual() > 100 * tol || identity_residual > 100 * tol) {
    v.reversible = false;
    v.witness = IrreversibilityWitness::inverse_not_completely_positive;
    v.witness_value = min_eig;
    return v;
  }
  v.reversible = true;
  v.inverse = std::move(inverse);
  return v;
}

TheoremVerdict theorem_report(const Channel& R, const std::vector<Mat>& generators,
                              double tol) {
  require_cq_shape(R);
  SectorDecomposition sd = decompose(generators);
  if (sd.dim != quantum_dim(R))
    throw DimensionError("generators act on the wrong dimension for S");

  TheoremVerdict verdict;
  verdict.cond_i = sd.sector_count() == 1;

  ReversibilityVerdict rv = reversibility_on_domain(R, sd);
  verdict.cond_ii = rv.reversible;
  double rev_residual = rv.reversible ? 0.0 : rv.witness_value;

  EffectiveObservables eo = effective_observables(R, 0, false);
  double sig = signalling_bound(eo);
  verdict.cond_iii = sig > tol;

  CQResidual cq = is_cq_preserving(R, 0);
  verdict.cond_iv = cq.preserving;

  verdict.residuals = {{"signalling_bound", sig},
                       {"reversibility_witness", rev_residual},
                       {"cq_residual", cq.residual},
                       {"sector_count", static_cast<double>(sd.sector_count())}};
  if (!verdict.cond_i) verdict.violated.push_back("i");
  if (!verdict.cond_ii) verdict.violated.push_back("ii");
  if (!verdict.cond_iii) verdict.violated.push_back("iii");
  if (!verdict.cond_iv) verdict.violated.push_back("iv");

  if (verdict.falsified())
    throw TheoremFalsified(
        "all four theorem conditions hold simultaneously; this must never happen");
  return verdict;
}

std::optional<NormalForm> decompose_reversible(const Channel& R, double tol,
                                               double* residual_out) {
  require_cq_shape(R);
  const int n = R.in_dims().front();
  const int d = quantum_dim(R);

  NormalForm nf;
  nf.perm.assign(n, -1);
  std::vector<bool> hit(n, false);
  for (int x = 0; x < n; ++x) {
    Mat out = R.apply(kron(basis_op(n, x, x), Mat::Identity(d, d) / d));
    Mat marg = partial_trace(out, {n, d}, {0});
    int best = 0;
    for (int y = 1; y < n; ++y)
      if (marg(y, y).real() > marg(best, best).real()) best = y;
    if (marg(best, best).real() < 1.0 - 1e-6 || hit[best]) {
      if (residual_out) *residual_out = 1.0 - marg(best, best).real();
      return std::nullopt;
    }
    nf.perm[x] = best;
    hit[best] = true;
  }

  for (int x = 0; x < n; ++x) {
    // Choi of the conditional S -> S action; rank one for a unitary block.
    Mat choi = Mat::Zero(d * d, d * d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        Mat out = R.apply(kron(basis_op(n, x, x), basis_op(d, a, b)));
        Mat block = out.block(nf.perm[x] * d, nf.perm[x] * d, d, d);
        for (int m = 0; m < d; ++m)
          for (int nn = 0; nn < d; ++nn) choi(a * d + m, b * d + nn) = block(m, nn);
      }
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(choi));
    Vec top = std::sqrt(std::max(0.0, es.eigenvalues()(d * d - 1))) *
              es.eigenvectors().col(d * d - 1);
    Mat k(d, d);
    for (int a = 0; a < d; ++a)
      for (int m = 0; m < d; ++m) k(m, a) = top(a * d + m);
    // Polar projection to the nearest unitary.
    Eigen::JacobiSVD<Mat> svd(k, Eigen::ComputeFullU | Eigen::ComputeFullV);
    nf.unitaries.push_back(svd.matrixU() * svd.matrixV().adjoint());
  }

  // The unitaries are recovered up to a phase per classical label, which is
  // unobservable on the CQ domain; compare actions on classically diagonal
  // inputs only.
  Channel rebuilt = ReversibleCQInteraction(n, d, nf.perm, nf.unitaries).to_channel();
  nf.residual = 0.0;
  for (int x = 0; x < n; ++x)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        Mat in = kron(basis_op(n, x, x), basis_op(d, a, b));
        nf.residual = std::max(
            nf.residual, (rebuilt.apply(in) - R.apply(in)).cwiseAbs().maxCoeff());
      }
  if (residual_out) *residual_out = nf.residual;
  if (nf.residual > tol) return std::nullopt;
  return nf;
}

double irreversibility_residual(const Channel& c) {
  const int t = c.in_total();
  if (t != c.out_total()) throw DimensionError("irreversibility_residual: non-square map");
  Mat transfer = c.transfer();
  Eigen::FullPivLU<Mat> lu(transfer);
  lu.setThreshold(1e-10);
  if (!lu.isInvertible()) return 10.0;
  Mat inv = lu.inverse();
  Mat choi = hermitize(transfer_to_choi(inv, t, t));
  // Trace-preservation defect of the inverse.
  Mat marg = Mat::Zero(t, t);
  for (int a = 0; a < t; ++a)
    for (int b = 0; b < t; ++b) {
      cplx s = 0.0;
      for (int m = 0; m < t; ++m) s += choi(a * t + m, b * t + m);
      marg(a, b) = s;
    }
  double defect = (marg - Mat::Identity(t, t)).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Mat> es(choi, Eigen::EigenvaluesOnly);
  double negativity = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    negativity += std::max(0.0, -es.eigenvalues()(i));
  return defect + negativity;
}

namespace {

// Unconstrained chart onto CQ channels: one square-root factor per classical
// (input, output) pair, normalized per input to trace preservation.
struct SearchChart {
  int n, d;
  int block = 0;       // complex entries per factor
  int per_pair = 0;    // real params per (x, y)

  explicit SearchChart(int n_, int d_) : n(n_), d(d_) {
    block = d * d * d * d;
    per_pair = 2 * block;
  }
  int size() const { return n * n * per_pair; }

  std::vector<std::vector<Mat>> choi_blocks(const std::vector<double>& p) const {
    std::vector<std::vector<Mat>> blocks(n, std::vector<Mat>(n));
    for (int x = 0; x < n; ++x) {
      Mat m_x = Mat::Zero(d, d);
      for (int y = 0; y < n; ++y) {
        Mat a(d * d, d * d);
        const double* base = p.data() + (x * n + y) * per_pair;
        for (int i = 0; i < block; ++i)
          a(i / (d * d), i % (d * d)) = cplx(base[2 * i], base[2 * i + 1]);
        Mat c = a.adjoint() * a;
        blocks[x][y] = c;
        for (int aa = 0; aa < d; ++aa)
          for (int bb = 0; bb < d; ++bb) {
            cplx s = 0.0;
            for (int m = 0; m < d; ++m) s += c(aa * d + m, bb * d + m);
            m_x(aa, bb) += s;
          }
      }
      Mat s = inverse_sqrt(hermitize(m_x) + 1e-12 * Mat::Identity(d, d));
      Mat conj = kron(s, Mat::Identity(d, d));
      for (int y = 0; y < n; ++y) blocks[x][y] = conj.adjoint() * blocks[x][y] * conj;
    }
    return blocks;
  }

  Mat full_choi(const std::vector<std::vector<Mat>>& blocks) const {
    const int t = n * d;
    Mat choi = Mat::Zero(t * t, t * t);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b)
            for (int m = 0; m < d; ++m)
              for (int nn = 0; nn < d; ++nn) {
                int in_r = x * d + a, out_r = y * d + m;
                int in_c = x * d + b, out_c = y * d + nn;
                choi(in_r * t + out_r, in_c * t + out_c) =
                    blocks[x][y](a * d + m, b * d + nn);
              }
    return choi;
  }

  double signalling(const std::vector<std::vector<Mat>>& blocks) const {
    double bound = 0.0;
    for (int x = 0; x < n; ++x) {
      double spread = 0.0;
      for (int y = 0; y < n; ++y) {
        Mat f(d, d);
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) {
            cplx s = 0.0;
            for (int m = 0; m < d; ++m) s += blocks[x][y](a * d + m, b * d + m);
            f(a, b) = std::conj(s);
          }
        Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(f), Eigen::EigenvaluesOnly);
        spread += es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
      }
      bound = std::max(bound, 0.5 * spread);
    }
    return bound;
  }

  // Irreversibility within the hybrid CQ theory: the channel is classically
  // controlled, so its natural domain is the classically-diagonal operator
  // subspace (dimension n d^2). On the full quantum operator space every such
  // channel kills classical coherences and is trivially singular; the
  // restricted transfer is the one a physical inverse would have to invert.
  double irreversibility(const std::vector<std::vector<Mat>>& blocks) const {
    const int dd = d * d;
    Mat transfer(n * dd, n * dd);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        transfer.block(y * dd, x * dd, dd, dd) = choi_to_transfer(blocks[x][y], d, d);
    Eigen::FullPivLU<Mat> lu(transfer);
    lu.setThreshold(1e-10);
    if (!lu.isInvertible()) return 10.0;
    Mat inv = lu.inverse();
    // The inverse is again classically controlled: block (x, y) of inv is the
    // sub-map taking classical input y to classical output x.
    double defect = 0.0, negativity = 0.0;
    for (int y = 0; y < n; ++y) {
      Mat marg = Mat::Zero(d, d);
      for (int x = 0; x < n; ++x) {
        Mat choi = hermitize(transfer_to_choi(inv.block(x * dd, y * dd, dd, dd), d, d));
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b)
            for (int m = 0; m < d; ++m) marg(a, b) += choi(a * d + m, b * d + m);
        Eigen::SelfAdjointEigenSolver<Mat> es(choi, Eigen::EigenvaluesOnly);
        for (int i = 0; i < es.eigenvalues().size(); ++i)
          negativity += std::max(0.0, -es.eigenvalues()(i));
      }
      defect = std::max(defect, (marg - Mat::Identity(d, d)).cwiseAbs().maxCoeff());
    }
    return defect + negativity;
  }

  /// Parameters reproducing a given reversible interaction exactly.
  std::vector<double> seed_at(const ReversibleCQInteraction& r) const {
    std::vector<double> p(size(), 0.0);
    for (int x = 0; x < n; ++x) {
      Vec v(d * d);
      for (int a = 0; a < d; ++a)
        for (int m = 0; m < d; ++m) v(a * d + m) = r.unitaries[x](m, a);
      Mat a_mat = (v * v.adjoint()) / v.norm();
      double* base = p.data() + (x * n + r.perm[x]) * per_pair;
      for (int i = 0; i < block; ++i) {
        base[2 * i] = a_mat(i / (d * d), i % (d * d)).real();
        base[2 * i + 1] = a_mat(i / (d * d), i % (d * d)).imag();
      }
    }
    return p;
  }
};

}  // namespace

SearchResult adversarial_search(int n, int d, int restarts, double penalty,
                                std::uint64_t seed, int iterations) {
  if (n < 2 || d < 2) throw DimensionError("adversarial_search: need n, d >= 2");
  SearchChart chart(n, d);
  SearchResult result;
  result.best_objective = -1e300;

  const double constrained_cut = 1e-8;
  for (int restart = 0; restart < restarts; ++restart) {
    Rng rng(mix_seed(seed, restart));
    std::vector<double> p(chart.size());
    if (restart % 2 == 1) {
      p = chart.seed_at(ReversibleCQInteraction::random(rng, n, d));
    } else {
      std::normal_distribution<double> g(0.0, 0.5);
      for (double& v : p) v = g(rng);
    }

    auto evaluate = [&](const std::vector<double>& params, double& sig, double& irr) {
      auto blocks = chart.choi_blocks(params);
      sig = chart.signalling(blocks);
      irr = chart.irreversibility(blocks);
      if (irr <= constrained_cut)
        result.constrained_signalling = std::max(result.constrained_signalling, sig);
      return sig - penalty * irr;
    };

    double sig, irr;
    double best = evaluate(p, sig, irr);
    double best_sig = sig, best_irr = irr;

    std::vector<int> order(chart.size());
    std::iota(order.begin(), order.end(), 0);
    const double scales[3] = {0.5, 0.1, 0.02};
    int per_scale = std::max(1, iterations / 3);
    for (double scale : scales) {
      double step = scale;
      for (int it = 0; it < per_scale; ++it) {
        std::shuffle(order.begin(), order.end(), rng);
        bool improved = false;
        for (int idx : order) {
          for (double dir : {step, -step}) {
            double saved = p[idx];
            p[idx] += dir;
            double obj = evaluate(p, sig, irr);
            if (obj > best + 1e-12) {
              best = obj;
              best_sig = sig;
              best_irr = irr;
              improved = true;
              break;
            }
            p[idx] = saved;
          }
          if (improved) break;
        }
        if (!improved) {
          step *= 0.5;
          if (step < scale / 16) break;
        }
      }
    }
    result.trace.push_back(best);
    if (best > result.best_objective) {
      result.best_objective = best;
      result.best_signalling = best_sig;
      result.best_irreversibility = best_irr;
    }
  }
  return result;
}

CampaignReport run_campaign(const std::vector<std::pair<int, int>>& dims, int samples,
                            std::uint64_t seed, int threads) {
  CampaignReport report;
  report.samples = samples;
  report.seed = seed;
  if (samples == 0 || dims.empty()) return report;

  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, samples));

  std::vector<CampaignReport> partial(threads);
  auto worker = [&](int tid) {
    CampaignReport& local = partial[tid];
    for (int idx = tid; idx < samples; idx += threads) {
      Rng rng(mix_seed(seed, idx));
      auto [n, d] = dims[idx % dims.size()];
      ReversibleCQInteraction r = ReversibleCQInteraction::random(rng, n, d);
      Channel R = r.to_channel();
      Channel R_inv = r.inverted().to_channel();

      std::uniform_real_distribution<double> u(0.1, 1.0);
      RVec w(n);
      for (int x = 0; x < n; ++x) w(x) = u(rng);
      ClassicalDistribution s(w / w.sum());

      double sig = signalling_bound(effective_observables(R, 0, false));
      local.max_signalling = std::max(local.max_signalling, sig);
      if (sig > 1e-6) {
        local.falsification_triggered = true;
        local.failure_detail = "signalling bound " + std::to_string(sig) +
                               " for reversible CQ interaction, sample " + std::to_string(idx);
        return;
      }

      Channel E = build_composite(R, R_inv, s);
      local.max_nondisturbance = std::max(local.max_nondisturbance, nondisturbance_residual(E));

      std::vector<DensityMatrix> probes{DensityMatrix::maximally_mixed(d),
                                        DensityMatrix::basis_state(d, 0),
                                        DensityMatrix(random_density(rng, d))};
      PointerState ps = pointer_state_of(E, probes);
      local.max_pointer_independence =
          std::max(local.max_pointer_independence, ps.independence_residual);

      local.max_factorization =
          std::max(local.max_factorization, factorization_residual_of(E));
    }
  };

  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
  for (auto& th : pool) th.join();

  for (const CampaignReport& local : partial) {
    report.max_signalling = std::max(report.max_signalling, local.max_signalling);
    report.max_nondisturbance = std::max(report.max_nondisturbance, local.max_nondisturbance);
    report.max_pointer_independence =
        std::max(report.max_pointer_independence, local.max_pointer_independence);
    report.max_factorization = std::max(report.max_factorization, local.max_factorization);
    if (local.falsification_triggered && !report.falsification_triggered) {
      report.falsification_triggered = true;
      report.failure_detail = local.failure_detail;
    }
  }
  return report;
}

}  // namespace hybrid
