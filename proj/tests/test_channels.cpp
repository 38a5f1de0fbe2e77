#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hybrid/channel.hpp"

using namespace hybrid;

namespace {

Mat pauli(int which) {
  Mat p = Mat::Zero(2, 2);
  switch (which) {
    case 0: p = Mat::Identity(2, 2); break;
    case 1: p(0, 1) = 1; p(1, 0) = 1; break;
    case 2: p(0, 1) = cplx(0, -1); p(1, 0) = cplx(0, 1); break;
    default: p(0, 0) = 1; p(1, 1) = -1; break;
  }
  return p;
}

double max_action_difference(const Channel& a, const Channel& b) {
  return (a.transfer() - b.transfer()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("channel construction enforces trace preservation") {
  std::vector<Mat> bad{0.5 * Mat::Identity(2, 2)};
  CHECK_THROWS_AS(Channel({2}, {2}, bad), StructureError);
  CHECK_NOTHROW(Channel::unchecked({2}, {2}, bad));
}

TEST_CASE("identity channel leaves states untouched") {
  Rng rng(3);
  Channel id = identity_channel({2, 3});
  Mat rho = random_density(rng, 6);
  CHECK((id.apply(rho) - rho).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("entangling CNOT creates the entangled branch state") {
  FixtureSet f = fixtures();
  double alpha = 0.6, beta = 0.8;
  Vec psi(2);
  psi << alpha, beta;
  Mat in = kron(DensityMatrix::basis_state(2, 0).mat(), Mat(psi * psi.adjoint()));
  Mat out = f.entangling_cnot.apply(in);

  // Expected alpha|00> + beta|11> on [G, S].
  Vec want = Vec::Zero(4);
  want(0) = alpha;
  want(3) = beta;
  CHECK((out - Mat(want * want.adjoint())).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("decohered CNOT yields the classical mixture of Example-style branches") {
  FixtureSet f = fixtures();
  double alpha = 0.6, beta = 0.8;
  Vec psi(2);
  psi << alpha, beta;
  Mat in = kron(DensityMatrix::basis_state(2, 0).mat(), Mat(psi * psi.adjoint()));
  Mat out = f.decohered_cnot.apply(in);
  Mat want = Mat::Zero(4, 4);
  want(0, 0) = alpha * alpha;
  want(3, 3) = beta * beta;
  CHECK((out - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("compose with the identity is neutral") {
  FixtureSet f = fixtures();
  Channel id = identity_channel({2, 2});
  CHECK(max_action_difference(compose(id, f.decohered_cnot), f.decohered_cnot) < 1e-12);
  CHECK(max_action_difference(compose(f.decohered_cnot, id), f.decohered_cnot) < 1e-12);
}

TEST_CASE("compose agrees with sequential application") {
  Rng rng(7);
  FixtureSet f = fixtures();
  Channel deph = dephase_channel({2, 2}, 0);
  Channel chain = compose(deph, f.entangling_cnot);
  for (int trial = 0; trial < 5; ++trial) {
    Mat rho = random_density(rng, 4);
    Mat direct = deph.apply(f.entangling_cnot.apply(rho));
    CHECK((chain.apply(rho) - direct).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("inverse of a reversible interaction composes to the identity") {
  Rng rng(13);
  for (auto [n, d] : {std::pair{2, 2}, std::pair{3, 3}}) {
    ReversibleCQInteraction r = ReversibleCQInteraction::random(rng, n, d);
    Channel round = compose(r.inverted().to_channel(), r.to_channel());
    CHECK(max_action_difference(round, identity_channel({n, d})) < 1e-10);
  }
}

TEST_CASE("decohered CNOT equals dephase-CNOT-dephase built by composition") {
  FixtureSet f = fixtures();
  Channel deph = dephase_channel({2, 2}, 0);
  Channel built = compose(deph, compose(f.entangling_cnot, deph));
  CHECK((built.choi() - f.decohered_cnot.choi()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("choi of the identity qubit channel is the unnormalized entangled projector") {
  Channel id = identity_channel({2});
  Mat choi = id.choi();
  // C[(i,m),(j,n)] = delta_im delta_jn; trace 2; rank 1.
  Vec v = Vec::Zero(4);
  v(0) = 1.0;
  v(3) = 1.0;
  CHECK((choi - Mat(v * v.adjoint())).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(std::abs(choi.trace().real() - 2.0) < 1e-14);
}

TEST_CASE("choi of the fully depolarizing qubit channel is maximally mixed") {
  std::vector<Mat> kraus;
  for (int p = 0; p < 4; ++p) kraus.push_back(0.5 * pauli(p));
  Channel depol({2}, {2}, kraus);
  CHECK((depol.choi() - 0.5 * Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("decohered CNOT choi has four unit eigenvalues") {
  FixtureSet f = fixtures();
  Eigen::SelfAdjointEigenSolver<Mat> es(f.decohered_cnot.choi(), Eigen::EigenvaluesOnly);
  RVec vals = es.eigenvalues();
  for (int i = 0; i < 12; ++i) CHECK(std::abs(vals(i)) < 1e-12);
  for (int i = 12; i < 16; ++i) CHECK(vals(i) == doctest::Approx(1.0));
}

TEST_CASE("cq preservation classifies the fixtures") {
  FixtureSet f = fixtures();
  CQResidual dec = is_cq_preserving(f.decohered_cnot, 0);
  CHECK(dec.preserving);
  CHECK(dec.residual < 1e-12);

  Rng rng(19);
  ReversibleCQInteraction r = ReversibleCQInteraction::random(rng, 2, 3);
  CHECK(is_cq_preserving(r.to_channel(), 0).preserving);

  CQResidual ent = is_cq_preserving(f.entangling_cnot, 0);
  CHECK_FALSE(ent.preserving);
  CHECK(ent.residual >= 0.4);
}

TEST_CASE("reversibility returns the normal-form inverse for reversible interactions") {
  Rng rng(29);
  ReversibleCQInteraction r = ReversibleCQInteraction::random(rng, 3, 2);
  ReversibilityVerdict v = reversibility(r.to_channel());
  REQUIRE(v.reversible);
  CHECK(max_action_difference(*v.inverse, r.inverted().to_channel()) < 1e-9);
  Channel round = compose(*v.inverse, r.to_channel());
  CHECK(max_action_difference(round, identity_channel({3, 2})) < 1e-9);
}

TEST_CASE("decohered CNOT is irreversible with a rank-deficient transfer") {
  FixtureSet f = fixtures();
  ReversibilityVerdict v = reversibility(f.decohered_cnot);
  CHECK_FALSE(v.reversible);
  CHECK(v.witness == IrreversibilityWitness::rank_deficient);
  // The transfer keeps only the (s = s', g = g') directions: rank 4 of 16.
  CHECK(v.transfer_rank == 4);
  CHECK(v.lost_direction.rows() == 4);
}

TEST_CASE("half-depolarizing qubit channel has a non-physical inverse") {
  std::vector<Mat> kraus{std::sqrt(5.0 / 8.0) * pauli(0)};
  for (int p = 1; p < 4; ++p) kraus.push_back(std::sqrt(1.0 / 8.0) * pauli(p));
  Channel depol({2}, {2}, kraus);
  ReversibilityVerdict v = reversibility(depol);
  CHECK_FALSE(v.reversible);
  CHECK(v.witness == IrreversibilityWitness::inverse_not_completely_positive);
  CHECK(v.witness_value < -0.1);
}

TEST_CASE("leak copy duplicates classical labels and is non-disturbing") {
  Channel leak = leak_copy(2);
  RVec w(2);
  w << 0.3, 0.7;
  Mat in = ClassicalDistribution(w).as_diagonal();
  Mat out = leak.apply(in);
  CHECK(out.rows() == 4);
  CHECK(out(0, 0).real() == doctest::Approx(0.3));  // (0, 0) pair
  CHECK(out(3, 3).real() == doctest::Approx(0.7));  // (1, 1) pair
  CHECK(std::abs(out(1, 1)) + std::abs(out(2, 2)) < 1e-14);
  // Tracing out the copy is the identity on G.
  Mat marg = partial_trace(out, {2, 2}, {0});
  CHECK((marg - in).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("leak copy degenerate and larger cases") {
  Channel leak1 = leak_copy(1);
  Mat out1 = leak1.apply(Mat::Identity(1, 1));
  CHECK(out1.rows() == 1);
  CHECK(out1(0, 0).real() == doctest::Approx(1.0));

  Channel leak3 = leak_copy(3);
  Mat out3 = leak3.apply(ClassicalDistribution::uniform(3).as_diagonal());
  for (int x = 0; x < 3; ++x)
    CHECK(out3(x * 3 + x, x * 3 + x).real() == doctest::Approx(1.0 / 3.0));
  Mat copy_marg = partial_trace(out3, {3, 3}, {1});
  CHECK((copy_marg - ClassicalDistribution::uniform(3).as_diagonal()).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("sector measurement writes the block label into the classical register") {
  FixtureSet f = fixtures();
  Rng rng(37);
  // Block-diagonal state with weights (w, 1 - w) on the 1 + 3 split.
  double w = 0.25;
  Mat rho3 = random_density(rng, 3);
  Mat rho_s = Mat::Zero(4, 4);
  rho_s(0, 0) = w;
  rho_s.block(1, 1, 3, 3) = (1 - w) * rho3;
  Mat in = kron(DensityMatrix::basis_state(2, 0).mat(), rho_s);
  Mat out = f.sector_measurement.apply(in);

  // Expected sum_i |i><i|_G (x) w_i rho_i.
  Mat want = Mat::Zero(8, 8);
  want(0, 0) = w;
  want.block(4 + 1, 4 + 1, 3, 3) = (1 - w) * rho3;
  CHECK((out - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("every fixture passes the cptp checks") {
  FixtureSet f = fixtures();
  for (const Channel* c : {&f.entangling_cnot, &f.decohered_cnot, &f.sector_measurement}) {
    CHECK(c->trace_preservation_residual() < 1e-9);
    CHECK(min_eigenvalue(c->choi()) > -1e-9);
  }
}

TEST_CASE("canonicalization minimizes the kraus count and preserves the action") {
  FixtureSet f = fixtures();
  // Pad with redundant Kraus operators via composition with the identity.
  Channel padded = compose(identity_channel({2, 2}), f.decohered_cnot);
  Channel canon = padded.canonicalized();
  CHECK(canon.kraus().size() == 4);
  CHECK(max_action_difference(canon, f.decohered_cnot) < 1e-12);
}

TEST_CASE("choi and transfer reshuffles are mutually inverse") {
  Rng rng(43);
  ReversibleCQInteraction r = ReversibleCQInteraction::random(rng, 2, 2);
  Channel c = r.to_channel();
  Mat choi = c.choi();
  Mat transfer = c.transfer();
  CHECK((choi_to_transfer(choi, 4, 4) - transfer).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((transfer_to_choi(transfer, 4, 4) - choi).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("application through the choi contraction matches the kraus action") {
  Rng rng(47);
  for (int trial = 0; trial < 5; ++trial) {
    ReversibleCQInteraction r = ReversibleCQInteraction::random(rng, 2, 3);
    Channel c = r.to_channel();
    Mat rho = random_density(rng, 6);
    const Mat& choi = c.choi();
    Mat out = Mat::Zero(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        out += rho(i, j) * choi.block(i * 6, j * 6, 6, 6);
    CHECK((out - c.apply(rho)).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("tensor and permutation channels act as expected") {
  Rng rng(53);
  Mat a = random_density(rng, 2), b = random_density(rng, 3);
  Channel both = tensor_channels(identity_channel({2}), identity_channel({3}));
  CHECK((both.apply(kron(a, b)) - kron(a, b)).cwiseAbs().maxCoeff() < 1e-13);

  Channel swap = permute_channel({2, 3}, {1, 0});
  CHECK((swap.apply(kron(a, b)) - kron(b, a)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("stochastic matrices validate column sums") {
  RMat good(2, 2);
  good << 0.25, 1.0, 0.75, 0.0;
  StochasticMatrix sigma(good);
  ClassicalDistribution out = sigma.apply(ClassicalDistribution::point(2, 0));
  CHECK(out[0] == doctest::Approx(0.25));
  CHECK(out[1] == doctest::Approx(0.75));

  RMat bad(2, 2);
  bad << 0.5, 1.0, 0.4, 0.0;
  CHECK_THROWS_AS(StochasticMatrix{bad}, StructureError);
}

TEST_CASE("reversible interactions validate their parts") {
  std::vector<Mat> us{Mat::Identity(2, 2), Mat::Identity(2, 2)};
  CHECK_THROWS_AS(ReversibleCQInteraction(2, 2, {0, 0}, us), StructureError);
  std::vector<Mat> nonunitary{Mat::Identity(2, 2), 0.5 * Mat::Identity(2, 2)};
  CHECK_THROWS_AS(ReversibleCQInteraction(2, 2, {0, 1}, nonunitary), StructureError);
}
