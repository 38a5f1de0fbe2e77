#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hybrid/channel.hpp"
#include "hybrid/states.hpp"

using namespace hybrid;

namespace {

Mat bell_state() {
  Vec v = Vec::Zero(4);
  v(0) = 1.0 / std::sqrt(2.0);
  v(3) = 1.0 / std::sqrt(2.0);
  return v * v.adjoint();
}

// Independent index-contraction oracle for the partial trace.
Mat partial_trace_oracle(const Mat& m, const std::vector<int>& dims,
                         const std::vector<int>& keep) {
  const int nf = static_cast<int>(dims.size());
  std::vector<bool> kept(nf, false);
  for (int k : keep) kept[k] = true;
  int out = 1;
  for (int f = 0; f < nf; ++f)
    if (kept[f]) out *= dims[f];
  Mat r = Mat::Zero(out, out);
  int total = 1;
  for (int d : dims) total *= d;
  auto split = [&](int idx) {
    std::vector<int> parts(nf);
    for (int f = nf - 1; f >= 0; --f) {
      parts[f] = idx % dims[f];
      idx /= dims[f];
    }
    return parts;
  };
  auto kept_index = [&](const std::vector<int>& parts) {
    int v = 0;
    for (int f = 0; f < nf; ++f)
      if (kept[f]) v = v * dims[f] + parts[f];
    return v;
  };
  for (int i = 0; i < total; ++i)
    for (int j = 0; j < total; ++j) {
      auto pi = split(i), pj = split(j);
      bool diag = true;
      for (int f = 0; f < nf; ++f)
        if (!kept[f] && pi[f] != pj[f]) diag = false;
      if (diag) r(kept_index(pi), kept_index(pj)) += m(i, j);
    }
  return r;
}

}  // namespace

TEST_CASE("density matrix construction enforces invariants") {
  CHECK_NOTHROW(DensityMatrix::maximally_mixed(3));
  CHECK_NOTHROW(DensityMatrix::basis_state(4, 2));

  Mat bad = Mat::Zero(2, 2);
  bad(0, 1) = 1.0;  // not Hermitian
  bad(0, 0) = 1.0;
  CHECK_THROWS_AS(DensityMatrix{bad}, StructureError);

  Mat neg = Mat::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;  // negative eigenvalue
  CHECK_THROWS_AS(DensityMatrix{neg}, StructureError);

  Mat off_trace = Mat::Identity(2, 2);  // trace 2
  CHECK_THROWS_AS(DensityMatrix{off_trace}, StructureError);
}

TEST_CASE("classical distribution clamps tiny negatives and rejects the rest") {
  RVec w(2);
  w << 1.0 + 5e-13, -5e-13;
  ClassicalDistribution p(w);
  CHECK(p[1] == 0.0);

  RVec bad(2);
  bad << 1.1, -0.1;
  CHECK_THROWS_AS(ClassicalDistribution{bad}, StructureError);

  RVec off(2);
  off << 0.7, 0.2;  // sums to 0.9
  CHECK_THROWS_AS(ClassicalDistribution{off}, StructureError);
}

TEST_CASE("tensor of basis states is the composite basis state") {
  DensityMatrix a = DensityMatrix::basis_state(2, 0);
  DensityMatrix t = tensor(a, a);
  CHECK((t.mat() - DensityMatrix::basis_state(4, 0).mat()).cwiseAbs().maxCoeff() ==
        doctest::Approx(0.0));
}

TEST_CASE("tensor with the maximally mixed state has the original marginal") {
  Rng rng(11);
  DensityMatrix rho(random_density(rng, 3));
  DensityMatrix joint = tensor(rho, DensityMatrix::maximally_mixed(4));
  DensityMatrix back = partial_trace(joint, {3, 4}, {0});
  CHECK((back.mat() - rho.mat()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("tensor of a plus state with a basis state fills the expected block") {
  Vec plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  DensityMatrix t = tensor(DensityMatrix::pure(plus), DensityMatrix::basis_state(2, 0));
  // Nonzero entries 1/2 on the {00, 10} x {00, 10} block.
  CHECK(t.mat()(0, 0).real() == doctest::Approx(0.5));
  CHECK(t.mat()(0, 2).real() == doctest::Approx(0.5));
  CHECK(t.mat()(2, 0).real() == doctest::Approx(0.5));
  CHECK(t.mat()(2, 2).real() == doctest::Approx(0.5));
  CHECK(std::abs(t.mat()(1, 1)) == doctest::Approx(0.0));
  CHECK(std::abs(t.mat()(3, 3)) == doctest::Approx(0.0));
}

TEST_CASE("tensor rejects composites beyond the configured maximum") {
  DensityMatrix big = DensityMatrix::maximally_mixed(70);
  CHECK_THROWS_AS(tensor(big, big), SizeError);
}

TEST_CASE("partial trace of a product state recovers the factors") {
  Rng rng(5);
  DensityMatrix a(random_density(rng, 2)), b(random_density(rng, 3));
  DensityMatrix joint = tensor(a, b);
  CHECK((partial_trace(joint, {2, 3}, {0}).mat() - a.mat()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((partial_trace(joint, {2, 3}, {1}).mat() - b.mat()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial trace of the Bell state is maximally mixed") {
  Mat marg = partial_trace(bell_state(), {2, 2}, {0});
  CHECK((marg - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial trace agrees with the index-contraction oracle") {
  Rng rng(17);
  std::vector<std::vector<int>> shapes{{2, 2}, {3, 2}, {2, 3}, {4, 3}, {2, 2, 2}, {4, 4}};
  for (const auto& dims : shapes) {
    int total = 1;
    for (int d : dims) total *= d;
    Mat rho = random_density(rng, total);
    for (size_t keep = 0; keep < dims.size(); ++keep) {
      Mat got = partial_trace(rho, dims, {static_cast<int>(keep)});
      Mat want = partial_trace_oracle(rho, dims, {static_cast<int>(keep)});
      CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(std::abs(got.trace().real() - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("partial trace validates factor dimensions") {
  Rng rng(1);
  Mat rho = random_density(rng, 4);
  CHECK_THROWS_AS(partial_trace(rho, {3, 2}, {0}), DimensionError);
}

TEST_CASE("dephasing a uniform superposition yields the uniform mixture") {
  Vec plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  Mat out = dephase(DensityMatrix::pure(plus).mat(), {2}, 0);
  CHECK((out - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dephase is idempotent") {
  Rng rng(23);
  Mat rho = random_density(rng, 6);
  Mat once = dephase(rho, {2, 3}, 0);
  Mat twice = dephase(once, {2, 3}, 0);
  CHECK((once - twice).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dephasing the entangled CNOT output leaves the classical mixture") {
  // alpha|00> + beta|11> dephased on either factor drops the coherences.
  double alpha = 0.6, beta = 0.8;
  Vec v = Vec::Zero(4);
  v(0) = alpha;
  v(3) = beta;
  Mat out = dephase(Mat(v * v.adjoint()), {2, 2}, 0);
  Mat want = Mat::Zero(4, 4);
  want(0, 0) = alpha * alpha;
  want(3, 3) = beta * beta;
  CHECK((out - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("trace distance basics") {
  DensityMatrix z0 = DensityMatrix::basis_state(2, 0);
  DensityMatrix z1 = DensityMatrix::basis_state(2, 1);
  Vec plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  DensityMatrix p = DensityMatrix::pure(plus);

  CHECK(trace_distance(z0, z0) == doctest::Approx(0.0));
  CHECK(trace_distance(z0, z1) == doctest::Approx(1.0));
  CHECK(trace_distance(z0, p) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(trace_distance(z0, p) == doctest::Approx(trace_distance(p, z0)));
  CHECK_THROWS_AS(trace_distance(z0, DensityMatrix::maximally_mixed(3)), DimensionError);
}

TEST_CASE("trace distance contracts under channels") {
  Rng rng(31);
  Channel deph = dephase_channel({2, 2}, 0);
  for (int trial = 0; trial < 20; ++trial) {
    DensityMatrix a(random_density(rng, 4)), b(random_density(rng, 4));
    CHECK(trace_distance(deph.apply(a), deph.apply(b)) <=
          trace_distance(a, b) + 1e-9);
  }
}

TEST_CASE("total variation basics") {
  ClassicalDistribution p0 = ClassicalDistribution::point(2, 0);
  ClassicalDistribution p1 = ClassicalDistribution::point(2, 1);
  RVec w(2), v(2);
  w << 0.5, 0.5;
  v << 0.75, 0.25;
  CHECK(total_variation(p0, p0) == doctest::Approx(0.0));
  CHECK(total_variation(p0, p1) == doctest::Approx(1.0));
  CHECK(total_variation(ClassicalDistribution(w), ClassicalDistribution(v)) ==
        doctest::Approx(0.25));
  CHECK_THROWS_AS(total_variation(p0, ClassicalDistribution::uniform(3)), DimensionError);
}

TEST_CASE("cq state embeds and extracts without loss") {
  Rng rng(41);
  std::vector<std::pair<double, DensityMatrix>> branches;
  branches.emplace_back(0.3, DensityMatrix(random_density(rng, 3)));
  branches.emplace_back(0.7, DensityMatrix(random_density(rng, 3)));
  CQState cq(2, 3, branches);

  DensityMatrix rho = cq.embed();
  // Embedded state is invariant under classical dephasing.
  CHECK((dephase(rho.mat(), {2, 3}, 0) - rho.mat()).cwiseAbs().maxCoeff() < 1e-12);

  CQState back = CQState::extract(rho, 2, 3);
  for (int x = 0; x < 2; ++x) {
    CHECK(back.branches()[x].first == doctest::Approx(branches[x].first));
    CHECK((back.branches()[x].second.mat() - branches[x].second.mat())
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
  CHECK(back.marginal()[0] == doctest::Approx(0.3));
}

TEST_CASE("cq extraction rejects states with classical coherence") {
  DensityMatrix bell{bell_state()};
  CHECK_THROWS_AS(CQState::extract(bell, 2, 2), StructureError);
}
