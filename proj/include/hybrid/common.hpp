#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace hybrid {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

// Tolerance tiering: structural checks, spectral checks, map-equality residuals.
inline constexpr double kStructTol = 1e-10;
inline constexpr double kSpectralTol = 1e-9;
inline constexpr double kMapTol = 1e-9;

// Dense eigensolves stay sub-second up to this composite dimension.
inline constexpr int kMaxCompositeDim = 4096;

struct DimensionError : std::runtime_error {
  explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

struct SizeError : std::runtime_error {
  explicit SizeError(const std::string& what) : std::runtime_error(what) {}
};

struct StructureError : std::runtime_error {
  explicit StructureError(const std::string& what) : std::runtime_error(what) {}
};

struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

Mat kron(const Mat& a, const Mat& b);

// Sum of singular values.
double trace_norm(const Mat& m);

// Largest singular value.
double operator_norm(const Mat& m);

inline double hermiticity_residual(const Mat& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline Mat hermitize(const Mat& m) { return 0.5 * (m + m.adjoint()); }

inline cplx hs_inner(const Mat& a, const Mat& b) {
  return (a.adjoint() * b).trace();
}

double min_eigenvalue(const Mat& hermitian);

// Composite index over ordered factor dims, leftmost factor major.
inline int composite_index(const std::vector<int>& dims, const std::vector<int>& idx) {
  int r = 0;
  for (size_t f = 0; f < dims.size(); ++f) r = r * dims[f] + idx[f];
  return r;
}

inline int total_dim(const std::vector<int>& dims) {
  int t = 1;
  for (int d : dims) {
    if (d < 1) throw DimensionError("factor dimension must be >= 1");
    t *= d;
  }
  return t;
}

// Deterministic per-task seed derivation (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t task) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (task + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

Mat random_ginibre(Rng& rng, int rows, int cols);
Mat random_unitary(Rng& rng, int dim);
Mat random_hermitian(Rng& rng, int dim);
Mat random_density(Rng& rng, int dim);

}  // namespace hybrid
