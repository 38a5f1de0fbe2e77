#pragma once

#include <utility>
#include <vector>

#include "hybrid/common.hpp"

namespace hybrid {

/// Density operator on a d-dimensional system. Construction enforces
/// Hermiticity, positivity and unit trace; all values are immutable.
class DensityMatrix {
 public:
  explicit DensityMatrix(Mat entries);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& mat() const { return m_; }

  static DensityMatrix pure(const Vec& amplitudes);
  static DensityMatrix basis_state(int dim, int index);
  static DensityMatrix maximally_mixed(int dim);

 private:
  Mat m_;
};

/// Point in the n-vertex probability simplex. Weights in (-1e-12, 0) are
/// clamped to zero on construction; anything more negative is rejected.
class ClassicalDistribution {
 public:
  explicit ClassicalDistribution(RVec weights);

  int size() const { return static_cast<int>(w_.size()); }
  const RVec& weights() const { return w_; }
  double operator[](int i) const { return w_(i); }

  Mat as_diagonal() const;
  static ClassicalDistribution point(int n, int index);
  static ClassicalDistribution uniform(int n);
  static ClassicalDistribution from_diagonal(const Mat& diagonal_density);

 private:
  RVec w_;
};

/// Classical-quantum joint state sum_x p(x) |x><x| (x) rho(x), classical
/// factor first.
class CQState {
 public:
  CQState(int n, int d, std::vector<std::pair<double, DensityMatrix>> branches);

  int classical_dim() const { return n_; }
  int quantum_dim() const { return d_; }
  const std::vector<std::pair<double, DensityMatrix>>& branches() const { return branches_; }

  ClassicalDistribution marginal() const;
  DensityMatrix embed() const;
  static CQState extract(const DensityMatrix& rho, int n, int d);

 private:
  int n_;
  int d_;
  std::vector<std::pair<double, DensityMatrix>> branches_;
};

enum class SystemKind { classical, quantum, cq_composite };

struct SystemDescriptor {
  std::string label;
  SystemKind kind = SystemKind::quantum;
  std::vector<int> dims;
};

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

// Raw-matrix core ops; the DensityMatrix overloads are thin wrappers. The
// raw forms accept arbitrary operators, which the residual machinery needs.
Mat partial_trace(const Mat& m, const std::vector<int>& dims, const std::vector<int>& keep);
Mat dephase(const Mat& m, const std::vector<int>& dims, int classical_factor);

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& dims,
                            const std::vector<int>& keep);
DensityMatrix dephase(const DensityMatrix& rho, const std::vector<int>& dims,
                      int classical_factor);

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);
double total_variation(const ClassicalDistribution& p, const ClassicalDistribution& q);

}  // namespace hybrid
