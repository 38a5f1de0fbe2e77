#include "hybrid/common.hpp"

#include <unsupported/Eigen/KroneckerProduct>

namespace hybrid {

Mat kron(const Mat& a, const Mat& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

double trace_norm(const Mat& m) {
  return m.jacobiSvd().singularValues().sum();
}

double operator_norm(const Mat& m) {
  return m.jacobiSvd().singularValues()(0);
}

double min_eigenvalue(const Mat& hermitian) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(hermitian), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolve failed");
  return es.eigenvalues().minCoeff();
}

Mat random_ginibre(Rng& rng, int rows, int cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

Mat random_unitary(Rng& rng, int dim) {
  Mat g = random_ginibre(rng, dim, dim);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the phase convention so the distribution is Haar.
  for (int j = 0; j < dim; ++j) {
    cplx d = r(j, j);
    q.col(j) *= (std::abs(d) > 0) ? d / std::abs(d) : cplx(1, 0);
  }
  return q;
}

Mat random_hermitian(Rng& rng, int dim) {
  Mat g = random_ginibre(rng, dim, dim);
  return 0.5 * (g + g.adjoint());
}

Mat random_density(Rng& rng, int dim) {
  Mat g = random_ginibre(rng, dim, dim);
  Mat rho = g * g.adjoint();
  return rho / rho.trace().real();
}

}  // namespace hybrid
