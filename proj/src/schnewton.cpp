#include "hybrid/schnewton.hpp"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

namespace hybrid {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Angular frequency of FFT bin j on an n-point grid with spacing dx.
double wavenumber(int j, int n, double dx) {
  int k = (j <= n / 2) ? j : j - n;
  return 2.0 * std::numbers::pi * k / (n * dx);
}

std::vector<cplx> to_std(const Vec& v) {
  return std::vector<cplx>(v.data(), v.data() + v.size());
}

// Minimal-image kernel samples for the circular convolution.
RVec kernel_samples(int n, double dx, double soft, GravityKernel kernel) {
  RVec ker(n);
  for (int j = 0; j < n; ++j) {
    double r = std::min(j, n - j) * dx;
    if (kernel == GravityKernel::soft_coulomb)
      ker(j) = 1.0 / std::sqrt(r * r + soft * soft);
    else
      ker(j) = -r;  // 1D gravity: potential grows linearly with distance
  }
  return ker;
}

}  // namespace

WaveFunctionGrid::WaveFunctionGrid(int n_points_, double dx_, Vec amplitudes_)
    : n_points(n_points_), dx(dx_), amplitudes(std::move(amplitudes_)) {
  if (!is_power_of_two(n_points) || n_points < 64)
    throw DimensionError("grid size must be a power of two >= 64");
  if (dx <= 0) throw DimensionError("grid spacing must be positive");
  if (amplitudes.size() != n_points)
    throw DimensionError("amplitude count does not match grid size");
  if (std::abs(norm() - 1.0) > 1e-8) throw StructureError("wavefunction not normalized");
}

double WaveFunctionGrid::norm() const { return dx * amplitudes.squaredNorm(); }

double WaveFunctionGrid::mean_position() const {
  double m = 0.0;
  for (int i = 0; i < n_points; ++i) m += coordinate(i) * std::norm(amplitudes(i));
  return dx * m;
}

double WaveFunctionGrid::width() const {
  double mean = mean_position();
  double m2 = 0.0;
  for (int i = 0; i < n_points; ++i) {
    double x = coordinate(i);
    m2 += x * x * std::norm(amplitudes(i));
  }
  return std::sqrt(std::max(0.0, dx * m2 - mean * mean));
}

WaveFunctionGrid WaveFunctionGrid::gaussian(int n_points, double dx, double center,
                                            double width, double momentum) {
  Vec amp(n_points);
  for (int i = 0; i < n_points; ++i) {
    double x = (i - n_points / 2) * dx;
    double u = (x - center) / width;
    amp(i) = std::exp(cplx(-0.25 * u * u, momentum * x));
  }
  amp /= std::sqrt(dx) * amp.norm();
  return WaveFunctionGrid(n_points, dx, std::move(amp));
}

void check_stability(const WaveFunctionGrid& psi, const SNParams& p) {
  double kmax = std::numbers::pi / psi.dx;
  double max_kinetic = kmax * kmax / (2.0 * p.mass);
  if (p.dt * max_kinetic > 0.5)
    throw NumericalError("stability guard violated: dt * max kinetic eigenvalue > 0.5");
}

RVec gravitational_potential(const WaveFunctionGrid& psi, const SNParams& p) {
  const int n = psi.n_points;
  if (p.coupling == 0.0) return RVec::Zero(n);
  RVec density(n);
  for (int i = 0; i < n; ++i) density(i) = std::norm(psi.amplitudes(i));
  RVec ker = kernel_samples(n, psi.dx, p.softening_for(psi), p.kernel);

  Eigen::FFT<double> fft;
  std::vector<cplx> dens_c(n), ker_c(n), dens_f(n), ker_f(n), prod(n), conv(n);
  for (int i = 0; i < n; ++i) {
    dens_c[i] = density(i);
    ker_c[i] = ker(i);
  }
  fft.fwd(dens_f, dens_c);
  fft.fwd(ker_f, ker_c);
  for (int i = 0; i < n; ++i) prod[i] = dens_f[i] * ker_f[i];
  fft.inv(conv, prod);

  RVec phi(n);
  for (int i = 0; i < n; ++i) phi(i) = -p.coupling * psi.dx * conv[i].real();
  return phi;
}

WaveFunctionGrid evolve(const WaveFunctionGrid& psi0, const SNParams& p, int steps) {
  check_stability(psi0, p);
  if (steps == 0) return psi0;
  const int n = psi0.n_points;
  const double dx = psi0.dx;
  RVec vext = p.external_potential.size() == n ? p.external_potential : RVec::Zero(n);
  if (p.external_potential.size() != 0 && p.external_potential.size() != n)
    throw DimensionError("external potential does not match grid");

  Vec kin_phase(n);
  for (int j = 0; j < n; ++j) {
    double k = wavenumber(j, n, dx);
    kin_phase(j) = std::exp(cplx(0.0, -p.dt * k * k / (2.0 * p.mass)));
  }

  Eigen::FFT<double> fft;
  WaveFunctionGrid psi = psi0;
  std::vector<cplx> buf(n), freq(n);
  for (int step = 0; step < steps; ++step) {
    // Half kick with the pre-step potential; the kick leaves |psi| unchanged.
    RVec phi = gravitational_potential(psi, p);
    for (int i = 0; i < n; ++i)
      psi.amplitudes(i) *= std::exp(cplx(0.0, -0.5 * p.dt * (phi(i) + vext(i))));

    buf = to_std(psi.amplitudes);
    fft.fwd(freq, buf);
    for (int j = 0; j < n; ++j) freq[j] *= kin_phase(j);
    fft.inv(buf, freq);
    for (int i = 0; i < n; ++i) psi.amplitudes(i) = buf[i];

    // Second half kick with the potential refreshed from the drifted density;
    // this keeps the splitting symmetric and second order.
    phi = gravitational_potential(psi, p);
    for (int i = 0; i < n; ++i)
      psi.amplitudes(i) *= std::exp(cplx(0.0, -0.5 * p.dt * (phi(i) + vext(i))));
  }
  return psi;
}

double energy(const WaveFunctionGrid& psi, const SNParams& p) {
  const int n = psi.n_points;
  Eigen::FFT<double> fft;
  std::vector<cplx> buf = to_std(psi.amplitudes), freq(n);
  fft.fwd(freq, buf);
  double kinetic = 0.0;
  for (int j = 0; j < n; ++j) {
    double k = wavenumber(j, n, psi.dx);
    kinetic += k * k * std::norm(freq[j]);
  }
  // Parseval: sum |freq|^2 = n * sum |psi|^2, so dx * sum|dpsi|^2 = dx/n * sum k^2|freq|^2.
  kinetic *= psi.dx / (2.0 * p.mass * n);

  RVec phi = gravitational_potential(psi, p);
  RVec vext = p.external_potential.size() == n ? p.external_potential : RVec::Zero(n);
  double potential = 0.0;
  for (int i = 0; i < n; ++i)
    potential += (0.5 * phi(i) + vext(i)) * std::norm(psi.amplitudes(i));
  potential *= psi.dx;
  return kinetic + potential;
}

double overlap(const WaveFunctionGrid& a, const WaveFunctionGrid& b) {
  if (a.n_points != b.n_points || a.dx != b.dx)
    throw DimensionError("overlap: grids do not match");
  return std::abs(a.dx * a.amplitudes.dot(b.amplitudes));
}

std::vector<OverlapPoint> overlap_drift(const WaveFunctionGrid& psi1,
                                        const WaveFunctionGrid& psi2, const SNParams& p,
                                        int steps, int sample_every) {
  check_stability(psi1, p);
  WaveFunctionGrid a = psi1, b = psi2;
  std::vector<OverlapPoint> curve;
  curve.push_back({0.0, overlap(a, b)});
  int done = 0;
  while (done < steps) {
    int chunk = std::min(sample_every, steps - done);
    a = evolve(a, p, chunk);
    b = evolve(b, p, chunk);
    done += chunk;
    curve.push_back({done * p.dt, overlap(a, b)});
  }
  return curve;
}

}  // namespace hybrid
