#pragma once

#include <vector>

#include "hybrid/common.hpp"

namespace hybrid {

/// Discretized 1D wavefunction on a periodic grid centered at zero.
struct WaveFunctionGrid {
  int n_points = 0;  // power of two, >= 64
  double dx = 0.0;
  Vec amplitudes;

  WaveFunctionGrid(int n_points, double dx, Vec amplitudes);

  double norm() const;  // dx * sum |psi|^2
  double coordinate(int i) const { return (i - n_points / 2) * dx; }
  double mean_position() const;
  double width() const;  // sqrt(<x^2> - <x>^2)

  static WaveFunctionGrid gaussian(int n_points, double dx, double center, double width,
                                   double momentum = 0.0);
};

enum class GravityKernel { soft_coulomb, linear_1d };

struct SNParams {
  double mass = 1.0;
  double coupling = 0.0;   // G m^2 in natural units
  double softening = 0.0;  // kernel regulator; defaults to 2 dx when <= 0
  double dt = 1e-3;
  GravityKernel kernel = GravityKernel::soft_coulomb;
  RVec external_potential;  // empty means zero

  double softening_for(const WaveFunctionGrid& psi) const {
    return softening > 0 ? softening : 2.0 * psi.dx;
  }
};

/// Self-gravity potential of |psi|^2 via circular convolution with the
/// softened kernel (minimal-image distances on the periodic grid).
RVec gravitational_potential(const WaveFunctionGrid& psi, const SNParams& p);

/// Second-order split-step evolution: half potential kick, spectral kinetic
/// step, half potential kick with the potential refreshed in between.
WaveFunctionGrid evolve(const WaveFunctionGrid& psi0, const SNParams& p, int steps);

/// Kinetic + (1/2) self-gravity + external energy; derivative is spectral.
double energy(const WaveFunctionGrid& psi, const SNParams& p);

struct OverlapPoint {
  double t = 0.0;
  double overlap = 0.0;
};

/// |<psi1(t)|psi2(t)>| with each state evolved under its own self-gravity.
std::vector<OverlapPoint> overlap_drift(const WaveFunctionGrid& psi1,
                                        const WaveFunctionGrid& psi2, const SNParams& p,
                                        int steps, int sample_every = 10);

double overlap(const WaveFunctionGrid& a, const WaveFunctionGrid& b);

/// Throws NumericalError when dt * (max kinetic eigenvalue) > 0.5.
void check_stability(const WaveFunctionGrid& psi, const SNParams& p);

}  // namespace hybrid
