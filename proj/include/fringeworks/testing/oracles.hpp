#pragma once

// Reference computations used to check the library. Nothing here calls into
// the propagation, mask, or amplitude code it is meant to verify; each oracle
// works from first principles with the standard library alone.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace fringeworks::testing {

using Cplx = std::complex<double>;

/// One sampled point source for the diffraction quadrature.
struct SourceSample {
  double x;
  Cplx amplitude;
};

/// Rayleigh-Sommerfeld (first kind) field of a 1-D aperture at distance z:
///   U(x) = sum_n u_n dx * (i k z / 2r) H1(k r),  r = sqrt(z^2 + (x - x_n)^2)
/// which is the exact 2-D scalar Green's-function solution for outgoing waves.
inline Cplx rayleigh_sommerfeld(std::span<const SourceSample> sources, double dx, double wavelength, double z,
                                double x) {
  const double k = 2.0 * std::numbers::pi / wavelength;
  Cplx acc{};
  for (const auto& s : sources) {
    const double dxs = x - s.x;
    const double r = std::sqrt(z * z + dxs * dxs);
    const double kr = k * r;
    const Cplx hankel(std::cyl_bessel_j(1.0, kr), std::cyl_neumann(1.0, kr));
    acc += s.amplitude * Cplx(0.0, k * z / (2.0 * r)) * hankel;
  }
  return acc * dx;
}

/// Squared norm of the joint particle-marker term  a |phi>|v_U> + b |phi>|v_L>
/// formed by explicit tensor products, with |phi> a unit spatial vector.
inline double joint_state_probability(Cplx a, Cplx b, std::span<const Cplx> v_u, std::span<const Cplx> v_l,
                                      std::span<const Cplx> phi) {
  std::vector<Cplx> joint(phi.size() * v_u.size());
  for (std::size_t p = 0; p < phi.size(); ++p) {
    for (std::size_t m = 0; m < v_u.size(); ++m) {
      joint[p * v_u.size() + m] = a * phi[p] * v_u[m] + b * phi[p] * v_l[m];
    }
  }
  double norm2 = 0.0;
  for (const Cplx& c : joint) norm2 += std::norm(c);
  return norm2;
}

/// Trace distance 1/2 ||rho_u - rho_l||_1 between two pure 2-component
/// states, from the eigenvalues of the 2x2 Hermitian difference matrix.
/// The optimal single-shot discrimination probability is (1 + D) / 2.
inline double trace_distance_2d(std::span<const Cplx> u, std::span<const Cplx> l) {
  const Cplx d00 = std::norm(u[0]) - std::norm(l[0]);
  const Cplx d11 = std::norm(u[1]) - std::norm(l[1]);
  const Cplx d01 = u[0] * std::conj(u[1]) - l[0] * std::conj(l[1]);
  const double tr = (d00 + d11).real();
  const double det = (d00 * d11).real() - std::norm(d01);
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  const double e1 = tr / 2.0 + disc;
  const double e2 = tr / 2.0 - disc;
  return 0.5 * (std::abs(e1) + std::abs(e2));
}

/// Minima of two coherent point sources at +-d/2 observed at distance z:
/// sqrt(z^2 + (x + d/2)^2) - sqrt(z^2 + (x - d/2)^2) = (m + 1/2) lambda, x > 0.
inline double two_source_minimum(double wavelength, double separation, double z, int m) {
  const double target = (m + 0.5) * wavelength;
  double lo = 0.0;
  double hi = z;
  for (int it = 0; it < 200; ++it) {
    const double x = 0.5 * (lo + hi);
    const double diff = std::hypot(z, x + separation / 2) - std::hypot(z, x - separation / 2);
    (diff < target ? lo : hi) = x;
  }
  return 0.5 * (lo + hi);
}

/// 1/e^2 intensity radius of a Gaussian beam of waist w0 after distance z.
inline double gaussian_beam_radius(double waist, double wavelength, double z) {
  const double rayleigh = std::numbers::pi * waist * waist / wavelength;
  return waist * std::sqrt(1.0 + (z / rayleigh) * (z / rayleigh));
}

}  // namespace fringeworks::testing
