#pragma once

// Two-path amplitude algebra with which-way marker states.
//
// A particle that can reach screen position x through either slit carries
// amplitudes a (upper slit) and b (lower slit). When each path also leaves a
// marker in state |v_U> or |v_L>, the detection probability depends on the
// markers only through their overlap gamma = <v_U|v_L>:
//
//   P(x) = |a|^2 + |b|^2 + 2 Re(gamma * conj(a) * b)
//
// gamma = 1 recovers ordinary two-path interference, gamma = 0 removes the
// cross term entirely. The spatial detector factor <phi_x|phi_x> is taken as 1.

#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "fringeworks/errors.hpp"

namespace fringeworks {

using Complex = std::complex<double>;

inline bool is_finite(Complex z) noexcept {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Dimensionless probability amplitude; always finite.
class ComplexAmplitude {
 public:
  constexpr ComplexAmplitude() = default;
  ComplexAmplitude(double re, double im) : ComplexAmplitude(Complex(re, im)) {}
  ComplexAmplitude(Complex value) : value_(value) {  // NOLINT(google-explicit-constructor)
    detail::require(is_finite(value_), "ComplexAmplitude: non-finite component");
  }

  Complex value() const noexcept { return value_; }
  double re() const noexcept { return value_.real(); }
  double im() const noexcept { return value_.imag(); }

 private:
  Complex value_{};
};

/// Normalized marker state in a finite orthonormal internal basis.
class MarkerState {
 public:
  /// Input norms within this distance of 1 are renormalized; anything further
  /// off is rejected.
  static constexpr double kNormTolerance = 1e-9;

  explicit MarkerState(std::vector<Complex> components) : components_(std::move(components)) {
    detail::require(!components_.empty(), "MarkerState: needs at least one component");
    double norm2 = 0.0;
    for (const Complex& c : components_) {
      detail::require(is_finite(c), "MarkerState: non-finite component");
      norm2 += std::norm(c);
    }
    const double norm = std::sqrt(norm2);
    detail::require(std::abs(norm - 1.0) <= kNormTolerance,
                    "MarkerState: norm " + std::to_string(norm) + " is not 1 within tolerance");
    for (Complex& c : components_) c /= norm;
  }

  MarkerState(std::initializer_list<Complex> components)
      : MarkerState(std::vector<Complex>(components)) {}

  std::size_t dimension() const noexcept { return components_.size(); }
  const std::vector<Complex>& components() const noexcept { return components_; }

 private:
  std::vector<Complex> components_;
};

/// gamma = <v_U|v_L>, with |gamma| <= 1.
class MarkerOverlap {
 public:
  constexpr MarkerOverlap() = default;
  MarkerOverlap(Complex gamma) : gamma_(gamma) {  // NOLINT(google-explicit-constructor)
    detail::require(is_finite(gamma_), "MarkerOverlap: non-finite gamma");
    detail::require(std::abs(gamma_) <= 1.0 + 1e-12, "MarkerOverlap: |gamma| exceeds 1");
  }
  MarkerOverlap(double gamma) : MarkerOverlap(Complex(gamma, 0.0)) {}  // NOLINT

  static MarkerOverlap from_polar(double magnitude, double phase_rad) {
    detail::require(magnitude >= 0.0, "MarkerOverlap: negative |gamma|");
    return MarkerOverlap(std::polar(magnitude, phase_rad));
  }

  Complex value() const noexcept { return gamma_; }
  double magnitude() const noexcept { return std::abs(gamma_); }
  double phase() const noexcept { return std::arg(gamma_); }

 private:
  Complex gamma_{};
};

/// The two slit amplitudes surviving detection at screen position x.
struct SlitAmplitudePair {
  ComplexAmplitude a;
  ComplexAmplitude b;
  double x = 0.0;

  SlitAmplitudePair(ComplexAmplitude a_, ComplexAmplitude b_, double x_ = 0.0)
      : a(a_), b(b_), x(x_) {
    detail::require(std::isfinite(x), "SlitAmplitudePair: position must be finite");
  }
};

struct DualityReport {
  double visibility = 0.0;
  double distinguishability = 0.0;
  double duality_sum = 0.0;
};

inline MarkerOverlap marker_overlap(const MarkerState& v_u, const MarkerState& v_l) {
  detail::require(v_u.dimension() == v_l.dimension(),
                  "marker_overlap: marker states have different dimensions");
  Complex acc{};
  for (std::size_t i = 0; i < v_u.dimension(); ++i) {
    acc += std::conj(v_u.components()[i]) * v_l.components()[i];
  }
  // Cauchy-Schwarz holds up to rounding; pin it so the overlap invariant holds.
  if (const double m = std::abs(acc); m > 1.0) acc /= m;
  return MarkerOverlap(acc);
}

/// |a + b|^2: both paths interfere freely.
inline double intensity_no_marker(const SlitAmplitudePair& pair) {
  return std::norm(pair.a.value() + pair.b.value());
}

inline double intensity_with_marker(const SlitAmplitudePair& pair, const MarkerOverlap& overlap) {
  const Complex a = pair.a.value();
  const Complex b = pair.b.value();
  const double p = std::norm(a) + std::norm(b) + 2.0 * std::real(overlap.value() * std::conj(a) * b);
  return p > 0.0 ? p : 0.0;
}

/// Closed-form fringe contrast 2|a||b||gamma| / (|a|^2 + |b|^2).
inline double analytic_visibility(double mag_a, double mag_b, const MarkerOverlap& overlap) {
  detail::require(mag_a >= 0.0 && mag_b >= 0.0, "analytic_visibility: negative magnitude");
  const double denom = mag_a * mag_a + mag_b * mag_b;
  detail::require(denom > 0.0, "analytic_visibility: both magnitudes are zero");
  return 2.0 * mag_a * mag_b * overlap.magnitude() / denom;
}

/// Which-way distinguishability sqrt(1 - |gamma|^2) of two pure marker states.
inline double distinguishability(const MarkerOverlap& overlap) {
  const double m = overlap.magnitude();
  return std::sqrt(std::max(0.0, 1.0 - m * m));
}

inline DualityReport duality_report(double v, double d) {
  detail::require(v >= 0.0 && v <= 1.0, "duality_report: visibility outside [0, 1]");
  detail::require(d >= 0.0 && d <= 1.0, "duality_report: distinguishability outside [0, 1]");
  return {v, d, v * v + d * d};
}

}  // namespace fringeworks
