#pragma once

// 1-D scalar diffraction on a periodic sampling grid.
//
// Sample i of an N-point grid of width L sits at x_i = (i - N/2) * L / N, so
// the grid is mirror symmetric under i -> N - i. Propagation uses the
// angular-spectrum transfer function exp(i 2 pi z sqrt(1/lambda^2 - f^2)) with
// evanescent components dropped and a distance-dependent band limit that keeps
// the transfer function's phase resolved on the frequency grid.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fringeworks/errors.hpp"
#include "fringeworks/fft.hpp"
#include "fringeworks/profile.hpp"
#include "fringeworks/quantum.hpp"

namespace fringeworks {

/// Sample count and physical width of a transverse grid.
struct GridGeometry {
  std::size_t n = 0;
  double extent = 0.0;

  double spacing() const noexcept { return extent / static_cast<double>(n); }
  double position(std::size_t i) const noexcept {
    return (static_cast<double>(i) - static_cast<double>(n / 2)) * spacing();
  }
  friend bool operator==(const GridGeometry&, const GridGeometry&) = default;

  void validate() const {
    detail::require(n >= 2 && std::has_single_bit(n),
                    "grid: sample count " + std::to_string(n) + " must be a power of two >= 2");
    detail::require(extent > 0.0 && std::isfinite(extent), "grid: extent must be positive");
  }
};

/// Complex field samples at a fixed wavelength.
class FieldGrid {
 public:
  FieldGrid(GridGeometry geometry, double wavelength, std::vector<Complex> samples)
      : geometry_(geometry), wavelength_(wavelength), samples_(std::move(samples)) {
    geometry_.validate();
    detail::require(wavelength_ > 0.0 && std::isfinite(wavelength_),
                    "FieldGrid: wavelength must be positive");
    detail::require(samples_.size() == geometry_.n, "FieldGrid: sample count does not match grid");
    for (const Complex& s : samples_) detail::require(is_finite(s), "FieldGrid: non-finite sample");
  }

  static FieldGrid uniform(GridGeometry geometry, double wavelength, Complex amplitude = 1.0) {
    return FieldGrid(geometry, wavelength, std::vector<Complex>(geometry.n, amplitude));
  }

  const GridGeometry& geometry() const noexcept { return geometry_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double extent() const noexcept { return geometry_.extent; }
  double spacing() const noexcept { return geometry_.spacing(); }
  double wavelength() const noexcept { return wavelength_; }
  double position(std::size_t i) const noexcept { return geometry_.position(i); }
  const std::vector<Complex>& samples() const noexcept { return samples_; }

  bool aligned_with(const FieldGrid& other) const noexcept {
    return geometry_ == other.geometry_ && wavelength_ == other.wavelength_;
  }

 private:
  GridGeometry geometry_;
  double wavelength_;
  std::vector<Complex> samples_;
};

/// Real transmission in [0, 1] per sample.
class TransmissionMask {
 public:
  TransmissionMask(GridGeometry geometry, std::vector<double> samples)
      : geometry_(geometry), samples_(std::move(samples)) {
    geometry_.validate();
    detail::require(samples_.size() == geometry_.n, "TransmissionMask: sample count does not match grid");
    for (double t : samples_) {
      detail::require(t >= 0.0 && t <= 1.0, "TransmissionMask: transmission outside [0, 1]");
    }
  }

  const GridGeometry& geometry() const noexcept { return geometry_; }
  const std::vector<double>& samples() const noexcept { return samples_; }

  /// Fraction of samples that block (transmission 0 counts fully).
  double blocked_fraction() const {
    double open = 0.0;
    for (double t : samples_) open += t;
    return 1.0 - open / static_cast<double>(samples_.size());
  }

 private:
  GridGeometry geometry_;
  std::vector<double> samples_;
};

struct LensSpec {
  double focal_length = 0.0;

  explicit LensSpec(double f) : focal_length(f) {
    detail::require(std::isfinite(f) && f > 0.0, "LensSpec: focal length must be positive and finite");
  }
};

/// Two marker-tagged branches sharing one grid.
struct MarkedFieldPair {
  FieldGrid psi_u;
  FieldGrid psi_l;
  MarkerOverlap overlap;

  MarkedFieldPair(FieldGrid u, FieldGrid l, MarkerOverlap gamma)
      : psi_u(std::move(u)), psi_l(std::move(l)), overlap(gamma) {
    detail::require(psi_u.aligned_with(psi_l), "MarkedFieldPair: branch grids differ");
  }
};

namespace detail {

/// Fraction of each sample cell [x - dx/2, x + dx/2] covered by the interval
/// [center - width/2, center + width/2], written into `coverage`. Edge samples
/// get partial values, so the covered length and centroid follow the nominal
/// interval instead of jumping by whole samples. Mirror intervals give mirror
/// coverage exactly.
inline void add_coverage(std::vector<double>& coverage, const GridGeometry& g, double center, double width) {
  const double dx = g.spacing();
  const double lo = center - width / 2;
  const double hi = center + width / 2;
  const long half = static_cast<long>(g.n / 2);
  const long first = std::max(0L, static_cast<long>(std::floor(lo / dx)) - 1 + half);
  const long last = std::min(static_cast<long>(g.n) - 1, static_cast<long>(std::ceil(hi / dx)) + 1 + half);
  for (long i = first; i <= last; ++i) {
    const double x = static_cast<double>(i - half) * dx;
    const double covered = std::min(hi, x + dx / 2) - std::max(lo, x - dx / 2);
    if (covered > 0.0) {
      auto& c = coverage[static_cast<std::size_t>(i)];
      c = std::min(1.0, c + covered / dx);
    }
  }
}

inline std::size_t min_samples_for(double extent, double feature, double samples_per_feature) {
  return std::bit_ceil(static_cast<std::size_t>(std::ceil(samples_per_feature * extent / feature)));
}

}  // namespace detail

/// Single open interval of the given width centred at `center`.
inline TransmissionMask make_slit(const GridGeometry& grid, double center, double width) {
  grid.validate();
  detail::require(width > 0.0, "make_slit: width must be positive");
  detail::require(std::abs(center) + width / 2 < grid.extent / 2, "make_slit: slit extends past the grid");
  detail::require(width >= 4.0 * grid.spacing(),
                  "make_slit: slit width resolves to fewer than 4 samples; need N >= " +
                      std::to_string(detail::min_samples_for(grid.extent, width, 4.0)));
  std::vector<double> mask(grid.n, 0.0);
  detail::add_coverage(mask, grid, center, width);
  return TransmissionMask(grid, std::move(mask));
}

/// Two slits centred at +separation/2 and -separation/2.
inline TransmissionMask make_double_slit(const GridGeometry& grid, double separation, double slit_width) {
  grid.validate();
  detail::require(separation >= 0.0 && slit_width > 0.0, "make_double_slit: negative geometry");
  detail::require(separation + slit_width < grid.extent, "make_double_slit: slits do not fit in the grid");
  const auto upper = make_slit(grid, separation / 2, slit_width);
  const auto lower = make_slit(grid, -separation / 2, slit_width);
  std::vector<double> mask(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    mask[i] = std::max(upper.samples()[i], lower.samples()[i]);
  }
  return TransmissionMask(grid, std::move(mask));
}

/// Opaque wires of equal width at the given centres; transparent elsewhere.
inline TransmissionMask make_wire_grid(const GridGeometry& grid, std::vector<double> wire_centers,
                                       double wire_width) {
  grid.validate();
  std::vector<double> blocked(grid.n, 0.0);
  if (wire_centers.empty()) return TransmissionMask(grid, std::vector<double>(grid.n, 1.0));
  detail::require(wire_width >= 2.0 * grid.spacing(),
                  "make_wire_grid: wire width resolves to fewer than 2 samples; need N >= " +
                      std::to_string(detail::min_samples_for(grid.extent, wire_width, 2.0)));
  std::ranges::sort(wire_centers);
  for (std::size_t k = 0; k < wire_centers.size(); ++k) {
    const double c = wire_centers[k];
    detail::require(std::isfinite(c) && std::abs(c) + wire_width / 2 < grid.extent / 2,
                    "make_wire_grid: wire at " + std::to_string(c) + " m lies outside the grid");
    if (k > 0) {
      detail::require(c - wire_centers[k - 1] >= wire_width,
                      "make_wire_grid: wires at " + std::to_string(wire_centers[k - 1]) + " m and " +
                          std::to_string(c) + " m overlap");
    }
    detail::add_coverage(blocked, grid, c, wire_width);
  }
  for (double& b : blocked) b = 1.0 - b;
  return TransmissionMask(grid, std::move(blocked));
}

inline FieldGrid apply_mask(const FieldGrid& field, const TransmissionMask& mask) {
  detail::require(field.geometry() == mask.geometry(), "apply_mask: mask and field grids differ");
  std::vector<Complex> out(field.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = field.samples()[i] * mask.samples()[i];
  return FieldGrid(field.geometry(), field.wavelength(), std::move(out));
}

/// Highest spatial frequency (cycles/m) kept when propagating by `distance`:
/// below the evanescent cutoff 1/lambda and below the frequency where the
/// transfer-function phase starts to alias on the 1/L frequency grid.
inline double propagation_band_limit(const GridGeometry& grid, double wavelength, double distance) {
  const double ratio = 2.0 * distance / grid.extent;
  return 1.0 / (wavelength * std::sqrt(ratio * ratio + 1.0));
}

/// Largest distance for which the band limit still keeps at least half of the
/// grid's representable bandwidth, min(1/(2 dx), 1/lambda).
inline double max_safe_distance(const GridGeometry& grid, double wavelength) {
  const double usable = std::min(0.5 / grid.spacing(), 1.0 / wavelength);
  const double cutoff = 0.5 * usable;
  const double s = 1.0 / (wavelength * cutoff);
  return 0.5 * grid.extent * std::sqrt(s * s - 1.0);
}

/// Spatial frequency (cycles/m) of DFT bin k on an n-point grid of width L.
inline double bin_frequency(std::size_t k, const GridGeometry& grid) {
  const auto n = static_cast<double>(grid.n);
  const auto kk = static_cast<double>(k);
  return (k < grid.n / 2 ? kk : kk - n) / grid.extent;
}

inline FieldGrid propagate(const FieldGrid& field, double distance) {
  detail::require(std::isfinite(distance) && distance >= 0.0, "propagate: distance must be finite and >= 0");
  if (distance == 0.0) return field;
  const double z_max = max_safe_distance(field.geometry(), field.wavelength());
  if (distance > z_max) {
    throw AliasingError("propagate: distance " + std::to_string(distance) +
                            " m exceeds the maximum safe distance " + std::to_string(z_max) +
                            " m for this grid",
                        z_max);
  }
  const double lambda = field.wavelength();
  const double inv_lambda = 1.0 / lambda;
  const double f_limit = std::min(propagation_band_limit(field.geometry(), lambda, distance), inv_lambda);

  // exp(i k z) carried separately, reduced modulo one wavelength. z / lambda is
  // ~1e6 cycles, so the reduction runs in extended precision.
  const auto cycles = static_cast<double>(
      std::fmod(static_cast<long double>(distance) / static_cast<long double>(lambda), 1.0L));
  const Complex carrier = std::polar(1.0 / static_cast<double>(field.size()),
                                     2.0 * std::numbers::pi * cycles);

  auto spectrum = fft::transform(field.samples(), fft::Direction::kForward);
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const double f = bin_frequency(k, field.geometry());
    if (std::abs(f) > f_limit || std::abs(f) >= inv_lambda) {
      spectrum[k] = 0.0;
      continue;
    }
    // 2 pi z (sqrt(1/lambda^2 - f^2) - 1/lambda), written without cancellation.
    const double root = std::sqrt((inv_lambda - f) * (inv_lambda + f));
    const double phase = -2.0 * std::numbers::pi * distance * f * f / (root + inv_lambda);
    spectrum[k] *= carrier * std::polar(1.0, phase);
  }
  auto out = fft::transform(std::move(spectrum), fft::Direction::kBackward);
  return FieldGrid(field.geometry(), lambda, std::move(out));
}

/// Ideal thin lens: multiplies by exp(-i k x^2 / (2 f)).
inline FieldGrid apply_thin_lens(const FieldGrid& field, const LensSpec& lens) {
  const double k = 2.0 * std::numbers::pi / field.wavelength();
  std::vector<Complex> out(field.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x = field.position(i);
    out[i] = field.samples()[i] * std::polar(1.0, -k * x * x / (2.0 * lens.focal_length));
  }
  return FieldGrid(field.geometry(), field.wavelength(), std::move(out));
}

/// Radius beyond which the sampled lens phase exp(-i k x^2 / 2f) changes by
/// more than pi per sample and aliases, lambda f / (2 dx).
inline double lens_sampling_radius(const GridGeometry& grid, double wavelength, const LensSpec& lens) {
  return wavelength * lens.focal_length / (2.0 * grid.spacing());
}

inline IntensityProfile intensity(const FieldGrid& field) {
  std::vector<double> values(field.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::norm(field.samples()[i]);
  return IntensityProfile(field.position(0), field.spacing(), std::move(values));
}

/// Pointwise |psi_U|^2 + |psi_L|^2 + 2 Re(gamma conj(psi_U) psi_L).
inline IntensityProfile marked_intensity(const MarkedFieldPair& pair) {
  const auto& u = pair.psi_u.samples();
  const auto& l = pair.psi_l.samples();
  const Complex gamma = pair.overlap.value();
  std::vector<double> values(u.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = std::norm(u[i]) + std::norm(l[i]) + 2.0 * std::real(gamma * std::conj(u[i]) * l[i]);
    values[i] = v > 0.0 ? v : 0.0;
  }
  return IntensityProfile(pair.psi_u.position(0), pair.psi_u.spacing(), std::move(values));
}

inline double total_power(const FieldGrid& field) {
  double sum = 0.0;
  for (const Complex& s : field.samples()) sum += std::norm(s);
  return sum * field.spacing();
}

}  // namespace fringeworks
