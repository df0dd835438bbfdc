#pragma once

// End-to-end Afshar-style apparatus: two slits, a wire grid placed on the
// dark fringes, and a lens imaging each slit onto its own detector window.
//
// Geometry (all SI):
//
//   slits --z1--> wire plane --z2--> lens (f) --z3--> image plane
//
// Slit A sits at x = +d/2 and slit B at x = -d/2. The lens inverts the image,
// so detector A is centred at -m d/2 and detector B at +m d/2, where
// m = z3 / (z1 + z2).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "fringeworks/errors.hpp"
#include "fringeworks/optics.hpp"
#include "fringeworks/profile.hpp"
#include "fringeworks/quantum.hpp"

namespace fringeworks {

struct ApparatusConfig {
  double wavelength = 650e-9;
  double slit_separation = 250e-6;
  double slit_width = 40e-6;
  double dist_slit_to_wires = 1.0;
  double dist_wires_to_lens = 0.1;
  double focal_length = 0.55;
  /// When set, dist_lens_to_image is solved from the thin-lens equation.
  bool auto_image = true;
  double dist_lens_to_image = 1.1;
  int wire_count = 6;
  /// Defaults to one tenth of the fringe period at the wire plane.
  std::optional<double> wire_width;
  /// Defaults to 0.4 * m * d.
  std::optional<double> detector_halfwidth;
  /// Lens aperture half-width; defaults to the radius where the sampled lens
  /// phase would start to alias, and may not exceed it.
  std::optional<double> lens_aperture_halfwidth;
  MarkerOverlap marker_gamma{0.0};
  GridGeometry grid{std::size_t{1} << 16, 0.21};

  double object_distance() const { return dist_slit_to_wires + dist_wires_to_lens; }

  double image_distance() const {
    if (!auto_image) return dist_lens_to_image;
    return 1.0 / (1.0 / focal_length - 1.0 / object_distance());
  }

  double magnification() const { return image_distance() / object_distance(); }

  /// Paraxial two-slit fringe period at the wire plane, lambda z1 / d.
  double fringe_period() const { return wavelength * dist_slit_to_wires / slit_separation; }

  double effective_wire_width() const { return wire_width.value_or(fringe_period() / 10.0); }

  double lens_sampling_limit() const {
    return lens_sampling_radius(grid, wavelength, LensSpec(focal_length));
  }

  double effective_lens_aperture() const { return lens_aperture_halfwidth.value_or(lens_sampling_limit()); }

  double effective_detector_halfwidth() const {
    return detector_halfwidth.value_or(0.4 * magnification() * slit_separation);
  }

  /// True when 1/(z1+z2) + 1/z3 = 1/f within 1e-6 relative.
  bool imaging_condition_holds() const {
    const double lhs = 1.0 / object_distance() + 1.0 / image_distance();
    const double rhs = 1.0 / focal_length;
    return std::abs(lhs - rhs) <= 1e-6 * rhs;
  }

  void validate() const {
    auto positive = [](double v, const char* name) {
      detail::require(std::isfinite(v) && v > 0.0, std::string("apparatus: ") + name + " must be positive");
    };
    positive(wavelength, "wavelength");
    positive(slit_separation, "slit_separation");
    positive(slit_width, "slit_width");
    positive(dist_slit_to_wires, "dist_slit_to_wires");
    positive(dist_wires_to_lens, "dist_wires_to_lens");
    positive(focal_length, "focal_length");
    if (auto_image) {
      detail::require(focal_length < object_distance(),
                      "apparatus: focal_length must be shorter than dist_slit_to_wires + dist_wires_to_lens "
                      "to form a real image");
    } else {
      positive(dist_lens_to_image, "dist_lens_to_image");
    }
    detail::require(wire_count >= 0, "apparatus: wire_count must be >= 0");
    positive(effective_wire_width(), "wire_width");
    positive(effective_detector_halfwidth(), "detector_halfwidth");
    grid.validate();
    positive(effective_lens_aperture(), "lens_aperture_halfwidth");
    detail::require(effective_lens_aperture() <= lens_sampling_limit() * (1.0 + 1e-12),
                    "apparatus: lens_aperture_halfwidth exceeds " + std::to_string(lens_sampling_limit()) +
                        " m, beyond which the grid cannot sample the lens phase");
    detail::require(wire_count * effective_wire_width() < grid.extent / 4,
                    "apparatus: wire_count * wire_width must stay below a quarter of the grid extent");
    detail::require(slit_separation + slit_width < grid.extent, "apparatus: slits do not fit in the grid");
  }
};

inline ApparatusConfig default_apparatus() { return ApparatusConfig{}; }

enum class SlitSelection { kA, kB, kBoth };

struct Scenario {
  SlitSelection slits = SlitSelection::kBoth;
  bool wires_in = false;
  /// Marker-tagged branches combined with this overlap; empty means coherent.
  std::optional<MarkerOverlap> marker;

  void validate() const {
    detail::require(!marker || slits == SlitSelection::kBoth,
                    "scenario: a which-way marker needs both slits open");
  }

  /// Stable identifier, e.g. "slits=both,wires=in,marker=gamma".
  std::string key() const {
    const char* s = slits == SlitSelection::kA ? "A" : slits == SlitSelection::kB ? "B" : "both";
    return std::string("slits=") + s + ",wires=" + (wires_in ? "in" : "out") +
           ",marker=" + (marker ? "gamma" : "off");
  }
};

struct ScenarioResult {
  double power_DA = 0.0;
  double power_DB = 0.0;
  double power_intercepted_by_wires = 0.0;
  double power_total_at_image = 0.0;
  double wire_plane_visibility = 0.0;
  /// Power leaving the slit plane.
  double power_input = 0.0;
};

/// Intensity recorded at each plane of a scenario run.
struct PlaneProfiles {
  IntensityProfile slit;
  IntensityProfile wires;
  IntensityProfile lens;
  IntensityProfile image;
};

struct DetectorWindow {
  double center = 0.0;
  double halfwidth = 0.0;

  bool contains(double x) const { return std::abs(x - center) <= halfwidth; }

  double collect(const IntensityProfile& profile) const {
    double sum = 0.0;
    const auto xs = profile.positions();
    const auto vs = profile.values();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (contains(xs[i])) sum += vs[i];
    }
    return sum * profile.spacing();
  }
};

struct DetectorWindows {
  DetectorWindow a;
  DetectorWindow b;
};

inline DetectorWindows detector_windows(const ApparatusConfig& config) {
  config.validate();
  detail::require(config.imaging_condition_holds(),
                  "detector_windows: slit plane is not imaged onto the detector plane "
                  "(1/(z1+z2) + 1/z3 != 1/f)");
  const double m = config.magnification();
  const double hw = config.effective_detector_halfwidth();
  detail::require(m * config.slit_separation > 2.0 * hw, "detector_windows: detector windows overlap");
  return {{-m * config.slit_separation / 2, hw}, {m * config.slit_separation / 2, hw}};
}

/// Fringe visibility over the central fringe period |x| <= p/2 of the wire
/// plane, where the slow single-slit envelope is nearly flat.
inline double central_fringe_visibility(const ApparatusConfig& config, const IntensityProfile& wire_plane) {
  const double half = config.fringe_period() / 2;
  return visibility(wire_plane.window(-half, half));
}

namespace detail {

inline IntensityProfile combined_intensity(const std::vector<FieldGrid>& branches,
                                           const std::optional<MarkerOverlap>& marker) {
  if (branches.size() == 1) return intensity(branches.front());
  return marked_intensity(MarkedFieldPair(branches[0], branches[1], *marker));
}

inline std::vector<FieldGrid> propagate_all(const std::vector<FieldGrid>& branches, double distance,
                                            const char* plane) {
  std::vector<FieldGrid> out;
  out.reserve(branches.size());
  try {
    for (const auto& b : branches) out.push_back(propagate(b, distance));
  } catch (const AliasingError& e) {
    throw AliasingError(std::string("propagation to the ") + plane + " plane failed: " + e.what(),
                        e.max_safe_distance());
  }
  return out;
}

/// Slit-plane branches: one field per marker branch, or a single field.
inline std::vector<FieldGrid> slit_branches(const ApparatusConfig& c, const Scenario& s) {
  const auto illumination = FieldGrid::uniform(c.grid, c.wavelength);
  const auto slit_a = [&] { return apply_mask(illumination, make_slit(c.grid, c.slit_separation / 2, c.slit_width)); };
  const auto slit_b = [&] { return apply_mask(illumination, make_slit(c.grid, -c.slit_separation / 2, c.slit_width)); };
  switch (s.slits) {
    case SlitSelection::kA:
      return {slit_a()};
    case SlitSelection::kB:
      return {slit_b()};
    case SlitSelection::kBoth:
      if (s.marker) return {slit_a(), slit_b()};
      return {apply_mask(illumination, make_double_slit(c.grid, c.slit_separation, c.slit_width))};
  }
  return {};
}

/// Coherent both-slit intensity at the wire plane.
inline IntensityProfile coherent_wire_plane(const ApparatusConfig& config) {
  const auto branches = slit_branches(config, Scenario{SlitSelection::kBoth, false, std::nullopt});
  return intensity(propagate_all(branches, config.dist_slit_to_wires, "wire").front());
}

}  // namespace detail

/// The `count` dark fringes nearest the axis of the coherent both-slit pattern
/// at the wire plane, refined by a parabola through each sampled minimum and
/// its neighbours. Returned in ascending order.
inline std::vector<double> dark_fringe_positions(const ApparatusConfig& config, int count) {
  config.validate();
  detail::require(count >= 0, "dark_fringe_positions: count must be >= 0");
  if (count == 0) return {};
  const auto profile = detail::coherent_wire_plane(config);
  const auto xs = profile.positions();
  const auto vs = profile.values();
  const double lobe = config.wavelength * config.dist_slit_to_wires / config.slit_width;

  std::vector<double> minima;
  for (std::size_t i = 1; i + 1 < vs.size(); ++i) {
    if (std::abs(xs[i]) >= lobe) continue;
    if (!(vs[i] <= vs[i - 1] && vs[i] < vs[i + 1])) continue;
    const double curvature = vs[i - 1] - 2.0 * vs[i] + vs[i + 1];
    double x = xs[i];
    if (curvature > 0.0) x += 0.5 * profile.spacing() * (vs[i - 1] - vs[i + 1]) / curvature;
    minima.push_back(x);
  }
  if (static_cast<int>(minima.size()) < count) {
    throw ValidationError("dark_fringe_positions: only " + std::to_string(minima.size()) +
                          " resolvable minima inside the central envelope lobe, " + std::to_string(count) +
                          " requested");
  }
  std::ranges::stable_sort(minima, [](double l, double r) { return std::abs(l) < std::abs(r); });
  minima.resize(static_cast<std::size_t>(count));
  std::ranges::sort(minima);
  return minima;
}

inline ScenarioResult run_scenario(const ApparatusConfig& config, const Scenario& scenario,
                                   PlaneProfiles* trace = nullptr) {
  config.validate();
  scenario.validate();
  const auto windows = detector_windows(config);

  ScenarioResult result;
  auto branches = detail::slit_branches(config, scenario);
  const auto at_slits = detail::combined_intensity(branches, scenario.marker);
  result.power_input = total_power(at_slits);

  branches = detail::propagate_all(branches, config.dist_slit_to_wires, "wire");
  const auto at_wires = detail::combined_intensity(branches, scenario.marker);
  result.wire_plane_visibility = central_fringe_visibility(config, at_wires);

  if (scenario.wires_in && config.wire_count > 0) {
    const auto wires = make_wire_grid(config.grid, dark_fringe_positions(config, config.wire_count),
                                      config.effective_wire_width());
    for (auto& b : branches) b = apply_mask(b, wires);
    const double after = total_power(detail::combined_intensity(branches, scenario.marker));
    result.power_intercepted_by_wires = std::max(0.0, total_power(at_wires) - after);
  }

  branches = detail::propagate_all(branches, config.dist_wires_to_lens, "lens");
  const LensSpec lens(config.focal_length);
  const double aperture_halfwidth = config.effective_lens_aperture();
  const bool stopped = 2.0 * aperture_halfwidth < config.grid.extent;
  const auto aperture = stopped ? make_slit(config.grid, 0.0, 2.0 * aperture_halfwidth)
                                : TransmissionMask(config.grid, std::vector<double>(config.grid.n, 1.0));
  for (auto& b : branches) b = apply_mask(apply_thin_lens(b, lens), aperture);
  std::optional<IntensityProfile> at_lens;
  if (trace) at_lens = detail::combined_intensity(branches, scenario.marker);

  branches = detail::propagate_all(branches, config.image_distance(), "image");
  const auto at_image = detail::combined_intensity(branches, scenario.marker);
  result.power_total_at_image = total_power(at_image);
  result.power_DA = windows.a.collect(at_image);
  result.power_DB = windows.b.collect(at_image);

  if (trace) *trace = PlaneProfiles{at_slits, at_wires, *at_lens, at_image};
  return result;
}

/// Worker cap from FRINGEWORKS_THREADS, else the hardware concurrency.
inline std::size_t worker_threads() {
  if (const char* env = std::getenv("FRINGEWORKS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct ScenarioEntry {
  Scenario scenario;
  ScenarioResult result;
  /// 1 - (detected power with wires) / (detected power without wires).
  double relative_loss = 0.0;
};

struct AfsharReport {
  ApparatusConfig config;
  std::vector<double> wire_positions;
  std::vector<ScenarioEntry> entries;
  DualityReport duality;

  const ScenarioEntry& at(const std::string& key) const {
    for (const auto& e : entries) {
      if (e.scenario.key() == key) return e;
    }
    throw ValidationError("AfsharReport: no scenario " + key);
  }
};

/// Runs independent jobs on up to `threads` workers; results keep input order.
template <typename Job>
auto run_parallel(const std::vector<Job>& jobs, std::size_t threads) {
  using Result = decltype(jobs.front()());
  std::vector<Result> results;
  results.reserve(jobs.size());
  threads = std::max<std::size_t>(1, threads);
  for (std::size_t start = 0; start < jobs.size(); start += threads) {
    const std::size_t stop = std::min(jobs.size(), start + threads);
    std::vector<std::future<Result>> batch;
    for (std::size_t i = start; i < stop; ++i) batch.push_back(std::async(std::launch::async, jobs[i]));
    for (auto& f : batch) results.push_back(f.get());
  }
  return results;
}

/// Scenario order used by run_afshar: {A, B, both coherent, both marked}
/// crossed with {wires out, wires in}.
inline std::vector<Scenario> afshar_scenarios(const MarkerOverlap& gamma) {
  std::vector<Scenario> out;
  for (const auto& [slits, marker] :
       std::vector<std::pair<SlitSelection, std::optional<MarkerOverlap>>>{{SlitSelection::kA, std::nullopt},
                                                                           {SlitSelection::kB, std::nullopt},
                                                                           {SlitSelection::kBoth, std::nullopt},
                                                                           {SlitSelection::kBoth, gamma}}) {
    for (bool wires : {false, true}) out.push_back(Scenario{slits, wires, marker});
  }
  return out;
}

inline AfsharReport run_afshar(const ApparatusConfig& config, std::size_t threads = worker_threads()) {
  config.validate();
  AfsharReport report;
  report.config = config;
  report.wire_positions = dark_fringe_positions(config, config.wire_count);

  const auto scenarios = afshar_scenarios(config.marker_gamma);
  std::vector<std::function<ScenarioResult()>> jobs;
  for (const auto& s : scenarios) jobs.emplace_back([&config, s] { return run_scenario(config, s); });
  const auto results = run_parallel(jobs, threads);

  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    ScenarioEntry entry{scenarios[i], results[i], 0.0};
    if (scenarios[i].wires_in) {
      const auto& open = results[i - 1];  // wires-out partner precedes it
      const double without = open.power_DA + open.power_DB;
      const double with = results[i].power_DA + results[i].power_DB;
      entry.relative_loss = without > 0.0 ? std::clamp(1.0 - with / without, 0.0, 1.0) : 0.0;
    }
    report.entries.push_back(entry);
  }
  const double v = analytic_visibility(1.0, 1.0, config.marker_gamma);
  report.duality = duality_report(std::min(v, 1.0), distinguishability(config.marker_gamma));
  return report;
}

struct SweepRow {
  double gamma_abs = 0.0;
  double visibility = 0.0;
  double distinguishability = 0.0;
  double duality_sum = 0.0;
};

/// Wire-plane visibility and distinguishability for each |gamma|, using the
/// configured marker phase. Rows follow the input order.
inline std::vector<SweepRow> gamma_sweep(const ApparatusConfig& config, const std::vector<double>& gammas) {
  config.validate();
  for (double g : gammas) detail::require(g >= 0.0 && g <= 1.0, "gamma_sweep: |gamma| outside [0, 1]");
  const Scenario marked{SlitSelection::kBoth, false, MarkerOverlap(1.0)};
  const auto branches = detail::propagate_all(detail::slit_branches(config, marked), config.dist_slit_to_wires, "wire");
  std::vector<SweepRow> rows;
  rows.reserve(gammas.size());
  for (double g : gammas) {
    const auto gamma = MarkerOverlap::from_polar(g, config.marker_gamma.phase());
    const double v = central_fringe_visibility(config, marked_intensity(MarkedFieldPair(branches[0], branches[1], gamma)));
    const double d = distinguishability(gamma);
    rows.push_back({g, v, d, v * v + d * d});
  }
  return rows;
}

}  // namespace fringeworks
