#pragma once

// Runtime invariant checks behind `fringeworks selftest`. Each check reports
// the worst deviation it observed next to the bound it enforces.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fringeworks/experiment.hpp"
#include "fringeworks/optics.hpp"
#include "fringeworks/quantum.hpp"
#include "fringeworks/testing/oracles.hpp"

namespace fringeworks {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline std::string fmt_bound(double worst, double bound) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "worst %.3e (bound %.1e)", worst, bound);
  return buf;
}

inline CheckResult bounded(std::string name, double worst, double bound) {
  return {std::move(name), worst <= bound, fmt_bound(worst, bound)};
}

inline Complex random_amplitude(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return {n(rng), n(rng)};
}

inline std::vector<Complex> random_unit_vector(std::mt19937_64& rng, std::size_t dim) {
  std::vector<Complex> v(dim);
  double norm2 = 0.0;
  for (auto& c : v) {
    c = random_amplitude(rng);
    norm2 += std::norm(c);
  }
  for (auto& c : v) c /= std::sqrt(norm2);
  return v;
}

inline MarkerOverlap random_overlap(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return MarkerOverlap::from_polar(std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng));
}

inline FieldGrid gaussian_beam(const GridGeometry& g, double wavelength, double waist, double center = 0.0) {
  std::vector<Complex> s(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    const double x = (g.position(i) - center) / waist;
    s[i] = std::exp(-x * x);
  }
  return FieldGrid(g, wavelength, std::move(s));
}

inline double max_abs_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

inline double max_abs(const std::vector<Complex>& a) {
  double m = 0.0;
  for (const auto& c : a) m = std::max(m, std::abs(c));
  return m;
}

inline double max_value(std::span<const double> v) { return *std::ranges::max_element(v); }

}  // namespace detail

inline std::vector<CheckResult> quantum_core_checks() {
  using namespace detail;
  std::vector<CheckResult> out;
  std::mt19937_64 rng(20240917);

  double negative = 0.0;
  double reduce = 0.0;
  double incoherent = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const SlitAmplitudePair pair(random_amplitude(rng), random_amplitude(rng));
    const double scale = std::max(1.0, std::norm(pair.a.value()) + std::norm(pair.b.value()));
    negative = std::max(negative, -intensity_with_marker(pair, random_overlap(rng)));
    reduce = std::max(reduce, std::abs(intensity_with_marker(pair, 1.0) - intensity_no_marker(pair)) / scale);
    incoherent = std::max(incoherent, std::abs(intensity_with_marker(pair, 0.0) - std::norm(pair.a.value()) -
                                               std::norm(pair.b.value())) /
                                          scale);
  }
  out.push_back(bounded("quantum: intensity_with_marker >= 0", std::max(0.0, negative), 0.0));
  out.push_back(bounded("quantum: gamma=1 reduces to intensity_no_marker", reduce, 1e-12));
  out.push_back(bounded("quantum: gamma=0 gives |a|^2 + |b|^2", incoherent, 1e-12));

  double born = 0.0;
  const std::vector<Complex> phi{1.0};
  for (int i = 0; i < 1000; ++i) {
    const Complex a = random_amplitude(rng);
    const Complex b = random_amplitude(rng);
    const auto vu = random_unit_vector(rng, 2);
    const auto vl = random_unit_vector(rng, 2);
    const double expected = testing::joint_state_probability(a, b, vu, vl, phi);
    const double got = intensity_with_marker(SlitAmplitudePair(a, b), marker_overlap(MarkerState(vu), MarkerState(vl)));
    born = std::max(born, std::abs(got - expected) / std::max(1.0, expected));
  }
  out.push_back(bounded("quantum: Born-rule joint-state equivalence", born, 1e-10));

  double saturation = 0.0;
  double bound = 0.0;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const auto gamma = random_overlap(rng);
    const double v = analytic_visibility(1.0, 1.0, gamma);
    const double d = distinguishability(gamma);
    saturation = std::max(saturation, std::abs(v * v + d * d - 1.0));
    const double va = analytic_visibility(u(rng) + 1e-3, u(rng), gamma);
    bound = std::max(bound, va * va + d * d - 1.0);
  }
  out.push_back(bounded("quantum: duality saturation for equal arms", saturation, 1e-10));
  out.push_back(bounded("quantum: duality bound V^2 + D^2 <= 1", std::max(0.0, bound), 1e-10));

  double scan = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double ma = u(rng) + 0.05;
    const double mb = u(rng) + 0.05;
    const auto gamma = random_overlap(rng);
    std::vector<double> values(8192);
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(values.size());
      values[k] = intensity_with_marker(SlitAmplitudePair(Complex(ma, 0.0), std::polar(mb, phase)), gamma);
    }
    const double measured = visibility(IntensityProfile(0.0, 1.0, std::move(values)));
    scan = std::max(scan, std::abs(measured - analytic_visibility(ma, mb, gamma)));
  }
  out.push_back(bounded("quantum: sampled visibility matches analytic_visibility", scan, 1e-6));
  return out;
}

inline std::vector<CheckResult> wave_optics_checks(const ApparatusConfig& config) {
  using namespace detail;
  std::vector<CheckResult> out;
  const auto& g = config.grid;
  const double lambda = config.wavelength;

  {
    const auto f = gaussian_beam(g, lambda, 40.0 * g.spacing(), -200.0 * g.spacing());
    const auto h = apply_mask(FieldGrid::uniform(g, lambda), make_double_slit(g, config.slit_separation, config.slit_width));
    const Complex alpha(0.7, -0.3);
    const Complex beta(-1.2, 0.5);
    std::vector<Complex> mix(g.n);
    for (std::size_t i = 0; i < g.n; ++i) mix[i] = alpha * f.samples()[i] + beta * h.samples()[i];
    const double z = config.dist_slit_to_wires;
    const auto lhs = propagate(FieldGrid(g, lambda, mix), z);
    const auto pf = propagate(f, z);
    const auto ph = propagate(h, z);
    std::vector<Complex> rhs(g.n);
    for (std::size_t i = 0; i < g.n; ++i) rhs[i] = alpha * pf.samples()[i] + beta * ph.samples()[i];
    out.push_back(bounded("optics: propagation is linear", max_abs_diff(lhs.samples(), rhs) / max_abs(rhs), 1e-10));
  }

  {
    const double waist = 0.01 * g.extent;
    const auto f = gaussian_beam(g, lambda, waist);
    // Binary-exact split: with decimal fractions z1 + z2 itself rounds, and at
    // ~1e6 wavelengths one ulp of z is already ~5e-10 rad of carrier phase.
    const double z1 = 0.25 * config.dist_slit_to_wires;
    const double z2 = 0.5 * config.dist_slit_to_wires;
    const auto once = propagate(f, z1 + z2);
    const auto twice = propagate(propagate(f, z1), z2);
    const double drift = std::abs(total_power(once) - total_power(f)) / total_power(f);
    out.push_back(bounded("optics: propagation conserves power of band-limited fields", drift, 1e-9));
    out.push_back(bounded("optics: propagate(z1) then propagate(z2) equals propagate(z1+z2)",
                          max_abs_diff(once.samples(), twice.samples()) / max_abs(once.samples()), 1e-9));
  }

  {
    const auto slits = apply_mask(FieldGrid::uniform(g, lambda), make_double_slit(g, config.slit_separation, config.slit_width));
    const double z = config.dist_slit_to_wires;
    const auto far = propagate(slits, z);
    std::vector<testing::SourceSample> sources;
    for (std::size_t i = 0; i < g.n; ++i) {
      if (std::abs(slits.samples()[i]) > 0.0) sources.push_back({slits.position(i), slits.samples()[i]});
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = g.n / 4; i < 3 * g.n / 4; ++i) {
      const double ref = std::norm(testing::rayleigh_sommerfeld(sources, g.spacing(), lambda, z, slits.position(i)));
      const double got = std::norm(far.samples()[i]);
      num += (got - ref) * (got - ref);
      den += ref * ref;
    }
    out.push_back(bounded("optics: wire-plane intensity matches Rayleigh-Sommerfeld quadrature",
                          std::sqrt(num / den), 1e-4));
  }

  {
    const auto a = propagate(apply_mask(FieldGrid::uniform(g, lambda), make_slit(g, config.slit_separation / 2, config.slit_width)),
                             config.dist_slit_to_wires);
    const auto b = propagate(apply_mask(FieldGrid::uniform(g, lambda), make_slit(g, -config.slit_separation / 2, config.slit_width)),
                             config.dist_slit_to_wires);
    const auto marked = marked_intensity(MarkedFieldPair(a, b, 0.0));
    const auto ia = intensity(a);
    const auto ib = intensity(b);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
      worst = std::max(worst, std::abs(marked.values()[i] - ia.values()[i] - ib.values()[i]));
    }
    out.push_back(bounded("optics: marked intensity at gamma=0 is the sum of branch intensities",
                          worst / max_value(marked.values()), 1e-12));
  }
  return out;
}

inline std::vector<CheckResult> experiment_checks(const ApparatusConfig& config) {
  using namespace detail;
  std::vector<CheckResult> out;
  const auto report = run_afshar(config);

  double accounting = 0.0;
  double wires_out_loss = 0.0;
  for (const auto& e : report.entries) {
    const auto& r = e.result;
    accounting = std::max(accounting, (r.power_intercepted_by_wires + r.power_total_at_image - r.power_input) / r.power_input);
    if (!e.scenario.wires_in) wires_out_loss = std::max(wires_out_loss, std::abs(e.relative_loss));
  }
  out.push_back(bounded("experiment: intercepted + image power <= input power", std::max(0.0, accounting), 1e-6));
  out.push_back(bounded("experiment: wires-out relative loss is zero", wires_out_loss, 1e-9));

  double swap = 0.0;
  for (const char* wires : {"out", "in"}) {
    const auto& a = report.at(std::string("slits=A,wires=") + wires + ",marker=off").result;
    const auto& b = report.at(std::string("slits=B,wires=") + wires + ",marker=off").result;
    swap = std::max(swap, std::abs(a.power_DA - b.power_DB) / a.power_DA);
    swap = std::max(swap, std::abs(a.power_DB - b.power_DA) / a.power_DA);
  }
  out.push_back(bounded("experiment: A-only and B-only are mirror images", swap, 1e-6));

  std::vector<double> gammas;
  for (int i = 0; i <= 20; ++i) gammas.push_back(i / 20.0);
  const auto rows = gamma_sweep(config, gammas);
  double drop = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) drop = std::max(drop, rows[i - 1].visibility - rows[i].visibility);
  out.push_back(bounded("experiment: visibility is nondecreasing in |gamma|", std::max(0.0, drop), 1e-3));

  PlaneProfiles coherent;
  PlaneProfiles marked;
  run_scenario(config, Scenario{SlitSelection::kBoth, false, std::nullopt}, &coherent);
  run_scenario(config, Scenario{SlitSelection::kBoth, false, MarkerOverlap(1.0)}, &marked);
  double worst = 0.0;
  for (std::size_t i = 0; i < coherent.wires.size(); ++i) {
    worst = std::max(worst, std::abs(coherent.wires.values()[i] - marked.wires.values()[i]));
  }
  out.push_back(bounded("experiment: coherent profile equals marked profile at gamma=1",
                        worst / max_value(coherent.wires.values()), 1e-12));
  return out;
}

inline std::vector<CheckResult> run_selftest(const ApparatusConfig& config) {
  std::vector<CheckResult> all;
  const std::vector<std::function<std::vector<CheckResult>()>> groups{
      [] { return quantum_core_checks(); },
      [&] { return wave_optics_checks(config); },
      [&] { return experiment_checks(config); },
  };
  for (const auto& group : groups) {
    try {
      for (auto& r : group()) all.push_back(std::move(r));
    } catch (const std::exception& e) {
      all.push_back({"check group aborted", false, e.what()});
    }
  }
  return all;
}

}  // namespace fringeworks
