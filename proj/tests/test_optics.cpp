#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fringeworks/optics.hpp"
#include "fringeworks/testing/oracles.hpp"

using namespace fringeworks;
namespace oracle = fringeworks::testing;

namespace {

constexpr double kLambda = 650e-9;
const GridGeometry kDefault{std::size_t{1} << 16, 0.21};

FieldGrid gaussian(const GridGeometry& g, double waist, double center = 0.0) {
  std::vector<Complex> s(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    const double u = (g.position(i) - center) / waist;
    s[i] = std::exp(-u * u);
  }
  return FieldGrid(g, kLambda, std::move(s));
}

double open_length(const TransmissionMask& m) {
  double sum = 0.0;
  for (double t : m.samples()) sum += t;
  return sum * m.geometry().spacing();
}

std::vector<oracle::SourceSample> sources_of(const FieldGrid& f, double threshold = 0.0) {
  std::vector<oracle::SourceSample> out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (std::abs(f.samples()[i]) > threshold) out.push_back({f.position(i), f.samples()[i]});
  }
  return out;
}

// Golden-section minimum of |U(x)|^2 on [lo, hi].
template <typename F>
double argmin(F&& intensity_at, double lo, double hi) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 80; ++it) {
    const double a = hi - r * (hi - lo);
    const double b = lo + r * (hi - lo);
    (intensity_at(a) < intensity_at(b) ? hi : lo) = (intensity_at(a) < intensity_at(b) ? b : a);
  }
  return 0.5 * (lo + hi);
}

// Parabolic-refined sample minimum of a sampled intensity near x0.
double sampled_minimum(const FieldGrid& f, double x0, double halfwidth) {
  std::size_t best = 0;
  double best_v = INFINITY;
  for (std::size_t i = 1; i + 1 < f.size(); ++i) {
    if (std::abs(f.position(i) - x0) > halfwidth) continue;
    if (std::norm(f.samples()[i]) < best_v) {
      best_v = std::norm(f.samples()[i]);
      best = i;
    }
  }
  const double l = std::norm(f.samples()[best - 1]);
  const double c = std::norm(f.samples()[best]);
  const double r = std::norm(f.samples()[best + 1]);
  return f.position(best) + 0.5 * f.spacing() * (l - r) / (l - 2 * c + r);
}

}  // namespace

TEST(GridTest, PositionsAreCenteredOnZero) {
  const GridGeometry g{8, 8.0};
  EXPECT_EQ(g.position(0), -4.0);
  EXPECT_EQ(g.position(4), 0.0);
  EXPECT_THROW((GridGeometry{12, 1.0}.validate()), ValidationError);
  EXPECT_THROW((GridGeometry{8, 0.0}.validate()), ValidationError);
}

TEST(DoubleSlitTest, ZeroSeparationIsOneSlit) {
  const GridGeometry g{4096, 0.01};
  const auto two = make_double_slit(g, 0.0, 100e-6);
  const auto one = make_slit(g, 0.0, 100e-6);
  EXPECT_EQ(two.samples(), one.samples());
  EXPECT_NEAR(open_length(two), 100e-6, g.spacing());
}

TEST(DoubleSlitTest, OpenLengthIsTwoSlitWidths) {
  const auto m = make_double_slit(kDefault, 250e-6, 40e-6);
  EXPECT_NEAR(open_length(m), 80e-6, kDefault.spacing());
}

TEST(DoubleSlitTest, SymmetricAboutAxis) {
  const auto m = make_double_slit(kDefault, 250e-6, 40e-6);
  const auto& s = m.samples();
  // Sample n/2 + j sits at +j dx; n/2 - j at -j dx.
  for (std::size_t j = 1; j < kDefault.n / 2; ++j) ASSERT_EQ(s[kDefault.n / 2 + j], s[kDefault.n / 2 - j]) << j;
}

TEST(DoubleSlitTest, UnderResolvedSlitNamesMinimumN) {
  const GridGeometry coarse{1024, 0.21};
  try {
    make_double_slit(coarse, 250e-6, 40e-6);
    FAIL() << "expected a resolution error";
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("32768"), std::string::npos) << msg;
  }
}

TEST(DoubleSlitTest, RejectsApertureWiderThanGrid) {
  EXPECT_THROW(make_double_slit(GridGeometry{4096, 0.01}, 0.02, 100e-6), ValidationError);
}

TEST(WireGridTest, NoWiresIsFullyOpen) {
  const auto m = make_wire_grid(kDefault, {}, 100e-6);
  EXPECT_EQ(m.blocked_fraction(), 0.0);
}

TEST(WireGridTest, BlockedFractionIsArithmetic) {
  const GridGeometry g{8192, 0.01};
  const auto m = make_wire_grid(g, {-2.5e-3, -1.5e-3, -0.5e-3, 0.5e-3, 1.5e-3, 2.5e-3}, 50e-6);
  EXPECT_NEAR(m.blocked_fraction(), 0.03, 6 * g.spacing() / g.extent);
}

TEST(WireGridTest, RejectsOverlapAndSubResolution) {
  EXPECT_THROW(make_wire_grid(kDefault, {0.0, 50e-6}, 100e-6), ValidationError);
  EXPECT_THROW(make_wire_grid(kDefault, {0.0}, 1e-6), ValidationError);
  EXPECT_THROW(make_wire_grid(kDefault, {0.2}, 100e-6), ValidationError);
}

TEST(ApplyMaskTest, OnesZerosAndHalf) {
  const GridGeometry g{1024, 1.0};
  const auto field = gaussian(g, 0.1);
  const auto same = apply_mask(field, TransmissionMask(g, std::vector<double>(g.n, 1.0)));
  EXPECT_EQ(same.samples(), field.samples());
  const auto dark = apply_mask(field, TransmissionMask(g, std::vector<double>(g.n, 0.0)));
  EXPECT_EQ(total_power(dark), 0.0);

  std::vector<double> half(g.n, 0.0);
  for (std::size_t i = 0; i < g.n; i += 2) half[i] = 1.0;
  const auto u = FieldGrid::uniform(g, kLambda);
  EXPECT_NEAR(total_power(apply_mask(u, TransmissionMask(g, half))), 0.5 * total_power(u), 1e-12);
}

TEST(ApplyMaskTest, RejectsGeometryMismatch) {
  EXPECT_THROW(apply_mask(FieldGrid::uniform(GridGeometry{1024, 1.0}, kLambda),
                          TransmissionMask(GridGeometry{2048, 1.0}, std::vector<double>(2048, 1.0))),
               ValidationError);
}

TEST(PropagateTest, ZeroDistanceIsIdentity) {
  const auto f = gaussian(kDefault, 1e-3, 2e-3);
  const auto g = propagate(f, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) ASSERT_NEAR(std::abs(g.samples()[i] - f.samples()[i]), 0.0, 1e-12);
}

TEST(PropagateTest, ConservesPowerAndComposes) {
  const auto f = gaussian(kDefault, 2e-3);
  const auto once = propagate(f, 0.75);
  const auto twice = propagate(propagate(f, 0.25), 0.5);
  EXPECT_NEAR(total_power(once) / total_power(f), 1.0, 1e-9);
  double worst = 0.0;
  double peak = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    worst = std::max(worst, std::abs(once.samples()[i] - twice.samples()[i]));
    peak = std::max(peak, std::abs(once.samples()[i]));
  }
  EXPECT_LE(worst / peak, 1e-9);
}

TEST(PropagateTest, FringePeriodMatchesQuadratureAndPaxialFormula) {
  const double d = 250e-6;
  const double z = 1.0;
  const auto slits = apply_mask(FieldGrid::uniform(kDefault, kLambda), make_double_slit(kDefault, d, 40e-6));
  const auto far = propagate(slits, z);
  const auto src = sources_of(slits);
  auto rs_intensity = [&](double x) {
    return std::norm(oracle::rayleigh_sommerfeld(src, kDefault.spacing(), kLambda, z, x));
  };

  const double p = kLambda * z / d;
  for (int m : {0, 1, 2}) {
    const double x_q = argmin(rs_intensity, (m + 0.25) * p, (m + 0.75) * p);
    const double x_a = sampled_minimum(far, (m + 0.5) * p, 0.25 * p);
    EXPECT_NEAR(x_a, x_q, 0.05 * kDefault.spacing()) << "minimum " << m;
  }
  const double period = sampled_minimum(far, 0.5 * p, 0.25 * p) - sampled_minimum(far, -0.5 * p, 0.25 * p);
  EXPECT_NEAR(period / p, 1.0, 0.005);
}

TEST(PropagateTest, GaussianBeamWidthMatchesClosedForm) {
  const double waist = 0.5e-3;
  for (double z : {0.5, 1.0, 2.0}) {
    const auto f = propagate(gaussian(kDefault, waist), z);
    double m0 = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double w = std::norm(f.samples()[i]);
      m0 += w;
      m2 += w * f.position(i) * f.position(i);
    }
    EXPECT_NEAR(2.0 * std::sqrt(m2 / m0) / oracle::gaussian_beam_radius(waist, kLambda, z), 1.0, 1e-4) << z;
  }
}

TEST(PropagateTest, TooFarNamesSafeDistance) {
  const auto f = gaussian(kDefault, 1e-3);
  const double z_max = max_safe_distance(kDefault, kLambda);
  EXPECT_GT(z_max, 2.0);
  EXPECT_NO_THROW(propagate(f, z_max));
  try {
    propagate(f, 3.0);
    FAIL() << "expected AliasingError";
  } catch (const AliasingError& e) {
    EXPECT_DOUBLE_EQ(e.max_safe_distance(), z_max);
    EXPECT_NE(std::string(e.what()).find("maximum safe distance"), std::string::npos);
  }
  EXPECT_THROW(propagate(f, -1.0), ValidationError);
}

TEST(ThinLensTest, ConservesPower) {
  const auto f = gaussian(kDefault, 5e-3);
  EXPECT_NEAR(total_power(apply_thin_lens(f, LensSpec(0.55))), total_power(f), 1e-12 * total_power(f));
  EXPECT_THROW(LensSpec(0.0), ValidationError);
}

TEST(ThinLensTest, PointSourceAtFocusIsCollimated) {
  const double f = 0.55;
  const auto source = gaussian(kDefault, 10e-6);
  const auto out = apply_thin_lens(propagate(source, f), LensSpec(f));
  const double ref = std::arg(out.samples()[kDefault.n / 2]);
  double worst = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (std::abs(out.position(i)) > 2e-3) continue;
    worst = std::max(worst, std::abs(std::arg(out.samples()[i] * std::polar(1.0, -ref))));
  }
  EXPECT_LE(worst, 1e-3);
}

TEST(ThinLensTest, PlaneWaveFocusesOnAxisLikeQuadrature) {
  const double f = 0.55;
  const auto lensed = apply_thin_lens(gaussian(kDefault, 3e-3), LensSpec(f));
  const auto focus = propagate(lensed, f);

  std::size_t peak = 0;
  for (std::size_t i = 0; i < focus.size(); ++i) {
    if (std::norm(focus.samples()[i]) > std::norm(focus.samples()[peak])) peak = i;
  }
  EXPECT_LE(std::abs(focus.position(peak)), kDefault.spacing());

  const auto src = sources_of(lensed, 1e-12);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = peak - 30; i <= peak + 30; ++i) {
    const double ref = std::norm(oracle::rayleigh_sommerfeld(src, kDefault.spacing(), kLambda, f, focus.position(i)));
    const double got = std::norm(focus.samples()[i]);
    num += (got - ref) * (got - ref);
    den += ref * ref;
  }
  EXPECT_LE(std::sqrt(num / den), 1e-3);
}

TEST(IntensityTest, Examples) {
  const GridGeometry g{4, 4.0};
  const auto ones = intensity(FieldGrid::uniform(g, kLambda));
  for (double v : ones.values()) EXPECT_EQ(v, 1.0);
  const auto zeros = intensity(FieldGrid::uniform(g, kLambda, 0.0));
  for (double v : zeros.values()) EXPECT_EQ(v, 0.0);
  const auto single = intensity(FieldGrid(GridGeometry{2, 1.0}, kLambda, {0.0, Complex(1, 1) / std::sqrt(2.0)}));
  EXPECT_NEAR(single.values()[1], 1.0, 1e-15);
}

TEST(TotalPowerTest, Examples) {
  const GridGeometry g{1024, 0.3};
  EXPECT_EQ(total_power(FieldGrid::uniform(g, kLambda, 0.0)), 0.0);
  EXPECT_NEAR(total_power(FieldGrid::uniform(g, kLambda)), 0.3, 1e-12);
  const auto f = gaussian(g, 0.02);
  std::vector<Complex> doubled(f.samples());
  for (auto& s : doubled) s *= 2.0;
  EXPECT_NEAR(total_power(FieldGrid(g, kLambda, doubled)), 4.0 * total_power(f), 1e-12);
}

TEST(MarkedIntensityTest, OrthogonalMarkersSumBranchIntensities) {
  const auto u = gaussian(kDefault, 1e-3, 1e-3);
  const auto l = gaussian(kDefault, 1e-3, -0.5e-3);
  const auto got = marked_intensity(MarkedFieldPair(u, l, 0.0));
  const auto iu = intensity(u);
  const auto il = intensity(l);
  for (std::size_t i = 0; i < got.size(); ++i) ASSERT_NEAR(got.values()[i], iu.values()[i] + il.values()[i], 1e-12);
}

TEST(MarkedIntensityTest, IdenticalMarkersAreCoherent) {
  const auto u = gaussian(kDefault, 1e-3, 1e-3);
  const auto l = gaussian(kDefault, 1e-3, -0.5e-3);
  const auto got = marked_intensity(MarkedFieldPair(u, l, 1.0));
  for (std::size_t i = 0; i < got.size(); ++i) {
    ASSERT_NEAR(got.values()[i], std::norm(u.samples()[i] + l.samples()[i]), 1e-12);
  }
}

TEST(MarkedIntensityTest, HalfOverlapHalvesVisibility) {
  const double d = 250e-6;
  const double z = 1.0;
  const auto u = propagate(apply_mask(FieldGrid::uniform(kDefault, kLambda), make_slit(kDefault, d / 2, 40e-6)), z);
  const auto l = propagate(apply_mask(FieldGrid::uniform(kDefault, kLambda), make_slit(kDefault, -d / 2, 40e-6)), z);
  const MarkerOverlap gamma(0.5);
  const double p = kLambda * z / d;
  const double v = visibility(marked_intensity(MarkedFieldPair(u, l, gamma)).window(-p / 2, p / 2));
  EXPECT_NEAR(v, analytic_visibility(1.0, 1.0, gamma), 0.02);
}

TEST(MarkedIntensityTest, RejectsMismatchedBranches) {
  EXPECT_THROW(MarkedFieldPair(FieldGrid::uniform(GridGeometry{8, 1.0}, kLambda),
                               FieldGrid::uniform(GridGeometry{8, 1.0}, 500e-9), 0.0),
               ValidationError);
}
