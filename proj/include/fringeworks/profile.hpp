#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fringeworks/errors.hpp"

namespace fringeworks {

/// Intensity samples on a uniform, strictly increasing coordinate grid.
class IntensityProfile {
 public:
  IntensityProfile() = default;

  /// Positions x_i = first + i * spacing.
  IntensityProfile(double first, double spacing, std::vector<double> values)
      : values_(std::move(values)), spacing_(spacing) {
    detail::require(spacing > 0 && std::isfinite(spacing) && std::isfinite(first),
                    "IntensityProfile: spacing must be positive and finite");
    positions_.resize(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
      positions_[i] = first + static_cast<double>(i) * spacing;
    }
    check_values();
  }

  /// Builds from explicit positions (e.g. parsed back from a file). Each
  /// position must sit on the fitted lattice first + i * spacing to within
  /// 1e-3 of a spacing plus 1e-8 of its own magnitude, which admits positions
  /// printed with 9 significant digits.
  IntensityProfile(std::vector<double> positions, std::vector<double> values)
      : positions_(std::move(positions)), values_(std::move(values)) {
    detail::require(positions_.size() == values_.size(),
                    "IntensityProfile: positions and values differ in length");
    if (positions_.size() >= 2) {
      spacing_ = (positions_.back() - positions_.front()) /
                 static_cast<double>(positions_.size() - 1);
      detail::require(spacing_ > 0, "IntensityProfile: positions must be strictly increasing");
      for (std::size_t i = 1; i < positions_.size(); ++i) {
        detail::require(positions_[i] > positions_[i - 1], "IntensityProfile: positions must be strictly increasing");
        const double lattice = positions_.front() + static_cast<double>(i) * spacing_;
        detail::require(std::abs(positions_[i] - lattice) <= 1e-3 * spacing_ + 1e-8 * std::abs(positions_[i]),
                        "IntensityProfile: positions are not uniformly spaced");
      }
    } else {
      spacing_ = 1.0;
    }
    check_values();
  }

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  double spacing() const noexcept { return spacing_; }
  std::span<const double> positions() const noexcept { return positions_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Samples with lo <= x <= hi.
  IntensityProfile window(double lo, double hi) const {
    std::vector<double> vals;
    double first = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
      if (positions_[i] >= lo && positions_[i] <= hi) {
        if (vals.empty()) first = positions_[i];
        vals.push_back(values_[i]);
      }
    }
    return IntensityProfile(first, spacing_, std::move(vals));
  }

 private:
  void check_values() const {
    for (double v : values_) {
      detail::require(std::isfinite(v) && v >= 0.0,
                      "IntensityProfile: values must be finite and nonnegative");
    }
  }

  std::vector<double> positions_;
  std::vector<double> values_;
  double spacing_ = 1.0;
};

/// Fringe visibility (max - min) / (max + min) over the whole profile.
inline double visibility(const IntensityProfile& profile) {
  detail::require(!profile.empty(), "visibility: empty profile");
  const auto [lo, hi] = std::ranges::minmax_element(profile.values());
  const double sum = *hi + *lo;
  detail::require(sum > 0.0, "visibility: undefined for an all-zero profile");
  return (*hi - *lo) / sum;
}

/// Discrete integral of the profile, sum(values) * spacing.
inline double total_power(const IntensityProfile& profile) {
  double sum = 0.0;
  for (double v : profile.values()) sum += v;
  return sum * profile.spacing();
}

}  // namespace fringeworks
