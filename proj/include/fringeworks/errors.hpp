#pragma once

#include <stdexcept>
#include <string>

namespace fringeworks {

/// Raised when an input violates a documented precondition or type invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a propagation distance exceeds what the sampling grid can
/// represent without aliasing.
class AliasingError : public std::runtime_error {
 public:
  AliasingError(const std::string& what, double max_safe_distance)
      : std::runtime_error(what), max_safe_distance_(max_safe_distance) {}

  double max_safe_distance() const noexcept { return max_safe_distance_; }

 private:
  double max_safe_distance_;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

}  // namespace detail
}  // namespace fringeworks
