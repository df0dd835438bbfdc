#pragma once

// Thin wrapper over FFTW for 1-D complex transforms. Plans are cached per
// (size, direction) and created with FFTW_UNALIGNED so they can execute on
// any std::vector buffer. Plan creation is serialized; execution is
// thread-safe.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace fringeworks::fft {

enum class Direction { kForward = FFTW_FORWARD, kBackward = FFTW_BACKWARD };

namespace detail {

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n, Direction dir) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_pair(n, static_cast<int>(dir));
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    // FFTW_ESTIMATE never touches the planning buffers' contents.
    std::vector<std::complex<double>> in(n), out(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()),
                                      static_cast<int>(dir), FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

inline PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace detail

/// Unnormalized DFT: forward uses exp(-2 pi i k n / N), backward exp(+...).
inline std::vector<std::complex<double>> transform(std::vector<std::complex<double>> in,
                                                   Direction dir) {
  std::vector<std::complex<double>> out(in.size());
  if (in.empty()) return out;
  fftw_plan plan = detail::plan_cache().get(in.size(), dir);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace fringeworks::fft
