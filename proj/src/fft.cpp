#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace bsforge::detail {

namespace {

struct PlanCache {
  std::mutex mutex;
  std::map<std::pair<std::vector<int>, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto &[key, plan] : plans) {
      fftw_destroy_plan(plan);
    }
  }
};

PlanCache &cache() {
  static PlanCache instance;
  return instance;
}

// FFTW_ESTIMATE keeps the chosen algorithm (and therefore the roundoff) independent of
// timing, so repeated runs are bit-identical.
fftw_plan plan_for(const std::vector<int> &sizes, int sign) {
  auto &c = cache();
  std::lock_guard lock(c.mutex);
  auto key = std::make_pair(sizes, sign);
  if (auto it = c.plans.find(key); it != c.plans.end()) {
    return it->second;
  }
  std::size_t n = 1;
  for (int s : sizes) {
    n *= static_cast<std::size_t>(s);
  }
  auto *scratch = fftw_alloc_complex(n);
  fftw_plan plan = fftw_plan_dft(static_cast<int>(sizes.size()), sizes.data(), scratch, scratch,
                                 sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(scratch);
  if (plan == nullptr) {
    throw std::runtime_error("FFTW failed to create a plan");
  }
  c.plans.emplace(std::move(key), plan);
  return plan;
}

} // namespace

void fft_inplace(std::span<std::complex<double>> data, const std::vector<int> &sizes,
                 FftDirection direction) {
  const int sign = direction == FftDirection::forward ? FFTW_FORWARD : FFTW_BACKWARD;
  fftw_plan plan = plan_for(sizes, sign);
  auto *ptr = reinterpret_cast<fftw_complex *>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

} // namespace bsforge::detail
