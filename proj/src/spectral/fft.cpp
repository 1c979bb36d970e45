#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "nsaudit/spectral.hpp"

namespace nsaudit::spectral {
namespace {

// FFTW_ESTIMATE keeps the chosen algorithm, and hence the rounding,
// identical from run to run.
struct PlanPair {
  fftw_plan plus;
  fftw_plan minus;
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.plus);
      fftw_destroy_plan(p.minus);
    }
  }

  // rank is 1 or 3; n is the length per axis.
  PlanPair get(int rank, int n) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_pair(rank, n);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t size =
        rank == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n * n;
    auto* buf = fftw_alloc_complex(size);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair p{};
    if (rank == 1) {
      p = {fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, flags),
           fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, flags)};
    } else {
      p = {fftw_plan_dft_3d(n, n, n, buf, buf, FFTW_BACKWARD, flags),
           fftw_plan_dft_3d(n, n, n, buf, buf, FFTW_FORWARD, flags)};
    }
    fftw_free(buf);
    plans_.emplace(key, p);
    return p;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, PlanPair> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

void fft_inplace(const Grid3& g, std::span<cplx> data, int sign) {
  const PlanPair p = cache().get(3, g.n());
  auto* d = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(sign > 0 ? p.plus : p.minus, d, d);
}

void fft1_inplace(std::span<cplx> data, int sign) {
  const PlanPair p = cache().get(1, static_cast<int>(data.size()));
  auto* d = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(sign > 0 ? p.plus : p.minus, d, d);
}

}  // namespace nsaudit::spectral
