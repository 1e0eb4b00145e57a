#include "spreadspec/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include <fftw3.h>

namespace spreadspec::fft {

namespace {

class PlanCache {
 public:
  ~PlanCache() {
    for (auto &[key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    // FFTW planning is not thread-safe; execution through fftw_execute_dft is.
    auto *in = fftw_alloc_complex(n);
    auto *out = fftw_alloc_complex(n);
    fftw_plan plan = fftw_plan_dft_1d(n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache &cache() {
  static PlanCache c;
  return c;
}

CVec run(const CVec &x, int sign) {
  const auto n = static_cast<int>(x.size());
  CVec out(n);
  if (n == 0) return out;
  fftw_plan plan = cache().get(n, sign);
  // FFTW takes a non-const input pointer even for out-of-place transforms.
  CVec in = x;
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex *>(in.data()),
                   reinterpret_cast<fftw_complex *>(out.data()));
  out *= 1.0 / std::sqrt(static_cast<double>(n));
  return out;
}

}  // namespace

CVec dft(const CVec &x) { return run(x, FFTW_FORWARD); }
CVec idft(const CVec &x) { return run(x, FFTW_BACKWARD); }

}  // namespace spreadspec::fft
