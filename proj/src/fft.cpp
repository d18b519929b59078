#include "nlslab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <utility>
#include <vector>

namespace nlslab::fft {

namespace {

// Plans are built with FFTW_ESTIMATE so no timing-dependent algorithm choice
// leaks into the results; FFTW_UNALIGNED lets one plan serve every buffer.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n, int sign, bool inplace) {
    std::lock_guard<std::mutex> lock(mutex_);
    const Key key{n, sign, inplace};
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<std::complex<double>> a(n), b(n);
    auto* pa = reinterpret_cast<fftw_complex*>(a.data());
    auto* pb = inplace ? pa : reinterpret_cast<fftw_complex*>(b.data());
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), pa, pb, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  using Key = std::tuple<std::size_t, int, bool>;
  std::mutex mutex_;
  std::map<Key, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void run(const std::complex<double>* in, std::complex<double>* out, std::size_t n, int sign) {
  const bool inplace = in == out;
  fftw_plan plan = cache().get(n, sign, inplace);
  // New-array execution is thread safe for a fixed plan.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace

void forward(const std::complex<double>* in, std::complex<double>* out, std::size_t n) {
  run(in, out, n, FFTW_FORWARD);
}

void backward(const std::complex<double>* in, std::complex<double>* out, std::size_t n) {
  run(in, out, n, FFTW_BACKWARD);
}

}  // namespace nlslab::fft
