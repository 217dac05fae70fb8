#include "pulsekit/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <utility>

#include "pulsekit/error.hpp"

namespace pulsekit {

namespace {

// FFTW planning is not thread-safe, execution on new arrays is. Plans are
// created once per (kind, size) under a lock with FFTW_UNALIGNED so any
// buffer may be passed to the new-array execute functions.
enum class PlanKind { R2C, Forward, Backward };

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [_, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(PlanKind kind, std::size_t n) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(kind, n);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    const int len = static_cast<int>(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = nullptr;
    if (kind == PlanKind::R2C) {
      auto* in = fftw_alloc_real(n);
      auto* out = fftw_alloc_complex(n / 2 + 1);
      plan = fftw_plan_dft_r2c_1d(len, in, out, flags);
      fftw_free(in);
      fftw_free(out);
    } else {
      auto* in = fftw_alloc_complex(n);
      auto* out = fftw_alloc_complex(n);
      plan = fftw_plan_dft_1d(len, in, out, kind == PlanKind::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
                              flags);
      fftw_free(in);
      fftw_free(out);
    }
    if (!plan) fail(Errc::InvalidArgument, "FFTW could not create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<PlanKind, std::size_t>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

std::vector<std::complex<double>> complex_transform(std::span<const std::complex<double>> x,
                                                    PlanKind kind) {
  if (x.empty()) fail(Errc::InvalidArgument, "FFT of an empty sequence");
  std::vector<std::complex<double>> in(x.begin(), x.end());
  std::vector<std::complex<double>> out(x.size());
  fftw_execute_dft(cache().get(kind, x.size()), as_fftw(in.data()), as_fftw(out.data()));
  return out;
}

}  // namespace

std::size_t next_pow2(std::size_t n) noexcept {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<std::complex<double>> rfft(std::span<const double> x, std::size_t n) {
  if (n == 0 || x.size() > n) fail(Errc::InvalidArgument, "rfft length must cover the input");
  std::vector<double> in(n, 0.0);
  std::copy(x.begin(), x.end(), in.begin());
  std::vector<std::complex<double>> out(n / 2 + 1);
  fftw_execute_dft_r2c(cache().get(PlanKind::R2C, n), in.data(), as_fftw(out.data()));
  return out;
}

std::vector<std::complex<double>> fft(std::span<const std::complex<double>> x) {
  return complex_transform(x, PlanKind::Forward);
}

std::vector<std::complex<double>> ifft(std::span<const std::complex<double>> x) {
  auto out = complex_transform(x, PlanKind::Backward);
  const double scale = 1.0 / static_cast<double>(x.size());
  for (auto& v : out) v *= scale;
  return out;
}

}  // namespace pulsekit
