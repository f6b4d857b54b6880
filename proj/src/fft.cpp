#include "locop/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <utility>

namespace locop {
namespace {

std::mutex g_plan_mutex;

struct PlanKey {
  std::size_t n, stride, howmany, dist;
  int sign;
  auto operator<=>(const PlanKey&) const = default;
};

// Plans are made with FFTW_UNALIGNED so they can run directly on any
// caller buffer through fftw_execute_dft.
fftw_plan plan_for(const PlanKey& key) {
  static std::map<PlanKey, fftw_plan> cache;
  std::lock_guard lock(g_plan_mutex);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const std::size_t span = (key.howmany - 1) * key.dist + (key.n - 1) * key.stride + 1;
  auto* tmp = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * span));
  const int n = static_cast<int>(key.n);
  fftw_plan p = fftw_plan_many_dft(1, &n, static_cast<int>(key.howmany), tmp, nullptr, static_cast<int>(key.stride),
                                   static_cast<int>(key.dist), tmp, nullptr, static_cast<int>(key.stride),
                                   static_cast<int>(key.dist), key.sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(tmp);
  cache.emplace(key, p);
  return p;
}

}  // namespace

void dft_inplace(std::span<std::complex<double>> data, int sign) { dft_batch(data, data.size(), sign); }

void dft_batch(std::span<std::complex<double>> data, std::size_t n, int sign) {
  if (n <= 1 || data.size() < n) return;
  dft_strided(data.data(), n, 1, data.size() / n, n, sign);
}

void dft_strided(std::complex<double>* data, std::size_t n, std::size_t stride, std::size_t howmany,
                 std::size_t dist, int sign) {
  if (n <= 1 || howmany == 0) return;
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan_for({n, stride, howmany, dist, sign}), p, p);
}

}  // namespace locop
