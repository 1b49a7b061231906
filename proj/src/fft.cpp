#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace dstft::detail {
namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are made once per (shape, sign) and never destroyed.
struct PlanCache {
  std::mutex mu;
  std::map<std::pair<std::vector<int>, int>, fftw_plan> plans;

  fftw_plan get(const std::vector<int>& dims, int sign) {
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(dims, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    std::size_t total = 1;
    for (int d : dims) total *= static_cast<std::size_t>(d);
    fftw_complex* buf = fftw_alloc_complex(total);
    fftw_plan p = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf,
                                sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (!p) throw std::runtime_error("fft: planning failed");
    plans.emplace(key, p);
    return p;
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

void fft_inplace(std::span<cd> data, std::span<const std::size_t> dims, int sign) {
  std::vector<int> d(dims.begin(), dims.end());
  fftw_plan p = cache().get(d, sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p, ptr, ptr);
}

void scale_separable(std::span<cd> data, std::span<const std::size_t> dims,
                     const std::vector<std::vector<cd>>& factors) {
  std::size_t d = dims.size();
  std::size_t inner = dims[d - 1];
  std::size_t outer = data.size() / inner;
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t o = 0; o < outer; ++o) {
    cd prefix = 1.0;
    for (std::size_t a = 0; a + 1 < d; ++a) prefix *= factors[a][idx[a]];
    cd* row = data.data() + o * inner;
    const auto& last = factors[d - 1];
    for (std::size_t j = 0; j < inner; ++j) row[j] *= prefix * last[j];
    for (std::size_t a = d - 1; a-- > 0;) {
      if (++idx[a] < dims[a]) break;
      idx[a] = 0;
    }
  }
}

cd unit_root(long long num, long long den) {
  long long r = num % den;
  if (r < 0) r += den;
  return std::polar(1.0, 2.0 * 3.14159265358979323846 * static_cast<double>(r) /
                             static_cast<double>(den));
}

}  // namespace dstft::detail
