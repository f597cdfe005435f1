#include "fft_grid.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <new>
#include <tuple>

namespace nsverify::detail {

namespace {

// FFTW planning is not thread-safe; execution through fftw_execute_dft is.
std::mutex plan_mutex;

fftw_plan cached_plan(const std::array<int, 3>& dims, int sign) {
  static std::map<std::tuple<int, int, int, int>, fftw_plan> plans;
  const std::lock_guard lock(plan_mutex);
  const auto key = std::make_tuple(dims[0], dims[1], dims[2], sign);
  if (auto it = plans.find(key); it != plans.end()) return it->second;
  const std::size_t n = static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  fftw_complex* scratch = fftw_alloc_complex(n);
  if (!scratch) throw std::bad_alloc();
  fftw_plan plan = fftw_plan_dft_3d(dims[0], dims[1], dims[2], scratch, scratch, sign,
                                    FFTW_ESTIMATE);
  fftw_free(scratch);
  plans.emplace(key, plan);
  return plan;
}

}  // namespace

int fft_friendly_size(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (int p : {2, 3, 5, 7})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

ComplexGrid::ComplexGrid(const std::array<int, 3>& dims)
    : dims_(dims),
      size_(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2]),
      data_(fftw_alloc_complex(size_)) {
  if (!data_) throw std::bad_alloc();
  fill_zero();
}

ComplexGrid::~ComplexGrid() {
  if (data_) fftw_free(data_);
}

ComplexGrid::ComplexGrid(ComplexGrid&& other) noexcept
    : dims_(other.dims_), size_(other.size_), data_(other.data_) {
  other.data_ = nullptr;
  other.size_ = 0;
}

void ComplexGrid::fill_zero() { std::fill(data(), data() + size_, std::complex<double>{}); }

std::size_t ComplexGrid::wrap_index(int k1, int k2, int k3) const {
  auto wrap = [](int k, int m) { return static_cast<std::size_t>(((k % m) + m) % m); };
  return (wrap(k1, dims_[0]) * dims_[1] + wrap(k2, dims_[1])) * dims_[2] + wrap(k3, dims_[2]);
}

void ComplexGrid::transform(int sign) {
  fftw_execute_dft(cached_plan(dims_, sign), data_, data_);
}

}  // namespace nsverify::detail
