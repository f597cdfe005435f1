#pragma once

// Thin RAII layer over FFTW for the zero-padded convolution kernels.

#include <fftw3.h>

#include <array>
#include <complex>
#include <cstddef>

namespace nsverify::detail {

/// Smallest n' >= n whose only prime factors are 2, 3, 5, 7.
int fft_friendly_size(int n);

/// fftw_malloc'd complex array on an M1 x M2 x M3 grid (row-major, last
/// index fastest).  All buffers share FFTW's alignment so cached plans can be
/// reused through the new-array execute interface.
class ComplexGrid {
 public:
  explicit ComplexGrid(const std::array<int, 3>& dims);
  ~ComplexGrid();
  ComplexGrid(const ComplexGrid&) = delete;
  ComplexGrid& operator=(const ComplexGrid&) = delete;
  ComplexGrid(ComplexGrid&& other) noexcept;
  ComplexGrid& operator=(ComplexGrid&&) = delete;

  const std::array<int, 3>& dims() const { return dims_; }
  std::size_t size() const { return size_; }
  std::complex<double>* data() { return reinterpret_cast<std::complex<double>*>(data_); }
  const std::complex<double>* data() const {
    return reinterpret_cast<const std::complex<double>*>(data_);
  }
  std::complex<double>& operator[](std::size_t i) { return data()[i]; }

  void fill_zero();
  /// Flat index of wave vector k (wrapped modulo the grid).
  std::size_t wrap_index(int k1, int k2, int k3) const;

  /// In-place unnormalized transform: sign -1 is forward (x -> k), +1 backward.
  void transform(int sign);

 private:
  std::array<int, 3> dims_;
  std::size_t size_;
  fftw_complex* data_;
};

}  // namespace nsverify::detail
