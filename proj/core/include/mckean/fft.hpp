#ifndef MCKEAN_FFT_HPP
#define MCKEAN_FFT_HPP

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "mckean/grid.hpp"

namespace mckean {

// Real-to-complex transform of fixed length backed by FFTW. Plans are created
// under a process-wide lock; an instance owns scratch buffers and must not be
// shared between threads while in use.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const noexcept;

  // out[k] = sum_j in[j] exp(-2 pi i j k / n), k = 0..n/2.
  void forward(std::span<const double> in, std::span<std::complex<double>> out);
  // Inverse including the 1/n factor.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Discrete convolution (K * f)(x_i) = sum_j K(x_i - x_j) f_j dx on a grid:
/// circulant on the torus, Toeplitz (zero-padded embedding) on an interval.
class Convolver {
 public:
  Convolver(const Grid& grid, const std::function<double(double)>& kernel);

  const Grid& grid() const noexcept { return grid_; }
  void apply(std::span<const double> f, std::span<double> out);
  std::vector<double> apply(std::span<const double> f);

 private:
  Grid grid_;
  std::size_t padded_;
  RealFft fft_;
  std::vector<std::complex<double>> kernel_hat_;
  std::vector<double> work_;
  std::vector<std::complex<double>> spectrum_;
};

// First derivative of periodic nodal data on a torus grid by FFT (the Nyquist
// mode is dropped).
std::vector<double> spectral_derivative(const Grid& grid, std::span<const double> f);

}  // namespace mckean

#endif  // MCKEAN_FFT_HPP
