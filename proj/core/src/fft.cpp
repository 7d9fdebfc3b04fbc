#include "mckean/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <numbers>

#include "mckean/errors.hpp"

namespace mckean {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct RealFft::Impl {
  std::size_t n;
  double* real;
  fftw_complex* spec;
  fftw_plan fwd;
  fftw_plan bwd;

  explicit Impl(std::size_t size) : n(size) {
    std::lock_guard lock(planner_mutex());
    real = fftw_alloc_real(n);
    spec = fftw_alloc_complex(n / 2 + 1);
    const int len = static_cast<int>(n);
    fwd = fftw_plan_dft_r2c_1d(len, real, spec, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_1d(len, spec, real, FFTW_ESTIMATE);
  }
  ~Impl() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(real);
    fftw_free(spec);
  }
};

RealFft::RealFft(std::size_t n) : impl_(std::make_unique<Impl>(n)) {
  if (n < 2) throw PreconditionError("FFT length must be at least 2");
}
RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

std::size_t RealFft::size() const noexcept { return impl_->n; }

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) {
  std::copy(in.begin(), in.end(), impl_->real);
  fftw_execute(impl_->fwd);
  for (std::size_t k = 0; k <= impl_->n / 2; ++k) {
    out[k] = {impl_->spec[k][0], impl_->spec[k][1]};
  }
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) {
  for (std::size_t k = 0; k <= impl_->n / 2; ++k) {
    impl_->spec[k][0] = in[k].real();
    impl_->spec[k][1] = in[k].imag();
  }
  fftw_execute(impl_->bwd);  // destroys spec, which is scratch anyway
  const double scale = 1.0 / static_cast<double>(impl_->n);
  for (std::size_t i = 0; i < impl_->n; ++i) out[i] = impl_->real[i] * scale;
}

Convolver::Convolver(const Grid& grid, const std::function<double(double)>& kernel)
    : grid_(grid),
      padded_(grid.is_torus() ? grid.size : 2 * grid.size),
      fft_(padded_),
      kernel_hat_(padded_ / 2 + 1),
      work_(padded_),
      spectrum_(padded_ / 2 + 1) {
  const std::size_t M = grid.size;
  std::vector<double> k(padded_, 0.0);
  if (grid.is_torus()) {
    for (std::size_t i = 0; i < M; ++i) k[i] = kernel(static_cast<double>(i) * grid.dx) * grid.dx;
  } else {
    // offsets 0..M-1 at the front, -(M-1)..-1 wrapped to the back
    for (std::size_t i = 0; i < M; ++i) k[i] = kernel(static_cast<double>(i) * grid.dx) * grid.dx;
    for (std::size_t i = 1; i < M; ++i) {
      k[padded_ - i] = kernel(-static_cast<double>(i) * grid.dx) * grid.dx;
    }
  }
  fft_.forward(k, kernel_hat_);
}

void Convolver::apply(std::span<const double> f, std::span<double> out) {
  const std::size_t M = grid_.size;
  std::fill(work_.begin(), work_.end(), 0.0);
  std::copy(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(M), work_.begin());
  fft_.forward(work_, spectrum_);
  for (std::size_t k = 0; k < spectrum_.size(); ++k) spectrum_[k] *= kernel_hat_[k];
  fft_.inverse(spectrum_, work_);
  std::copy(work_.begin(), work_.begin() + static_cast<std::ptrdiff_t>(M), out.begin());
}

std::vector<double> Convolver::apply(std::span<const double> f) {
  std::vector<double> out(grid_.size);
  apply(f, out);
  return out;
}

std::vector<double> spectral_derivative(const Grid& grid, std::span<const double> f) {
  if (!grid.is_torus()) throw UnsupportedModelError("spectral derivative needs a torus grid");
  const std::size_t M = grid.size;
  RealFft fft(M);
  std::vector<std::complex<double>> c(M / 2 + 1);
  fft.forward(f, c);
  const double period = grid.dx * static_cast<double>(M);
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (k == M / 2) {
      c[k] = 0.0;
      continue;
    }
    c[k] *= std::complex<double>(0.0, 2.0 * std::numbers::pi * static_cast<double>(k) / period);
  }
  std::vector<double> out(M);
  fft.inverse(c, out);
  return out;
}

}  // namespace mckean
