#pragma once

#include <fftw3.h>

#include <memory>
#include <span>
#include <vector>

#include "dbar/grid.hpp"

namespace dbar {

/// fftw_malloc'd complex buffer.
class FftBuffer {
public:
  explicit FftBuffer(std::size_t count);
  ~FftBuffer();
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;

  cplx* data() { return data_; }
  std::size_t size() const { return count_; }
  fftw_complex* raw() { return reinterpret_cast<fftw_complex*>(data_); }

private:
  cplx* data_;
  std::size_t count_;
};

class FftPlan {
public:
  FftPlan() = default;
  explicit FftPlan(fftw_plan p) : plan_(p) {}
  ~FftPlan();
  FftPlan(FftPlan&& o) noexcept : plan_(o.plan_) { o.plan_ = nullptr; }
  FftPlan& operator=(FftPlan&& o) noexcept;

  void execute() const { fftw_execute(plan_); }

private:
  fftw_plan plan_ = nullptr;
};

/// Linear (non-circular) convolution of n x n data with a kernel defined on
/// lattice offsets in (-n, n)^2, via 2n x 2n zero padding. Only the n rows
/// carrying data are transformed along the fast axis, in both directions.
///
/// Not thread-safe; use `convolution_workspace(n)` for a per-thread instance.
class PaddedConvolution {
public:
  explicit PaddedConvolution(int n);

  int n() const { return n_; }
  /// out = kernel * in. `spectrum` is the normalised 2n x 2n forward
  /// transform from `kernel_spectrum`. `out` may alias `in`.
  void apply(std::span<const cplx> in, std::span<const cplx> spectrum,
             std::span<cplx> out);

private:
  int n_;
  int N_;
  int stride_;
  FftBuffer buf_;
  FftPlan rows_fwd_, cols_fwd_, cols_bwd_, rows_bwd_;
};

PaddedConvolution& convolution_workspace(int n);

/// Spectrum of the circularly stored kernel weight(a, b), a, b in (-n, n),
/// scaled by 1 / (2n)^2 so that `PaddedConvolution::apply` needs no
/// further normalisation.
template <class Weight>
std::vector<cplx> kernel_spectrum(int n, Weight&& weight);

/// In-place unnormalised periodic n x n transform (per-thread instance).
class PeriodicFft {
public:
  explicit PeriodicFft(int n);
  int n() const { return n_; }
  void forward(std::span<cplx> data);
  void backward(std::span<cplx> data);

private:
  int n_;
  FftBuffer buf_;
  FftPlan fwd_, bwd_;
};

PeriodicFft& periodic_fft(int n);

std::vector<cplx> kernel_spectrum_impl(int n, const std::vector<cplx>& circ);

template <class Weight>
std::vector<cplx> kernel_spectrum(int n, Weight&& weight) {
  const int N = 2 * n;
  std::vector<cplx> circ(static_cast<std::size_t>(N) * N, cplx{});
  for (int a = -(n - 1); a <= n - 1; ++a) {
    const int ia = (a + N) % N;
    for (int b = -(n - 1); b <= n - 1; ++b) {
      const int ib = (b + N) % N;
      circ[static_cast<std::size_t>(ia) * N + ib] = weight(a, b);
    }
  }
  return kernel_spectrum_impl(n, circ);
}

} // namespace dbar
