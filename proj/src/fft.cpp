#include "dbar/fft.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

namespace dbar {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// FFTW_ESTIMATE keeps plan selection independent of timing, which keeps
// results bitwise reproducible across runs and worker counts.
constexpr unsigned kPlanFlags = FFTW_ESTIMATE;

fftw_plan checked(fftw_plan p) {
  if (!p) throw std::runtime_error("FFTW planning failed");
  return p;
}

} // namespace

FftBuffer::FftBuffer(std::size_t count)
    : data_(reinterpret_cast<cplx*>(fftw_malloc(sizeof(cplx) * count))),
      count_(count) {
  if (!data_) throw std::bad_alloc();
  std::fill(data_, data_ + count_, cplx{});
}

FftBuffer::~FftBuffer() { fftw_free(data_); }

FftPlan::~FftPlan() {
  if (plan_) {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
}

FftPlan& FftPlan::operator=(FftPlan&& o) noexcept {
  if (this != &o) {
    if (plan_) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan_);
    }
    plan_ = o.plan_;
    o.plan_ = nullptr;
  }
  return *this;
}

// Rows are stored with a stride of N + 2: a power-of-two stride makes the
// column transforms thrash the cache.
PaddedConvolution::PaddedConvolution(int n)
    : n_(n), N_(2 * n), stride_(2 * n + 2),
      buf_(static_cast<std::size_t>(2 * n) * (2 * n + 2)) {
  std::lock_guard lock(planner_mutex());
  int len[] = {N_};
  fftw_complex* b = buf_.raw();
  // along k (contiguous), rows j < n only
  rows_fwd_ = FftPlan(checked(fftw_plan_many_dft(
      1, len, n_, b, nullptr, 1, stride_, b, nullptr, 1, stride_, FFTW_FORWARD,
      kPlanFlags)));
  rows_bwd_ = FftPlan(checked(fftw_plan_many_dft(
      1, len, n_, b, nullptr, 1, stride_, b, nullptr, 1, stride_, FFTW_BACKWARD,
      kPlanFlags)));
  // along j (row stride), all columns
  cols_fwd_ = FftPlan(checked(fftw_plan_many_dft(
      1, len, N_, b, nullptr, stride_, 1, b, nullptr, stride_, 1, FFTW_FORWARD,
      kPlanFlags)));
  cols_bwd_ = FftPlan(checked(fftw_plan_many_dft(
      1, len, N_, b, nullptr, stride_, 1, b, nullptr, stride_, 1, FFTW_BACKWARD,
      kPlanFlags)));
}

void PaddedConvolution::apply(std::span<const cplx> in,
                              std::span<const cplx> spectrum,
                              std::span<cplx> out) {
  const std::size_t n = n_, N = N_, S = stride_;
  cplx* b = buf_.data();
  std::fill(b, b + N * S, cplx{});
  for (std::size_t j = 0; j < n; ++j)
    std::copy_n(in.data() + j * n, n, b + j * S);
  rows_fwd_.execute();
  cols_fwd_.execute();
  for (std::size_t j = 0; j < N; ++j) {
    cplx* row = b + j * S;
    const cplx* spec = spectrum.data() + j * N;
    for (std::size_t k = 0; k < N; ++k) row[k] *= spec[k];
  }
  cols_bwd_.execute();
  rows_bwd_.execute();
  for (std::size_t j = 0; j < n; ++j)
    std::copy_n(b + j * S, n, out.data() + j * n);
}

PaddedConvolution& convolution_workspace(int n) {
  thread_local std::map<int, std::unique_ptr<PaddedConvolution>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<PaddedConvolution>(n);
  return *slot;
}

std::vector<cplx> kernel_spectrum_impl(int n, const std::vector<cplx>& circ) {
  const int N = 2 * n;
  FftBuffer buf(circ.size());
  std::copy(circ.begin(), circ.end(), buf.data());
  {
    FftPlan plan;
    {
      std::lock_guard lock(planner_mutex());
      plan = FftPlan(checked(fftw_plan_dft_2d(N, N, buf.raw(), buf.raw(),
                                              FFTW_FORWARD, kPlanFlags)));
    }
    plan.execute();
  }
  const double scale = 1.0 / (static_cast<double>(N) * N);
  std::vector<cplx> spectrum(circ.size());
  for (std::size_t i = 0; i < spectrum.size(); ++i)
    spectrum[i] = buf.data()[i] * scale;
  return spectrum;
}

PeriodicFft::PeriodicFft(int n)
    : n_(n), buf_(static_cast<std::size_t>(n) * n) {
  std::lock_guard lock(planner_mutex());
  fwd_ = FftPlan(checked(
      fftw_plan_dft_2d(n, n, buf_.raw(), buf_.raw(), FFTW_FORWARD, kPlanFlags)));
  bwd_ = FftPlan(checked(
      fftw_plan_dft_2d(n, n, buf_.raw(), buf_.raw(), FFTW_BACKWARD, kPlanFlags)));
}

void PeriodicFft::forward(std::span<cplx> data) {
  std::copy(data.begin(), data.end(), buf_.data());
  fwd_.execute();
  std::copy_n(buf_.data(), data.size(), data.begin());
}

void PeriodicFft::backward(std::span<cplx> data) {
  std::copy(data.begin(), data.end(), buf_.data());
  bwd_.execute();
  std::copy_n(buf_.data(), data.size(), data.begin());
}

PeriodicFft& periodic_fft(int n) {
  thread_local std::map<int, std::unique_ptr<PeriodicFft>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<PeriodicFft>(n);
  return *slot;
}

} // namespace dbar
