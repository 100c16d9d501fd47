#include "fft_engine.hpp"

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace oldroyd::detail {

namespace {

// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

struct Scratch {
  std::size_t real_size = 0;
  std::size_t complex_size = 0;
  std::unique_ptr<double, FftwDeleter> real;
  std::unique_ptr<fftw_complex, FftwDeleter> cplx;

  void ensure(std::size_t rs, std::size_t cs) {
    if (rs > real_size) {
      real.reset(fftw_alloc_real(rs));
      real_size = rs;
    }
    if (cs > complex_size) {
      cplx.reset(fftw_alloc_complex(cs));
      complex_size = cs;
    }
  }
};

Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

}  // namespace

FftEngine::FftEngine(int n)
    : n_(n),
      real_size_(static_cast<std::size_t>(n) * n * n),
      complex_size_(static_cast<std::size_t>(n) * n * (n / 2 + 1)) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  double* r = fftw_alloc_real(real_size_);
  fftw_complex* c = fftw_alloc_complex(complex_size_);
  forward_plan_ = fftw_plan_dft_r2c_3d(n, n, n, r, c, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_3d(n, n, n, c, r, FFTW_ESTIMATE);

  // Offsets in complex units: (a n + b) h + c with h = n / 2 + 1.
  const int h = n / 2 + 1;
  const int kept = (n - 1) / 3 + 1;  // c or b in [0, limit]
  high_band_offset_ = static_cast<std::size_t>(n - kept + 1) * h;
  fftw_complex* high = c + high_band_offset_;
  const int n2 = n * n;

  fwd_lines_ = fftw_plan_many_dft_r2c(1, &n, n2, r, nullptr, 1, n, c, nullptr, 1, h, FFTW_ESTIMATE);
  inv_lines_ = fftw_plan_many_dft_c2r(1, &n, n2, c, nullptr, 1, h, r, nullptr, 1, n, FFTW_ESTIMATE);

  const fftw_iodim axis1{n, h, h};
  const fftw_iodim over_a_c[2] = {{n, n * h, n * h}, {kept, 1, 1}};
  fwd_axis1_ = fftw_plan_guru_dft(1, &axis1, 2, over_a_c, c, c, FFTW_FORWARD, FFTW_ESTIMATE);
  inv_axis1_ = fftw_plan_guru_dft(1, &axis1, 2, over_a_c, c, c, FFTW_BACKWARD, FFTW_ESTIMATE);

  // The high band b in [n - limit, n) has kept - 1 lines.
  const fftw_iodim axis0{n, n * h, n * h};
  const fftw_iodim low_b_c[2] = {{kept, h, h}, {kept, 1, 1}};
  const fftw_iodim high_b_c[2] = {{kept - 1, h, h}, {kept, 1, 1}};
  fwd_axis0_low_ = fftw_plan_guru_dft(1, &axis0, 2, low_b_c, c, c, FFTW_FORWARD, FFTW_ESTIMATE);
  fwd_axis0_high_ =
      fftw_plan_guru_dft(1, &axis0, 2, high_b_c, high, high, FFTW_FORWARD, FFTW_ESTIMATE);
  inv_axis0_low_ = fftw_plan_guru_dft(1, &axis0, 2, low_b_c, c, c, FFTW_BACKWARD, FFTW_ESTIMATE);
  inv_axis0_high_ =
      fftw_plan_guru_dft(1, &axis0, 2, high_b_c, high, high, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_free(r);
  fftw_free(c);
}

FftEngine::~FftEngine() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  for (fftw_plan p : {forward_plan_, inverse_plan_, fwd_lines_, fwd_axis1_, fwd_axis0_low_,
                      fwd_axis0_high_, inv_axis0_low_, inv_axis0_high_, inv_axis1_, inv_lines_}) {
    if (p) fftw_destroy_plan(p);
  }
}

void FftEngine::forward(const double* in, std::complex<double>* out) const {
  Scratch& s = scratch();
  s.ensure(real_size_, complex_size_);
  std::memcpy(s.real.get(), in, real_size_ * sizeof(double));
  fftw_execute_dft_r2c(forward_plan_, s.real.get(), s.cplx.get());
  std::memcpy(static_cast<void*>(out), s.cplx.get(), complex_size_ * sizeof(fftw_complex));
}

void FftEngine::inverse(const std::complex<double>* in, double* out) const {
  // c2r overwrites its input, so it always runs on a private copy.
  Scratch& s = scratch();
  s.ensure(real_size_, complex_size_);
  std::memcpy(s.cplx.get(), static_cast<const void*>(in), complex_size_ * sizeof(fftw_complex));
  fftw_execute_dft_c2r(inverse_plan_, s.cplx.get(), s.real.get());
  std::memcpy(out, s.real.get(), real_size_ * sizeof(double));
}

void FftEngine::forward_raw(double* in, std::complex<double>* out) const {
  fftw_execute_dft_r2c(forward_plan_, in, reinterpret_cast<fftw_complex*>(out));
}

void FftEngine::inverse_raw(std::complex<double>* in, double* out) const {
  fftw_execute_dft_c2r(inverse_plan_, reinterpret_cast<fftw_complex*>(in), out);
}

void FftEngine::forward_pruned_raw(double* in, std::complex<double>* out) const {
  auto* c = reinterpret_cast<fftw_complex*>(out);
  fftw_execute_dft_r2c(fwd_lines_, in, c);
  fftw_execute_dft(fwd_axis1_, c, c);
  fftw_execute_dft(fwd_axis0_low_, c, c);
  fftw_execute_dft(fwd_axis0_high_, c + high_band_offset_, c + high_band_offset_);
}

void FftEngine::inverse_pruned_raw(std::complex<double>* in, double* out) const {
  auto* c = reinterpret_cast<fftw_complex*>(in);
  fftw_execute_dft(inv_axis0_low_, c, c);
  fftw_execute_dft(inv_axis0_high_, c + high_band_offset_, c + high_band_offset_);
  fftw_execute_dft(inv_axis1_, c, c);
  fftw_execute_dft_c2r(inv_lines_, c, out);
}

const FftEngine& fft_engine(int n) {
  static std::mutex cache_mutex;
  static std::map<int, std::unique_ptr<FftEngine>> cache;
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, std::make_unique<FftEngine>(n)).first;
  }
  return *it->second;
}

}  // namespace oldroyd::detail
