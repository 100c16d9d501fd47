#pragma once

#include <complex>
#include <cstddef>

#include <fftw3.h>

namespace oldroyd::detail {

// Unnormalized 3-D real <-> half-complex transforms for one lattice size.
// Plans are built once with FFTW_ESTIMATE so the algorithm (and therefore the
// rounding) does not depend on timing measurements; results are reproducible
// across processes.
class FftEngine {
 public:
  explicit FftEngine(int n);
  ~FftEngine();
  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;

  int n() const { return n_; }
  std::size_t real_size() const { return real_size_; }
  std::size_t complex_size() const { return complex_size_; }

  // Both calls are safe from several threads; scratch buffers are per thread.
  void forward(const double* in, std::complex<double>* out) const;
  void inverse(const std::complex<double>* in, double* out) const;

  // Execute directly on caller-owned arrays allocated with fftw_alloc_*; no
  // copies. inverse_raw destroys its input.
  void forward_raw(double* in, std::complex<double>* out) const;
  void inverse_raw(std::complex<double>* in, double* out) const;

  // Pruned variants for fields whose coefficients vanish outside |z_i| <= limit
  // on every axis (limit = (n - 1) / 3, the dealiasing cut). The 1-D passes
  // skip lines that are entirely zero on input (inverse) or discarded on
  // output (forward). forward_pruned_raw leaves arbitrary finite values in the
  // discarded modes; inverse_pruned_raw destroys its input.
  void forward_pruned_raw(double* in, std::complex<double>* out) const;
  void inverse_pruned_raw(std::complex<double>* in, double* out) const;

 private:
  int n_;
  std::size_t real_size_;
  std::size_t complex_size_;
  fftw_plan forward_plan_ = nullptr;
  fftw_plan inverse_plan_ = nullptr;
  // Pruned passes: along axis 2 (real), axis 1, axis 0 (low and high b bands).
  std::size_t high_band_offset_ = 0;
  fftw_plan fwd_lines_ = nullptr;
  fftw_plan fwd_axis1_ = nullptr;
  fftw_plan fwd_axis0_low_ = nullptr;
  fftw_plan fwd_axis0_high_ = nullptr;
  fftw_plan inv_axis0_low_ = nullptr;
  fftw_plan inv_axis0_high_ = nullptr;
  fftw_plan inv_axis1_ = nullptr;
  fftw_plan inv_lines_ = nullptr;
};

const FftEngine& fft_engine(int n);

}  // namespace oldroyd::detail
