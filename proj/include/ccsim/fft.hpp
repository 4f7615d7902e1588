#pragma once

#include <complex>

#include <Eigen/Dense>
#include <fftw3.h>

namespace ccsim {

// RAII wrapper around double-precision in-place c2c FFTW plans. Plan
// creation is serialized behind a global mutex (FFTW planning is not
// thread-safe); execution is concurrent. FFTW_ESTIMATE keeps the chosen
// algorithm independent of machine load, so identical inputs give bit
// identical outputs run to run.
//
// Transforms are unnormalized in both directions; callers fold the 1/N of a
// round trip into whatever spectral operator they apply.
class Fft {
 public:
  explicit Fft(long n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  long size() const { return n_; }
  void forward_inplace(Eigen::ArrayXcd& a) const;
  void backward_inplace(Eigen::ArrayXcd& a) const;

 private:
  void execute(fftw_plan plan, Eigen::ArrayXcd& a) const;

  long n_ = 0;
  int planned_alignment_ = 0;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

}  // namespace ccsim
