#include "ccsim/fft.hpp"

#include <mutex>
#include <stdexcept>

namespace ccsim {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft::Fft(long n) : n_(n) {
  if (n <= 0) throw std::invalid_argument("Fft: size must be positive");
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(n)));
  if (!buf) throw std::bad_alloc();
  planned_alignment_ = fftw_alignment_of(reinterpret_cast<double*>(buf));
  fwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_free(buf);
  if (!fwd_ || !bwd_) throw std::runtime_error("Fft: planning failed");
}

Fft::~Fft() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (fwd_) fftw_destroy_plan(fwd_);
  if (bwd_) fftw_destroy_plan(bwd_);
}

void Fft::execute(fftw_plan plan, Eigen::ArrayXcd& a) const {
  if (a.size() != n_) throw std::invalid_argument("Fft: array size does not match plan");
  auto* p = reinterpret_cast<fftw_complex*>(a.data());
  if (fftw_alignment_of(reinterpret_cast<double*>(p)) != planned_alignment_) {
    // Alignment class differs from the planned buffer; executing the plan on
    // this array would be undefined. Bounce through an aligned copy.
    auto* buf =
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(n_)));
    if (!buf) throw std::bad_alloc();
    std::copy_n(reinterpret_cast<const double*>(p), 2 * n_, reinterpret_cast<double*>(buf));
    fftw_execute_dft(plan, buf, buf);
    std::copy_n(reinterpret_cast<const double*>(buf), 2 * n_, reinterpret_cast<double*>(p));
    fftw_free(buf);
    return;
  }
  fftw_execute_dft(plan, p, p);
}

void Fft::forward_inplace(Eigen::ArrayXcd& a) const { execute(fwd_, a); }

void Fft::backward_inplace(Eigen::ArrayXcd& a) const { execute(bwd_, a); }

}  // namespace ccsim
