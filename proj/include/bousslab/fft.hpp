#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <span>
#include <stdexcept>

namespace bousslab {

namespace detail {
// FFTW's planner is not re-entrant; execution on distinct arrays is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// Complex-to-complex transforms of one fixed length. Forward is unnormalized
/// (sum f_j e^{-2 pi i jk/N}); inverse divides by N.
class FftPlan {
 public:
  explicit FftPlan(int n) : n_(n) {
    if (n <= 0) throw std::invalid_argument("FftPlan: size must be positive");
    std::lock_guard lock(detail::fftw_planner_mutex());
    auto* in = fftw_alloc_complex(n);
    auto* out = fftw_alloc_complex(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd_ = fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, flags);
    bwd_ = fftw_plan_dft_1d(n, in, out, FFTW_BACKWARD, flags);
    fftw_free(in);
    fftw_free(out);
  }
  ~FftPlan() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  int size() const { return n_; }

  /// `in` and `out` must not alias.
  void forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const {
    check(in, out);
    fftw_execute_dft(fwd_, as_fftw(in), reinterpret_cast<fftw_complex*>(out.data()));
  }

  void inverse(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const {
    check(in, out);
    fftw_execute_dft(bwd_, as_fftw(in), reinterpret_cast<fftw_complex*>(out.data()));
    const double s = 1.0 / n_;
    for (auto& v : out) v *= s;
  }

 private:
  void check(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const {
    if (static_cast<int>(in.size()) != n_ || static_cast<int>(out.size()) != n_)
      throw std::invalid_argument("FftPlan: length mismatch");
    if (in.data() == out.data()) throw std::invalid_argument("FftPlan: in-place call on out-of-place plan");
  }
  // fftw_execute_dft takes non-const input but does not write to it for
  // out-of-place plans.
  static fftw_complex* as_fftw(std::span<const std::complex<double>> s) {
    return reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(s.data()));
  }

  int n_;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

}  // namespace bousslab
