#include "tfgen/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

#include "tfgen/common.hpp"

namespace tfgen {
namespace {

// The FFTW planner mutates global state; plan creation and destruction must
// be serialized. Transform execution is thread-safe per plan.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
    if (n == 0) throw ParamError("RealFft: size must be positive");
    real_buf_ = fftw_alloc_real(n);
    cplx_buf_ = fftw_alloc_complex(n / 2 + 1);
    if (!real_buf_ || !cplx_buf_) throw Error("RealFft: allocation failed");
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), real_buf_,
                                     static_cast<fftw_complex*>(cplx_buf_), FFTW_ESTIMATE);
    plan_inv_ = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                     static_cast<fftw_complex*>(cplx_buf_), real_buf_,
                                     FFTW_ESTIMATE);
    if (!plan_fwd_ || !plan_inv_) throw Error("RealFft: plan creation failed");
}

RealFft::~RealFft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
    fftw_free(real_buf_);
    fftw_free(cplx_buf_);
}

void RealFft::forward(const double* in, std::complex<double>* out) const {
    std::memcpy(real_buf_, in, n_ * sizeof(double));
    fftw_execute(static_cast<fftw_plan>(plan_fwd_));
    std::memcpy(out, cplx_buf_, spectrum_size() * sizeof(std::complex<double>));
}

void RealFft::inverse(const std::complex<double>* in, double* out) const {
    std::memcpy(cplx_buf_, in, spectrum_size() * sizeof(std::complex<double>));
    fftw_execute(static_cast<fftw_plan>(plan_inv_));
    std::memcpy(out, real_buf_, n_ * sizeof(double));
}

ComplexFft::ComplexFft(std::size_t n) : n_(n) {
    if (n == 0) throw ParamError("ComplexFft: size must be positive");
    buf_in_ = fftw_alloc_complex(n);
    buf_out_ = fftw_alloc_complex(n);
    if (!buf_in_ || !buf_out_) throw Error("ComplexFft: allocation failed");
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_fwd_ = fftw_plan_dft_1d(static_cast<int>(n), static_cast<fftw_complex*>(buf_in_),
                                 static_cast<fftw_complex*>(buf_out_), FFTW_FORWARD,
                                 FFTW_ESTIMATE);
    plan_inv_ = fftw_plan_dft_1d(static_cast<int>(n), static_cast<fftw_complex*>(buf_in_),
                                 static_cast<fftw_complex*>(buf_out_), FFTW_BACKWARD,
                                 FFTW_ESTIMATE);
    if (!plan_fwd_ || !plan_inv_) throw Error("ComplexFft: plan creation failed");
}

ComplexFft::~ComplexFft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
    fftw_free(buf_in_);
    fftw_free(buf_out_);
}

void ComplexFft::forward(const std::complex<double>* in, std::complex<double>* out) const {
    std::memcpy(buf_in_, in, n_ * sizeof(std::complex<double>));
    fftw_execute(static_cast<fftw_plan>(plan_fwd_));
    std::memcpy(out, buf_out_, n_ * sizeof(std::complex<double>));
}

void ComplexFft::inverse(const std::complex<double>* in, std::complex<double>* out) const {
    std::memcpy(buf_in_, in, n_ * sizeof(std::complex<double>));
    fftw_execute(static_cast<fftw_plan>(plan_inv_));
    std::memcpy(out, buf_out_, n_ * sizeof(std::complex<double>));
}

}  // namespace tfgen
