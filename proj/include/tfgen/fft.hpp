#pragma once
#include <complex>
#include <cstddef>

namespace tfgen {

/// Real <-> half-complex FFT pair of a fixed size, backed by FFTW.
///
/// forward() computes out[k] = sum_j in[j] * exp(-2*pi*i*j*k/n) for
/// k = 0..n/2, the one-sided spectrum of a real frame. inverse() is the
/// unnormalized adjoint: from a one-sided spectrum it synthesizes
/// sum_k X[k] * exp(+2*pi*i*j*k/n) over the full mirrored spectrum, so
/// inverse(forward(x)) == n * x. Instances are cheap to build and safe to
/// use from one thread at a time; distinct instances are independent.
class RealFft {
  public:
    explicit RealFft(std::size_t n);
    ~RealFft();
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    std::size_t size() const { return n_; }
    std::size_t spectrum_size() const { return n_ / 2 + 1; }

    void forward(const double* in, std::complex<double>* out) const;
    void inverse(const std::complex<double>* in, double* out) const;

  private:
    std::size_t n_;
    void* plan_fwd_;
    void* plan_inv_;
    double* real_buf_;
    void* cplx_buf_;
};

/// Complex in-place-capable FFT of a fixed size (used by diagnostics that
/// need a full spectrum, e.g. window width estimation).
class ComplexFft {
  public:
    explicit ComplexFft(std::size_t n);
    ~ComplexFft();
    ComplexFft(const ComplexFft&) = delete;
    ComplexFft& operator=(const ComplexFft&) = delete;

    std::size_t size() const { return n_; }

    /// out[k] = sum_j in[j] * exp(-2*pi*i*j*k/n)
    void forward(const std::complex<double>* in, std::complex<double>* out) const;
    /// Unnormalized inverse: out[j] = sum_k in[k] * exp(+2*pi*i*j*k/n)
    void inverse(const std::complex<double>* in, std::complex<double>* out) const;

  private:
    std::size_t n_;
    void* plan_fwd_;
    void* plan_inv_;
    void* buf_in_;
    void* buf_out_;
};

}  // namespace tfgen
