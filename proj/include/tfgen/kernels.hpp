#pragma once
#include <complex>
#include <cstddef>

namespace tfgen::kernels {

/// Backend selection for the vectorized inner loops. Auto resolves to the
/// widest instruction set the running CPU supports; Scalar forces the
/// portable reference implementations (used by the equivalence tests).
enum class Backend { Auto, Scalar, Avx2 };

/// Force a backend. Auto restores runtime detection. Requests for an
/// unavailable backend fall back to Scalar.
void set_backend(Backend b);
Backend active_backend();
const char* backend_name();

/// dst[i] += a[i] * b[i]
void multiply_add(double* dst, const double* a, const double* b, std::size_t n);

/// z[i] *= (c[i] + i*s[i]), with (c, s) unit phasors supplied by the caller.
void complex_rotate(std::complex<double>* z, const double* c, const double* s,
                    std::size_t n);

/// dst[i] = clamp(src[i], lo, hi) * scale + offset
void clip_affine(double* dst, const double* src, double lo, double hi, double scale,
                 double offset, std::size_t n);

/// out[i] = |m1[i] - 2*z[i] + p1[i] + c|
void second_diff_abs(double* out, const double* m1, const double* z, const double* p1,
                     double c, std::size_t n);

double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double sum_sq(const double* x, std::size_t n);

/// Largest squared magnitude over a complex array.
double max_abs2(const std::complex<double>* z, std::size_t n);

namespace detail {

struct Ops {
    void (*multiply_add)(double*, const double*, const double*, std::size_t);
    void (*complex_rotate)(std::complex<double>*, const double*, const double*, std::size_t);
    void (*clip_affine)(double*, const double*, double, double, double, double, std::size_t);
    void (*second_diff_abs)(double*, const double*, const double*, const double*, double,
                            std::size_t);
    double (*sum)(const double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    double (*sum_sq)(const double*, std::size_t);
    double (*max_abs2)(const std::complex<double>*, std::size_t);
};

extern const Ops scalar_ops;
#ifdef TFGEN_HAVE_AVX2
extern const Ops avx2_ops;
#endif

}  // namespace detail

}  // namespace tfgen::kernels
