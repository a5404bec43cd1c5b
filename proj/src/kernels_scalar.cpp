#include <algorithm>
#include <cmath>

#include "tfgen/kernels.hpp"

namespace tfgen::kernels::detail {
namespace {

void multiply_add_s(double* dst, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += a[i] * b[i];
}

void complex_rotate_s(std::complex<double>* z, const double* c, const double* s,
                      std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double re = z[i].real();
        const double im = z[i].imag();
        z[i] = {re * c[i] - im * s[i], re * s[i] + im * c[i]};
    }
}

void clip_affine_s(double* dst, const double* src, double lo, double hi, double scale,
                   double offset, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        dst[i] = std::min(std::max(src[i], lo), hi) * scale + offset;
}

void second_diff_abs_s(double* out, const double* m1, const double* z, const double* p1,
                       double c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::fabs(m1[i] - 2.0 * z[i] + p1[i] + c);
}

double sum_s(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double dot_s(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double sum_sq_s(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

double max_abs2_s(const std::complex<double>* z, std::size_t n) {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
        if (v > best) best = v;
    }
    return best;
}

}  // namespace

const Ops scalar_ops = {
    multiply_add_s, complex_rotate_s, clip_affine_s, second_diff_abs_s,
    sum_s,          dot_s,            sum_sq_s,      max_abs2_s,
};

}  // namespace tfgen::kernels::detail
