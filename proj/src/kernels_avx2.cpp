#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "tfgen/kernels.hpp"

// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

namespace tfgen::kernels::detail {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

void multiply_add_v(double* dst, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d va = _mm256_loadu_pd(a + i);
        __m256d vb = _mm256_loadu_pd(b + i);
        __m256d vd = _mm256_loadu_pd(dst + i);
        _mm256_storeu_pd(dst + i, _mm256_fmadd_pd(va, vb, vd));
    }
    for (; i < n; ++i) dst[i] += a[i] * b[i];
}

void complex_rotate_v(std::complex<double>* z, const double* c, const double* s,
                      std::size_t n) {
    double* zd = reinterpret_cast<double*>(z);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d vz = _mm256_loadu_pd(zd + 2 * i);
        __m256d vc = _mm256_setr_pd(c[i], c[i], c[i + 1], c[i + 1]);
        __m256d vs = _mm256_setr_pd(s[i], s[i], s[i + 1], s[i + 1]);
        __m256d vswap = _mm256_permute_pd(vz, 0b0101);
        // even lanes: re*c - im*s, odd lanes: im*c + re*s
        __m256d res = _mm256_fmaddsub_pd(vz, vc, _mm256_mul_pd(vswap, vs));
        _mm256_storeu_pd(zd + 2 * i, res);
    }
    for (; i < n; ++i) {
        const double re = z[i].real();
        const double im = z[i].imag();
        z[i] = {re * c[i] - im * s[i], re * s[i] + im * c[i]};
    }
}

void clip_affine_v(double* dst, const double* src, double lo, double hi, double scale,
                   double offset, std::size_t n) {
    const __m256d vlo = _mm256_set1_pd(lo);
    const __m256d vhi = _mm256_set1_pd(hi);
    const __m256d vsc = _mm256_set1_pd(scale);
    const __m256d voff = _mm256_set1_pd(offset);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(src + i);
        v = _mm256_min_pd(_mm256_max_pd(v, vlo), vhi);
        _mm256_storeu_pd(dst + i, _mm256_fmadd_pd(v, vsc, voff));
    }
    for (; i < n; ++i) dst[i] = std::min(std::max(src[i], lo), hi) * scale + offset;
}

void second_diff_abs_v(double* out, const double* m1, const double* z, const double* p1,
                       double c, std::size_t n) {
    const __m256d vc = _mm256_set1_pd(c);
    const __m256d vtwo = _mm256_set1_pd(-2.0);
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d acc = _mm256_add_pd(_mm256_loadu_pd(m1 + i), _mm256_loadu_pd(p1 + i));
        acc = _mm256_fmadd_pd(vtwo, _mm256_loadu_pd(z + i), acc);
        acc = _mm256_add_pd(acc, vc);
        _mm256_storeu_pd(out + i, _mm256_andnot_pd(sign_mask, acc));
    }
    for (; i < n; ++i) out[i] = std::fabs(m1[i] - 2.0 * z[i] + p1[i] + c);
}

double sum_v(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double r = hsum(acc);
    for (; i < n; ++i) r += x[i];
    return r;
}

double dot_v(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
    double r = hsum(acc);
    for (; i < n; ++i) r += x[i] * y[i];
    return r;
}

double sum_sq_v(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    double r = hsum(acc);
    for (; i < n; ++i) r += x[i] * x[i];
    return r;
}

double max_abs2_v(const std::complex<double>* z, std::size_t n) {
    const double* zd = reinterpret_cast<const double*>(z);
    __m256d best = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d v = _mm256_loadu_pd(zd + 2 * i);
        __m256d sq = _mm256_mul_pd(v, v);
        // pairwise re^2+im^2 lands in both lanes of each 128-bit half
        best = _mm256_max_pd(best, _mm256_hadd_pd(sq, sq));
    }
    __m128d lo = _mm256_castpd256_pd128(best);
    __m128d hi = _mm256_extractf128_pd(best, 1);
    double r = _mm_cvtsd_f64(_mm_max_sd(lo, hi));
    for (; i < n; ++i) {
        const double v = z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
        if (v > r) r = v;
    }
    return r;
}

}  // namespace

const Ops avx2_ops = {
    multiply_add_v, complex_rotate_v, clip_affine_v, second_diff_abs_v,
    sum_v,          dot_v,            sum_sq_v,      max_abs2_v,
};

}  // namespace tfgen::kernels::detail
