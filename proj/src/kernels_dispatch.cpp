#include <atomic>

#include "tfgen/kernels.hpp"

namespace tfgen::kernels {
namespace {

bool avx2_available() {
#if defined(TFGEN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

std::atomic<Backend> g_requested{Backend::Auto};

const detail::Ops* resolve(Backend b) {
#ifdef TFGEN_HAVE_AVX2
    if (b == Backend::Avx2 || b == Backend::Auto) {
        if (avx2_available()) return &detail::avx2_ops;
    }
#endif
    (void)b;
    return &detail::scalar_ops;
}

std::atomic<const detail::Ops*> g_ops{nullptr};

const detail::Ops& ops() {
    const detail::Ops* p = g_ops.load(std::memory_order_acquire);
    if (!p) {
        p = resolve(g_requested.load(std::memory_order_relaxed));
        g_ops.store(p, std::memory_order_release);
    }
    return *p;
}

}  // namespace

void set_backend(Backend b) {
    g_requested.store(b, std::memory_order_relaxed);
    g_ops.store(resolve(b), std::memory_order_release);
}

Backend active_backend() {
#ifdef TFGEN_HAVE_AVX2
    if (&ops() == &detail::avx2_ops) return Backend::Avx2;
#endif
    return Backend::Scalar;
}

const char* backend_name() {
    return active_backend() == Backend::Avx2 ? "avx2" : "scalar";
}

void multiply_add(double* dst, const double* a, const double* b, std::size_t n) {
    ops().multiply_add(dst, a, b, n);
}

void complex_rotate(std::complex<double>* z, const double* c, const double* s,
                    std::size_t n) {
    ops().complex_rotate(z, c, s, n);
}

void clip_affine(double* dst, const double* src, double lo, double hi, double scale,
                 double offset, std::size_t n) {
    ops().clip_affine(dst, src, lo, hi, scale, offset, n);
}

void second_diff_abs(double* out, const double* m1, const double* z, const double* p1,
                     double c, std::size_t n) {
    ops().second_diff_abs(out, m1, z, p1, c, n);
}

double sum(const double* x, std::size_t n) { return ops().sum(x, n); }

double dot(const double* x, const double* y, std::size_t n) { return ops().dot(x, y, n); }

double sum_sq(const double* x, std::size_t n) { return ops().sum_sq(x, n); }

double max_abs2(const std::complex<double>* z, std::size_t n) {
    return ops().max_abs2(z, n);
}

}  // namespace tfgen::kernels
