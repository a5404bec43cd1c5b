#include "tfgen/gabor.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "tfgen/common.hpp"
#include "tfgen/fft.hpp"
#include "tfgen/kernels.hpp"

namespace tfgen {

const char* convention_name(Convention c) {
    switch (c) {
        case Convention::FrequencyInvariant: return "freq-invariant";
        case Convention::TimeInvariant: return "time-invariant";
        default: return "simplified-time-invariant";
    }
}

GaborSystem make_system(Window window, std::size_t a, std::size_t M, std::size_t L,
                        double lambda) {
    if (a == 0 || M == 0 || L == 0)
        throw ParamError("gabor system: a, M, L must be positive");
    if (M % 2 != 0) throw ParamError("gabor system: M must be even for one-sided storage");
    if (L % a != 0)
        throw ParamError("gabor system: hop a = " + std::to_string(a) +
                         " does not divide L = " + std::to_string(L));
    if (L % M != 0)
        throw ParamError("gabor system: channel count M = " + std::to_string(M) +
                         " does not divide L = " + std::to_string(L));
    if (window.samples.empty()) throw ParamError("gabor system: empty window");
    if (window.size() > L)
        throw ParamError("gabor system: window support exceeds signal length");
    for (double v : window.samples)
        if (!std::isfinite(v)) throw ParamError("gabor system: non-finite window sample");

    GaborSystem sys;
    sys.a = a;
    sys.M = M;
    sys.L = L;
    if (lambda > 0.0) {
        sys.lambda = lambda;
    } else if (window.kind == WindowKind::Gaussian && window.lambda_nominal > 0.0) {
        sys.lambda = window.lambda_nominal;
    } else {
        sys.lambda = tf_ratio(window, L);
    }
    sys.window = std::move(window);
    return sys;
}

Window canonical_dual(const GaborSystem& sys) {
    const auto& g = sys.window.samples;
    const std::size_t Lg = g.size();
    if (Lg > sys.M)
        throw UnsupportedError("canonical dual: window support " + std::to_string(Lg) +
                               " exceeds M = " + std::to_string(sys.M) +
                               " (painless case required)");
    // Frame weights sum_k g[l-ka]^2 are a-periodic; accumulate by residue class of
    // the absolute sample position (j - c) mod a.
    const std::size_t a = sys.a;
    const std::size_t c = Lg / 2;
    std::vector<double> weight(a, 0.0);
    for (std::size_t j = 0; j < Lg; ++j) {
        const std::size_t r = (j + a * ((c + a) / a) - c) % a;
        weight[r] += g[j] * g[j];
    }
    double wmax = 0.0;
    for (double v : weight) wmax = std::max(wmax, v);
    for (double v : weight)
        if (v < 1e-12 * wmax)
            throw FrameError("canonical dual: ill-conditioned frame (near-zero weight)");

    Window dual;
    dual.kind = WindowKind::Custom;
    dual.normalization = sys.window.normalization;
    dual.samples.resize(Lg);
    const double M = static_cast<double>(sys.M);
    for (std::size_t j = 0; j < Lg; ++j) {
        const std::size_t r = (j + a * ((c + a) / a) - c) % a;
        dual.samples[j] = g[j] / (M * weight[r]);
    }
    return dual;
}

namespace {

struct PhaseCoefs {
    long long na = 0;  // multiplier of m*n*a
    long long nc = 0;  // multiplier of m*c
};

PhaseCoefs convention_offset(Convention v) {
    switch (v) {
        case Convention::FrequencyInvariant: return {0, 0};
        case Convention::TimeInvariant: return {1, 0};
        default: return {1, -1};
    }
}

// Multiply coefficients entrywise by exp(2*pi*i*delta(m,n)/M), where
// delta = m*(sa*n*a + sc*c). Rows whose factors are all exact quarter turns are
// rotated by swap/negate so magnitudes are preserved bitwise.
void rotate_in_place(Spectrogram& S, Convention target) {
    if (S.convention == target) return;
    const auto& sys = S.system;
    const long long a = static_cast<long long>(sys.a);
    const long long M = static_cast<long long>(sys.M);
    const long long c = static_cast<long long>(sys.window.size() / 2);

    const PhaseCoefs dst = convention_offset(target);
    const PhaseCoefs src = convention_offset(S.convention);
    const long long sa = dst.na - src.na;
    const long long sc = dst.nc - src.nc;
    if (sc != 0 && (a == 0 || c % a != 0))
        throw ConventionError(
            "convention conversion: simplified time-invariant form requires the hop (" +
            std::to_string(sys.a) + ") to divide the window half-support (" +
            std::to_string(c) + ")");

    const std::size_t rows = S.rows();
    const std::size_t N = S.cols();
    std::vector<double> ca, sb;
    for (std::size_t m = 0; m < rows; ++m) {
        const long long mm = static_cast<long long>(m);
        std::complex<double>* row = S.coefficients.data() + m * N;
        const bool exact = (sa == 0 || (4 * mm * a) % M == 0) &&
                           (sc == 0 || (4 * mm * c) % M == 0);
        if (exact) {
            for (std::size_t n = 0; n < N; ++n) {
                const long long num =
                    mm * (sa * static_cast<long long>(n) * a + sc * c);
                const long long q = ((4 * num / M) % 4 + 4) % 4;
                const std::complex<double> z = row[n];
                switch (q) {
                    case 1: row[n] = {-z.imag(), z.real()}; break;
                    case 2: row[n] = {-z.real(), -z.imag()}; break;
                    case 3: row[n] = {z.imag(), -z.real()}; break;
                    default: break;
                }
            }
        } else {
            ca.resize(N);
            sb.resize(N);
            for (std::size_t n = 0; n < N; ++n) {
                long long num = mm * (sa * static_cast<long long>(n) * a + sc * c);
                long long r = num % M;
                if (r < 0) r += M;
                const double ang = kTwoPi * static_cast<double>(r) / static_cast<double>(M);
                ca[n] = std::cos(ang);
                sb[n] = std::sin(ang);
            }
            kernels::complex_rotate(row, ca.data(), sb.data(), N);
        }
    }
    S.convention = target;
}

}  // namespace

Spectrogram dgt(const Signal& signal, const GaborSystem& sys, Convention convention) {
    if (signal.samples.size() != sys.L)
        throw ShapeError("dgt: signal length " + std::to_string(signal.samples.size()) +
                         " does not match system L = " + std::to_string(sys.L));
    const auto& g = sys.window.samples;
    const std::size_t Lg = g.size();
    const std::size_t L = sys.L;
    const std::size_t M = sys.M;
    const std::size_t N = sys.frames();
    const std::size_t MR = sys.rows();
    const std::size_t c = Lg / 2;

    RealFft fft(M);
    std::vector<double> cbuf(M);
    std::vector<std::complex<double>> frame(MR);

    Spectrogram out;
    out.system = sys;
    out.convention = Convention::FrequencyInvariant;
    out.coefficients.resize(MR * N);

    const double* s = signal.samples.data();
    for (std::size_t n = 0; n < N; ++n) {
        std::fill(cbuf.begin(), cbuf.end(), 0.0);
        std::size_t l = (n * sys.a + L - c) % L;
        std::size_t j = 0;
        while (j < Lg) {
            const std::size_t run = std::min(Lg - j, M - l % M);
            kernels::multiply_add(cbuf.data() + l % M, s + l, g.data() + j, run);
            j += run;
            l += run;
            if (l >= L) l -= L;
        }
        fft.forward(cbuf.data(), frame.data());
        for (std::size_t m = 0; m < MR; ++m) out.coefficients[m * N + n] = frame[m];
    }
    rotate_in_place(out, convention);
    return out;
}

Signal idgt(const Spectrogram& spec, const Window& dual, unsigned sample_rate) {
    const auto& sys = spec.system;
    if (spec.coefficients.size() != spec.rows() * spec.cols())
        throw ShapeError("idgt: coefficient matrix size does not match system shape");
    const std::size_t Lg = dual.size();
    if (Lg == 0) throw ParamError("idgt: empty dual window");
    if (Lg > sys.L) throw ShapeError("idgt: dual window support exceeds signal length");

    const Spectrogram* src = &spec;
    Spectrogram fi;
    if (spec.convention != Convention::FrequencyInvariant) {
        fi = convert_convention(spec, Convention::FrequencyInvariant);
        src = &fi;
    }

    const std::size_t L = sys.L;
    const std::size_t M = sys.M;
    const std::size_t N = sys.frames();
    const std::size_t MR = sys.rows();
    const std::size_t c = Lg / 2;

    RealFft fft(M);
    std::vector<std::complex<double>> frame(MR);
    std::vector<double> f(M);

    Signal out;
    out.sample_rate = sample_rate;
    out.samples.assign(L, 0.0);
    const double* gd = dual.samples.data();
    for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t m = 0; m < MR; ++m) frame[m] = src->coefficients[m * N + n];
        // Unnormalized half-complex inverse: equals M times the true inverse DFT of
        // the conjugate-symmetric full spectrum, exactly the synthesis scaling needed.
        fft.inverse(frame.data(), f.data());
        std::size_t l = (n * sys.a + L - c % L) % L;
        std::size_t j = 0;
        while (j < Lg) {
            const std::size_t run = std::min(Lg - j, M - l % M);
            kernels::multiply_add(out.samples.data() + l, f.data() + l % M, gd + j, run);
            j += run;
            l += run;
            if (l >= L) l -= L;
        }
    }
    return out;
}

Spectrogram convert_convention(const Spectrogram& spec, Convention target) {
    Spectrogram out = spec;
    rotate_in_place(out, target);
    return out;
}

}  // namespace tfgen
