#include "tfgen/phase.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "tfgen/common.hpp"
#include "tfgen/kernels.hpp"

namespace tfgen {
namespace {

// Principal value in (-pi, pi].
inline double wrap(double x) {
    double y = std::remainder(x, kTwoPi);
    if (y <= -kPi) y += kTwoPi;
    return y;
}

inline double uniform_angle(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1p-53 * kTwoPi;
}

void check_shape(const LogMagnitude& lm, const PhaseDerivatives& d, const char* who) {
    if (d.rows != lm.rows() || d.cols != lm.cols() ||
        d.d_time.size() != d.rows * d.cols || d.d_freq.size() != d.rows * d.cols)
        throw ShapeError(std::string(who) + ": derivative shape does not match log-magnitude");
}

}  // namespace

LogMagnitude log_magnitude(const Spectrogram& spec, double floor) {
    if (!(floor < 0.0)) throw ParamError("log_magnitude: floor must be negative");
    LogMagnitude lm;
    lm.system = spec.system;
    lm.floor = floor;
    lm.values.resize(spec.coefficients.size());
    for (std::size_t i = 0; i < lm.values.size(); ++i) {
        const double v = std::log(std::abs(spec.coefficients[i]));
        lm.values[i] = std::max(v, floor);
    }
    return lm;
}

PhaseDerivatives measured_phase_derivatives(const Spectrogram& spec, double rel_threshold) {
    if (!(rel_threshold > 0.0 && rel_threshold <= 1.0))
        throw ParamError("measured derivatives: relative threshold must be in (0, 1]");
    const Spectrogram* src = &spec;
    Spectrogram fi;
    if (spec.convention != Convention::FrequencyInvariant) {
        fi = convert_convention(spec, Convention::FrequencyInvariant);
        src = &fi;
    }
    const std::size_t MR = src->rows();
    const std::size_t N = src->cols();
    const std::size_t total = MR * N;
    const auto& z = src->coefficients;

    std::vector<double> phi(total);
    std::vector<double> mag(total);
    for (std::size_t i = 0; i < total; ++i) {
        phi[i] = std::arg(z[i]);
        mag[i] = std::abs(z[i]);
    }
    const double mx = std::sqrt(kernels::max_abs2(z.data(), total));
    const double thr = rel_threshold * mx;

    PhaseDerivatives out;
    out.rows = MR;
    out.cols = N;
    out.d_time.assign(total, 0.0);
    out.d_freq.assign(total, 0.0);
    out.mask.assign(total, 0);

    // Time direction: circular mean of the two adjacent wrapped steps, circular
    // frames. A plain average would cancel steps that straddle the wrap point.
    std::vector<double> fw(N);
    for (std::size_t m = 0; m < MR; ++m) {
        const double* p = phi.data() + m * N;
        for (std::size_t n = 0; n < N; ++n) {
            const std::size_t nn = (n + 1 == N) ? 0 : n + 1;
            fw[n] = wrap(p[nn] - p[n]);
        }
        double* dt = out.d_time.data() + m * N;
        for (std::size_t n = 0; n < N; ++n) {
            const std::size_t nb = (n == 0) ? N - 1 : n - 1;
            dt[n] = wrap(fw[nb] + 0.5 * wrap(fw[n] - fw[nb]));
        }
    }

    // Frequency direction: steps demodulated by 2*pi*n*a/M before wrapping,
    // one-sided at the DC and Nyquist rows.
    const double a = static_cast<double>(src->system.a);
    const double M = static_cast<double>(src->system.M);
    std::vector<double> dem(N);
    for (std::size_t n = 0; n < N; ++n) dem[n] = kTwoPi * a * static_cast<double>(n) / M;
    std::vector<double> up((MR - 1) * N);
    for (std::size_t m = 0; m + 1 < MR; ++m)
        for (std::size_t n = 0; n < N; ++n)
            up[m * N + n] = wrap(phi[(m + 1) * N + n] - phi[m * N + n] + dem[n]);
    for (std::size_t n = 0; n < N; ++n) {
        out.d_freq[n] = up[n];
        out.d_freq[(MR - 1) * N + n] = up[(MR - 2) * N + n];
    }
    for (std::size_t m = 1; m + 1 < MR; ++m)
        for (std::size_t n = 0; n < N; ++n) {
            const double lo = up[(m - 1) * N + n];
            out.d_freq[m * N + n] = wrap(lo + 0.5 * wrap(up[m * N + n] - lo));
        }

    for (std::size_t i = 0; i < total; ++i) {
        if (mag[i] >= thr) {
            out.mask[i] = 1;
        } else {
            out.d_time[i] = 0.0;
            out.d_freq[i] = 0.0;
        }
    }
    return out;
}

PhaseDerivatives estimate_phase_derivatives(const LogMagnitude& lm, double rel_threshold) {
    if (!(rel_threshold > 0.0 && rel_threshold <= 1.0))
        throw ParamError("estimated derivatives: relative threshold must be in (0, 1]");
    if (!(lm.system.lambda > 0.0))
        throw ParamError("estimated derivatives: system lambda is not set");
    const std::size_t MR = lm.rows();
    const std::size_t N = lm.cols();
    const std::size_t total = MR * N;
    if (lm.values.size() != total)
        throw ShapeError("estimated derivatives: value matrix does not match system shape");

    const double lamL = lm.system.lambda * static_cast<double>(lm.system.L);
    const double aM = static_cast<double>(lm.system.a) * static_cast<double>(lm.system.M);
    const double ct = aM / lamL;
    const double cf = lamL / aM;

    PhaseDerivatives out;
    out.rows = MR;
    out.cols = N;
    out.d_time.assign(total, 0.0);
    out.d_freq.assign(total, 0.0);
    out.mask.assign(total, 0);

    const auto& v = lm.values;
    // d_time from the frequency-direction magnitude gradient. The edge rows use a
    // second-order one-sided stencil so a quadratic ridge peaking at DC or Nyquist
    // keeps a zero slope there.
    for (std::size_t n = 0; n < N; ++n) {
        if (MR >= 3) {
            out.d_time[n] = ct * 0.5 * (-3.0 * v[n] + 4.0 * v[N + n] - v[2 * N + n]);
            out.d_time[(MR - 1) * N + n] =
                ct * 0.5 * (3.0 * v[(MR - 1) * N + n] - 4.0 * v[(MR - 2) * N + n] +
                            v[(MR - 3) * N + n]);
        } else {
            out.d_time[n] = ct * (v[N + n] - v[n]);
            out.d_time[(MR - 1) * N + n] = ct * (v[(MR - 1) * N + n] - v[(MR - 2) * N + n]);
        }
    }
    for (std::size_t m = 1; m + 1 < MR; ++m)
        for (std::size_t n = 0; n < N; ++n)
            out.d_time[m * N + n] = ct * 0.5 * (v[(m + 1) * N + n] - v[(m - 1) * N + n]);
    // Demodulated d_freq from the time-direction magnitude gradient, circular frames.
    for (std::size_t m = 0; m < MR; ++m) {
        const double* row = v.data() + m * N;
        double* df = out.d_freq.data() + m * N;
        for (std::size_t n = 0; n < N; ++n) {
            const std::size_t nf = (n + 1 == N) ? 0 : n + 1;
            const std::size_t nb = (n == 0) ? N - 1 : n - 1;
            df[n] = -cf * 0.5 * (row[nf] - row[nb]);
        }
    }

    double mx = v[0];
    for (double x : v) mx = std::max(mx, x);
    const double thr = mx + std::log(rel_threshold);
    for (std::size_t i = 0; i < total; ++i) {
        if (v[i] >= thr) {
            out.mask[i] = 1;
        } else {
            out.d_time[i] = 0.0;
            out.d_freq[i] = 0.0;
        }
    }
    return out;
}

Phase pghi(const LogMagnitude& lm, const PhaseDerivatives& d, double rel_tol,
           std::uint64_t seed, PghiInfo* info, double seed_phase) {
    if (!(rel_tol > 0.0 && rel_tol <= 1.0))
        throw ParamError("pghi: rel_tol must be in (0, 1]");
    check_shape(lm, d, "pghi");
    const std::size_t MR = lm.rows();
    const std::size_t N = lm.cols();
    const std::size_t total = MR * N;
    const auto& v = lm.values;

    Phase ph;
    ph.rows = MR;
    ph.cols = N;
    ph.convention = Convention::FrequencyInvariant;
    ph.values.assign(total, 0.0);

    double mx = v[0];
    for (double x : v) mx = std::max(mx, x);
    const double thr = mx + std::log(rel_tol);

    std::vector<std::uint8_t> todo(total, 0);
    std::vector<std::uint32_t> order;
    order.reserve(total);
    for (std::size_t i = 0; i < total; ++i)
        if (v[i] >= thr) {
            todo[i] = 1;
            order.push_back(static_cast<std::uint32_t>(i));
        }

    // Below-threshold entries get reproducible random phases in row-major order.
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < total; ++i)
        if (!todo[i]) ph.values[i] = uniform_angle(rng);

    if (info) {
        info->all_random = order.empty();
        info->integrated = order.size();
    }

    std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
        if (v[x] != v[y]) return v[x] > v[y];
        return x < y;
    });

    struct Item {
        double v;
        std::uint32_t idx;
    };
    struct Less {
        bool operator()(const Item& x, const Item& y) const {
            if (x.v != y.v) return x.v < y.v;
            return x.idx > y.idx;
        }
    };
    std::priority_queue<Item, std::vector<Item>, Less> heap;

    const double a = static_cast<double>(lm.system.a);
    const double M = static_cast<double>(lm.system.M);
    std::vector<double> dem(N);
    for (std::size_t n = 0; n < N; ++n) dem[n] = kTwoPi * a * static_cast<double>(n) / M;

    const double* dt = d.d_time.data();
    const double* df = d.d_freq.data();
    double* phv = ph.values.data();

    for (std::uint32_t start : order) {
        if (!todo[start]) continue;
        phv[start] = seed_phase;
        todo[start] = 0;
        heap.push({v[start], start});
        while (!heap.empty()) {
            const std::uint32_t i = heap.top().idx;
            heap.pop();
            const std::size_t m = i / N;
            const std::size_t n = i % N;
            const std::size_t nf = (n + 1 == N) ? i - (N - 1) : i + 1;
            if (todo[nf]) {
                phv[nf] = phv[i] + 0.5 * (dt[i] + dt[nf]);
                todo[nf] = 0;
                heap.push({v[nf], static_cast<std::uint32_t>(nf)});
            }
            const std::size_t nb = (n == 0) ? i + (N - 1) : i - 1;
            if (todo[nb]) {
                phv[nb] = phv[i] - 0.5 * (dt[i] + dt[nb]);
                todo[nb] = 0;
                heap.push({v[nb], static_cast<std::uint32_t>(nb)});
            }
            if (m + 1 < MR) {
                const std::size_t ju = i + N;
                if (todo[ju]) {
                    phv[ju] = phv[i] + 0.5 * (df[i] + df[ju]) - dem[n];
                    todo[ju] = 0;
                    heap.push({v[ju], static_cast<std::uint32_t>(ju)});
                }
            }
            if (m > 0) {
                const std::size_t jd = i - N;
                if (todo[jd]) {
                    phv[jd] = phv[i] - 0.5 * (df[i] + df[jd]) + dem[n];
                    todo[jd] = 0;
                    heap.push({v[jd], static_cast<std::uint32_t>(jd)});
                }
            }
        }
    }
    return ph;
}

Phase cumsum_phase(const PhaseDerivatives& d, const GaborSystem& system) {
    if (d.rows != system.rows() || d.cols != system.frames())
        throw ShapeError("cumsum phase: derivative shape does not match system");
    Phase ph;
    ph.rows = d.rows;
    ph.cols = d.cols;
    ph.convention = Convention::FrequencyInvariant;
    ph.values.assign(d.rows * d.cols, 0.0);
    for (std::size_t m = 0; m < d.rows; ++m) {
        const double* dt = d.d_time.data() + m * d.cols;
        double* p = ph.values.data() + m * d.cols;
        for (std::size_t n = 1; n < d.cols; ++n) p[n] = p[n - 1] + dt[n - 1];
    }
    return ph;
}

Spectrogram assemble_spectrogram(const LogMagnitude& lm, const Phase& ph) {
    if (ph.rows != lm.rows() || ph.cols != lm.cols())
        throw ShapeError("assemble: phase shape does not match log-magnitude");
    Spectrogram spec;
    spec.system = lm.system;
    spec.convention = ph.convention;
    spec.coefficients.resize(lm.values.size());
    for (std::size_t i = 0; i < lm.values.size(); ++i) {
        const double mag = std::exp(lm.values[i]);
        spec.coefficients[i] = {mag * std::cos(ph.values[i]), mag * std::sin(ph.values[i])};
    }
    return spec;
}

Signal phaseless_reconstruct(const LogMagnitude& lm, double rel_tol, std::uint64_t seed,
                             unsigned sample_rate) {
    const PhaseDerivatives derivs = estimate_phase_derivatives(lm, rel_tol);
    const Phase ph = pghi(lm, derivs, rel_tol, seed);
    const Spectrogram spec = assemble_spectrogram(lm, ph);
    const Window dual = canonical_dual(lm.system);
    return idgt(spec, dual, sample_rate);
}

}  // namespace tfgen
