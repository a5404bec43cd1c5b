#include "tfgen/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tfgen/common.hpp"
#include "tfgen/kernels.hpp"

namespace tfgen {
namespace {

double row_weight(std::size_t m, std::size_t rows) {
    return (m == 0 || m + 1 == rows) ? 1.0 : 2.0;
}

double weighted_norm_sq_complex(const std::vector<std::complex<double>>& z,
                                std::size_t rows, std::size_t cols) {
    double acc = 0.0;
    const double* raw = reinterpret_cast<const double*>(z.data());
    for (std::size_t m = 0; m < rows; ++m)
        acc += row_weight(m, rows) * kernels::sum_sq(raw + 2 * m * cols, 2 * cols);
    return acc;
}

double weighted_norm_sq_real(const std::vector<double>& v, std::size_t rows,
                             std::size_t cols) {
    double acc = 0.0;
    for (std::size_t m = 0; m < rows; ++m)
        acc += row_weight(m, rows) * kernels::sum_sq(v.data() + m * cols, cols);
    return acc;
}

}  // namespace

double weighted_norm(const Spectrogram& spec) {
    return std::sqrt(weighted_norm_sq_complex(spec.coefficients, spec.rows(), spec.cols()));
}

double projection_error(const Spectrogram& spec) {
    const Window dual = canonical_dual(spec.system);
    const Signal s = idgt(spec, dual);
    const Spectrogram proj = dgt(s, spec.system, spec.convention);
    std::vector<std::complex<double>> diff(spec.coefficients.size());
    for (std::size_t i = 0; i < diff.size(); ++i)
        diff[i] = spec.coefficients[i] - proj.coefficients[i];
    return std::sqrt(weighted_norm_sq_complex(diff, spec.rows(), spec.cols()));
}

ConsistencyReport consistency(const LogMagnitude& lm) {
    const std::size_t MR = lm.rows();
    const std::size_t N = lm.cols();
    if (MR < 3 || N < 3) throw ShapeError("consistency: matrix must be at least 3x3");
    if (!(lm.system.lambda > 0.0)) throw ParamError("consistency: system lambda is not set");
    if (lm.values.size() != MR * N)
        throw ShapeError("consistency: value matrix does not match system shape");

    const double lamL = lm.system.lambda * static_cast<double>(lm.system.L);
    const double a = static_cast<double>(lm.system.a);
    const double M = static_cast<double>(lm.system.M);
    const double cn = kPi * a * a / lamL;
    const double cm = kPi * lamL / (M * M);
    const double wn = lamL / (a * a);
    const double wm = (M * M) / lamL;

    ConsistencyReport rep;
    rep.rows = MR;
    rep.cols = N;
    rep.dm_time.assign(MR * N, 0.0);
    rep.dm_freq.assign(MR * N, 0.0);
    rep.laplacian_residual.assign(MR * N, 0.0);

    const auto& v = lm.values;
    std::vector<double> d2n(MR * N), d2m(MR * N);
    std::vector<double> left(N), right(N);
    for (std::size_t m = 0; m < MR; ++m) {
        const double* row = v.data() + m * N;
        for (std::size_t n = 0; n < N; ++n) {
            left[n] = row[(n == 0) ? N - 1 : n - 1];
            right[n] = row[(n + 1 == N) ? 0 : n + 1];
        }
        for (std::size_t n = 0; n < N; ++n)
            d2n[m * N + n] = left[n] - 2.0 * row[n] + right[n];
        // Shifted stencil at the frequency edges; these rows are excluded from rho.
        const std::size_t lo = (m == 0) ? 0 : (m + 1 == MR) ? MR - 3 : m - 1;
        const double* r0 = v.data() + lo * N;
        const double* r1 = v.data() + (lo + 1) * N;
        const double* r2 = v.data() + (lo + 2) * N;
        for (std::size_t n = 0; n < N; ++n)
            d2m[m * N + n] = r0[n] - 2.0 * r1[n] + r2[n];
    }
    for (std::size_t i = 0; i < MR * N; ++i) {
        rep.dm_time[i] = std::fabs(d2n[i] + cn);
        rep.dm_freq[i] = std::fabs(d2m[i] + cm);
        rep.laplacian_residual[i] = wn * d2n[i] + wm * d2m[i] + kTwoPi;
    }

    std::vector<double> xs, ys;
    xs.reserve((MR - 2) * N);
    ys.reserve((MR - 2) * N);
    for (std::size_t m = 1; m + 1 < MR; ++m)
        for (std::size_t n = 0; n < N; ++n) {
            xs.push_back(rep.dm_time[m * N + n]);
            ys.push_back(rep.dm_freq[m * N + n]);
        }
    try {
        rep.rho = pearson(xs, ys);
    } catch (const RangeError&) {
        rep.undefined = true;
        rep.rho = 0.0;
    }
    return rep;
}

double gamma(const std::vector<LogMagnitude>& batch_a,
             const std::vector<LogMagnitude>& batch_b) {
    if (batch_a.empty() || batch_b.empty()) throw ParamError("gamma: empty batch");
    const std::size_t r0 = batch_a.front().rows();
    const std::size_t c0 = batch_a.front().cols();
    auto mean_rho = [&](const std::vector<LogMagnitude>& batch) {
        double acc = 0.0;
        for (const auto& lm : batch) {
            if (lm.rows() != r0 || lm.cols() != c0)
                throw ShapeError("gamma: mixed geometries across batches");
            acc += consistency(lm).rho;
        }
        return acc / static_cast<double>(batch.size());
    };
    return std::fabs(mean_rho(batch_a) - mean_rho(batch_b));
}

double rspe(const LogMagnitude& reference_mag, const Spectrogram& reconstructed) {
    const std::size_t rows = reference_mag.rows();
    const std::size_t cols = reference_mag.cols();
    if (reconstructed.rows() != rows || reconstructed.cols() != cols)
        throw ShapeError("rspe: reference and reconstruction shapes differ");

    const Window dual = canonical_dual(reconstructed.system);
    const Signal s = idgt(reconstructed, dual);
    const Spectrogram proj = dgt(s, reconstructed.system, reconstructed.convention);

    std::vector<double> ref(rows * cols), diff(rows * cols);
    for (std::size_t i = 0; i < ref.size(); ++i) {
        ref[i] = std::exp(reference_mag.values[i]);
        diff[i] = ref[i] - std::abs(proj.coefficients[i]);
    }
    const double den = std::sqrt(weighted_norm_sq_real(ref, rows, cols));
    const double num = std::sqrt(weighted_norm_sq_real(diff, rows, cols));
    if (den == 0.0) throw ParamError("rspe: zero reference magnitude");
    if (num == 0.0) return -300.0;
    return std::max(-300.0, 20.0 * std::log10(num / den));
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ShapeError("pearson: sample sets differ in length");
    if (x.size() < 2) throw ParamError("pearson: need at least two samples");
    auto constant = [](const std::vector<double>& v) {
        for (double u : v)
            if (u != v.front()) return false;
        return true;
    };
    if (constant(x) || constant(y))
        throw RangeError("pearson: undefined correlation (zero variance)");
    const double n = static_cast<double>(x.size());
    const double mx = kernels::sum(x.data(), x.size()) / n;
    const double my = kernels::sum(y.data(), y.size()) / n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw RangeError("pearson: undefined correlation (zero variance)");
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace tfgen
