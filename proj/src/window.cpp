#include "tfgen/window.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tfgen/common.hpp"
#include "tfgen/fft.hpp"

namespace tfgen {

Window make_gaussian_window(double lambda, std::size_t L, std::size_t Lg) {
    if (!(lambda > 0.0)) throw ParamError("gaussian window: lambda must be positive");
    if (Lg == 0) throw ParamError("gaussian window: support length must be >= 1");
    if (Lg > L) throw ParamError("gaussian window: support " + std::to_string(Lg) +
                                 " exceeds signal length " + std::to_string(L));
    Window w;
    w.kind = WindowKind::Gaussian;
    w.normalization = WindowNorm::Peak;
    w.lambda_nominal = lambda;
    w.samples.resize(Lg);
    const double c = static_cast<double>(Lg / 2);
    const double denom = lambda * static_cast<double>(L);
    for (std::size_t j = 0; j < Lg; ++j) {
        const double t = static_cast<double>(j) - c;
        w.samples[j] = std::exp(-kPi * t * t / denom);
    }
    return w;
}

Window make_hann_window(std::size_t Lg) {
    if (Lg == 0) throw ParamError("hann window: support length must be >= 1");
    Window w;
    w.kind = WindowKind::Hann;
    w.normalization = WindowNorm::Peak;
    w.samples.resize(Lg);
    if (Lg == 1) {
        w.samples[0] = 1.0;
        return w;
    }
    double peak = 0.0;
    for (std::size_t j = 0; j < Lg; ++j) {
        w.samples[j] =
            0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(j) / static_cast<double>(Lg));
        peak = std::max(peak, w.samples[j]);
    }
    for (double& v : w.samples) v /= peak;
    return w;
}

namespace {

// Standard deviation of centered positions p weighted by |x|/sum|x|; positions are
// the signed circular indices ((i + n/2) mod n) - n/2.
double weighted_sigma(const std::vector<double>& mag, std::size_t n) {
    double total = 0.0;
    for (double v : mag) total += v;
    const long long half = static_cast<long long>(n / 2);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const long long p = ((static_cast<long long>(i) + half) % static_cast<long long>(n)) - half;
        mean += static_cast<double>(p) * mag[i] / total;
    }
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const long long p = ((static_cast<long long>(i) + half) % static_cast<long long>(n)) - half;
        const double d = static_cast<double>(p) - mean;
        var += d * d * mag[i] / total;
    }
    return std::sqrt(var);
}

}  // namespace

double tf_ratio(const Window& w, std::size_t L) {
    const std::size_t Lg = w.size();
    if (Lg == 0 || L == 0) throw ParamError("tf_ratio: empty window or zero length");
    if (Lg > L) throw ParamError("tf_ratio: window support exceeds transform length");
    bool nonzero = false;
    for (double v : w.samples)
        if (v != 0.0) nonzero = true;
    if (!nonzero) throw ParamError("tf_ratio: all-zero window");

    std::vector<double> x(L, 0.0);
    const std::size_t c = Lg / 2;
    for (std::size_t j = 0; j < Lg; ++j) x[(j + L - c % L) % L] = w.samples[j];

    std::vector<double> tmag(L);
    for (std::size_t i = 0; i < L; ++i) tmag[i] = std::fabs(x[i]);
    const double sig_t = weighted_sigma(tmag, L);

    RealFft fft(L);
    std::vector<std::complex<double>> half(fft.spectrum_size());
    fft.forward(x.data(), half.data());
    std::vector<double> fmag(L);
    for (std::size_t k = 0; k < fft.spectrum_size(); ++k) fmag[k] = std::abs(half[k]);
    for (std::size_t k = fft.spectrum_size(); k < L; ++k) fmag[k] = fmag[L - k];
    const double sig_f = weighted_sigma(fmag, L);

    if (sig_f == 0.0) throw ParamError("tf_ratio: degenerate frequency spread");
    return sig_t / sig_f;
}

}  // namespace tfgen
