#pragma once

#include <cstddef>
#include <vector>

namespace tfgen {

enum class WindowKind { Gaussian, Hann, Custom };
enum class WindowNorm { Peak, L2 };

/// Finite-support analysis/synthesis window, stored peak-centered (center sample
/// at index size()/2).
struct Window {
    std::vector<double> samples;
    WindowKind kind = WindowKind::Custom;
    WindowNorm normalization = WindowNorm::Peak;
    /// Nominal time-frequency ratio; meaningful for Gaussian windows, 0 otherwise.
    double lambda_nominal = 0.0;

    std::size_t size() const { return samples.size(); }
};

/// Peak-normalized sampled Gaussian g[j] = exp(-pi*(j-c)^2/(lambda*L)) on a support
/// of Lg samples, c = Lg/2. Requires 1 <= Lg <= L and lambda > 0.
Window make_gaussian_window(double lambda, std::size_t L, std::size_t Lg);

/// Peak-normalized periodic Hann window of length Lg (Lg = 1 degenerates to [1]).
Window make_hann_window(std::size_t Lg);

/// Time-frequency width ratio: standard deviation of index positions weighted by
/// normalized absolute values, for the window zero-extended to length L and centered
/// at index 0, divided by the same statistic of its DFT. Tracks the Gaussian lambda
/// parameter when the truncation edge is negligible (roughly Lg >= 2*sqrt(7.4*lambda*L));
/// hard-truncated windows measure noticeably wider in frequency.
double tf_ratio(const Window& w, std::size_t L);

}  // namespace tfgen
