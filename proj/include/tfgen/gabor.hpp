#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "tfgen/window.hpp"

namespace tfgen {

/// Phase convention of stored Gabor coefficients.
enum class Convention : int {
    FrequencyInvariant = 0,
    TimeInvariant = 1,
    SimplifiedTimeInvariant = 2,
};

const char* convention_name(Convention c);

/// Real signal plus its sample rate.
struct Signal {
    std::vector<double> samples;
    unsigned sample_rate = 16000;
};

/// Complete transform parameterization: analysis window, hop size a, channel count M,
/// signal length L, and time-frequency ratio lambda.
struct GaborSystem {
    Window window;
    std::size_t a = 0;
    std::size_t M = 0;
    std::size_t L = 0;
    double lambda = 0.0;

    /// One-sided channel count M/2 + 1 (DC through Nyquist).
    std::size_t rows() const { return M / 2 + 1; }
    /// Number of time frames N = L/a.
    std::size_t frames() const { return L / a; }
    double redundancy() const { return static_cast<double>(M) / static_cast<double>(a); }
    /// True when redundancy M/a < 4, below the reliable range for phase work.
    bool low_redundancy() const { return M < 4 * a; }
};

/// Validates lattice divisibility (a | L, M | L, M even) and window support.
/// lambda <= 0 resolves automatically: the nominal ratio for Gaussian windows,
/// the measured tf_ratio otherwise.
GaborSystem make_system(Window window, std::size_t a, std::size_t M, std::size_t L,
                        double lambda = 0.0);

/// One-sided complex Gabor coefficients, row-major (M/2+1) x (L/a).
struct Spectrogram {
    std::vector<std::complex<double>> coefficients;
    GaborSystem system;
    Convention convention = Convention::FrequencyInvariant;

    std::size_t rows() const { return system.rows(); }
    std::size_t cols() const { return system.frames(); }
    std::complex<double>& at(std::size_t m, std::size_t n) {
        return coefficients[m * cols() + n];
    }
    const std::complex<double>& at(std::size_t m, std::size_t n) const {
        return coefficients[m * cols() + n];
    }
};

/// Canonical dual window for a painless system (window support <= M): samples
/// g[j] / (M * sum_k g[j - k*a]^2). Throws UnsupportedError when the support exceeds
/// M and FrameError when the frame weights are near-singular.
Window canonical_dual(const GaborSystem& system);

/// Forward discrete Gabor transform with circular indexing, one-sided storage,
/// expressed in the requested phase convention.
Spectrogram dgt(const Signal& signal, const GaborSystem& system,
                Convention convention = Convention::FrequencyInvariant);

/// Inverse transform by overlap-add synthesis with the given dual window. Input in
/// any convention (converted internally); consistent input reproduces the analyzed
/// signal to ~1e-10 relative error.
Signal idgt(const Spectrogram& spec, const Window& dual, unsigned sample_rate = 16000);

/// Entrywise phase-factor change between conventions; magnitudes are preserved
/// (bit-exactly whenever the factor is a quarter turn, which covers every entry at
/// the reference lattice a=128, M=512). Conversions involving the simplified
/// time-invariant form require a to divide floor(Lg/2).
Spectrogram convert_convention(const Spectrogram& spec, Convention target);

}  // namespace tfgen
