#pragma once

#include <cstddef>
#include <vector>

#include "tfgen/gabor.hpp"
#include "tfgen/phase.hpp"

namespace tfgen {

/// Frobenius norm of a one-sided coefficient matrix with interior rows
/// double-weighted to account for the conjugate-symmetric half.
double weighted_norm(const Spectrogram& spec);

/// Distance from the range of the analysis operator: || S - dgt(idgt(S)) || in the
/// weighted Frobenius norm. Zero (to tolerance) exactly for consistent spectrograms.
double projection_error(const Spectrogram& spec);

/// Consistency diagnostics of a log-magnitude array: absolute residuals of the two
/// directional phase-magnitude relations and their correlation rho.
struct ConsistencyReport {
    double rho = 0.0;
    bool undefined = false;  ///< degenerate (zero-variance) residuals; rho reported as 0
    std::vector<double> dm_time;
    std::vector<double> dm_freq;
    std::vector<double> laplacian_residual;
    std::size_t rows = 0;
    std::size_t cols = 0;
};

/// Computes DM_n = |d2_n M + pi a^2/(lambda L)|, DM_m = |d2_m M + pi lambda L/M^2|
/// with centered second differences (circular in time), plus the discrete Laplacian
/// residual (lambda L/a^2) d2_n + (M^2/(lambda L)) d2_m + 2 pi. rho is the Pearson
/// correlation of the two residual arrays over interior frequency rows.
ConsistencyReport consistency(const LogMagnitude& logmag);

/// Convergence monitor between two batches: |mean rho(A) - mean rho(B)|.
double gamma(const std::vector<LogMagnitude>& batch_a,
             const std::vector<LogMagnitude>& batch_b);

/// Relative spectral projection error in dB between a reference magnitude and the
/// projection of a reconstructed spectrogram:
/// 20*log10(|| exp(ref) - |P(rec)| ||_w / || exp(ref) ||_w), clamped at -300 dB.
double rspe(const LogMagnitude& reference_mag, const Spectrogram& reconstructed);

/// Sample Pearson correlation; throws RangeError when either input has zero variance
/// (undefined correlation).
double pearson(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace tfgen
