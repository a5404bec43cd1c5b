#pragma once

#include <cstddef>
#include <vector>

#include "tfgen/gabor.hpp"
#include "tfgen/phase.hpp"

namespace tfgen {

/// ML-ready normalized log-magnitude tensor in [-1, 1]: peak-normalized magnitude,
/// natural log, clipped at -r, affinely mapped, Nyquist row dropped. The reference
/// configuration (a=128, M=512, L=16384) yields 256 x 128.
struct FeatureTensor {
    std::vector<double> values;  // row-major (rows() x cols())
    double r = 10.0;             ///< dynamic-range parameter
    double peak = 1.0;           ///< pre-normalization maximum magnitude
    GaborSystem system;

    std::size_t rows() const { return system.rows() - 1; }
    std::size_t cols() const { return system.frames(); }
    double& at(std::size_t m, std::size_t n) { return values[m * cols() + n]; }
    double at(std::size_t m, std::size_t n) const { return values[m * cols() + n]; }
};

/// Forward feature map: |S|/max -> ln -> clip to [-r, 0] -> x/(r/2) + 1.
/// peak_override > 0 normalizes by that value instead of the spectrogram's own peak
/// (per-dataset normalization).
FeatureTensor preprocess(const Spectrogram& spec, double r = 10.0,
                         double peak_override = 0.0);

/// Same map applied directly in the log domain (values - max, clip, affine); with
/// deprocess it forms an exact identity on feature values.
FeatureTensor preprocess(const LogMagnitude& logmag, double r = 10.0);

/// Exact inverse on the retained rows: x -> (x-1)*(r/2); the Nyquist row is
/// reinserted at the floor value -r. Absolute scale survives only in `peak`.
LogMagnitude deprocess(const FeatureTensor& feat);

/// Value distribution and batch consistency summary.
struct BatchStats {
    std::vector<std::size_t> histogram;  // 64 bins spanning [lo, hi]
    double lo = 0.0;
    double hi = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t count = 0;  ///< matrices in the batch
    bool has_rho = false;
    double mean_rho = 0.0;
    double std_rho = 0.0;
};

BatchStats batch_stats(const std::vector<FeatureTensor>& batch);
BatchStats batch_stats(const std::vector<LogMagnitude>& batch);

}  // namespace tfgen
