#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tfgen/gabor.hpp"

namespace tfgen {

/// Default relative magnitude threshold for derivative masking and heap integration.
inline constexpr double kDefaultRelTol = 1e-7;
/// Default log-domain clamp applied to zero magnitudes.
inline constexpr double kDefaultLogFloor = -30.0;

/// Natural-log magnitudes sharing the spectrogram geometry, clamped below at floor.
struct LogMagnitude {
    std::vector<double> values;
    GaborSystem system;
    double floor = kDefaultLogFloor;

    std::size_t rows() const { return system.rows(); }
    std::size_t cols() const { return system.frames(); }
    double& at(std::size_t m, std::size_t n) { return values[m * cols() + n]; }
    double at(std::size_t m, std::size_t n) const { return values[m * cols() + n]; }
};

/// Phase matrix in radians.
struct Phase {
    std::vector<double> values;
    std::size_t rows = 0;
    std::size_t cols = 0;
    Convention convention = Convention::FrequencyInvariant;

    double& at(std::size_t m, std::size_t n) { return values[m * cols + n]; }
    double at(std::size_t m, std::size_t n) const { return values[m * cols + n]; }
};

/// Demodulated phase derivatives with their significance mask; entries where the
/// mask is false are exactly 0.
struct PhaseDerivatives {
    std::vector<double> d_time;
    std::vector<double> d_freq;
    std::vector<std::uint8_t> mask;
    std::size_t rows = 0;
    std::size_t cols = 0;
};

/// ln|S| with entries below floor clamped to floor (zeros included). floor must be
/// negative.
LogMagnitude log_magnitude(const Spectrogram& spec, double floor = kDefaultLogFloor);

/// Centered finite differences of the measured phase, each step wrapped into
/// (-pi, pi]; time direction circular, frequency direction one-sided at DC/Nyquist
/// and demodulated by 2*pi*n*a/M per channel step. Entries with magnitude below
/// rel_threshold times the maximum are zeroed and masked out. Input in any
/// convention (converted internally to frequency-invariant).
PhaseDerivatives measured_phase_derivatives(const Spectrogram& spec,
                                            double rel_threshold = kDefaultRelTol);

/// Phase derivatives estimated from log-magnitude alone via the phase-magnitude
/// relations: d_time = (aM/(lambda L)) * d(logmag)/dm, d_freq (demodulated) =
/// -(lambda L/(aM)) * d(logmag)/dn. Same masking rule as the measured derivatives.
PhaseDerivatives estimate_phase_derivatives(const LogMagnitude& logmag,
                                            double rel_threshold = kDefaultRelTol);

/// Diagnostics from a pghi run.
struct PghiInfo {
    bool all_random = false;       ///< no coefficient reached the threshold
    std::size_t integrated = 0;    ///< entries assigned by propagation or seeding
};

/// Phase-gradient heap integration: seed each connected above-threshold component at
/// its magnitude peak (phase seed_phase), propagate by trapezoidal steps of the
/// derivatives in decreasing magnitude order, and fill below-threshold entries with
/// seeded uniform random phase. Output is in the frequency-invariant convention.
Phase pghi(const LogMagnitude& logmag, const PhaseDerivatives& derivs, double rel_tol,
           std::uint64_t seed = 0, PghiInfo* info = nullptr, double seed_phase = 0.0);

/// Baseline integration: per-channel cumulative sum of d_time with frame 0 at phase 0.
Phase cumsum_phase(const PhaseDerivatives& derivs, const GaborSystem& system);

/// exp(logmag + i*phase) as a spectrogram in the phase's convention.
Spectrogram assemble_spectrogram(const LogMagnitude& logmag, const Phase& phase);

/// Full phaseless reconstruction chain: estimate derivatives from the magnitude,
/// integrate with pghi, synthesize through the canonical dual. Deterministic for a
/// fixed seed.
Signal phaseless_reconstruct(const LogMagnitude& logmag, double rel_tol = kDefaultRelTol,
                             std::uint64_t seed = 0, unsigned sample_rate = 16000);

}  // namespace tfgen
