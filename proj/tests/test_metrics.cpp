#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "support/clipgen.hpp"
#include "tfgen/common.hpp"
#include "tfgen/gabor.hpp"
#include "tfgen/metrics.hpp"
#include "tfgen/phase.hpp"
#include "tfgen/window.hpp"

using namespace tfgen;

namespace {

GaborSystem reference_system() {
    return make_system(make_gaussian_window(4.0, 16384, 512), 128, 512, 16384);
}

GaborSystem dense_system() {
    return make_system(make_gaussian_window(4.0, 16928, 736), 92, 736, 16928);
}

Signal clip_signal(std::uint64_t seed, std::size_t L) {
    const std::vector<double> base = testsupport::make_clip(seed);
    Signal s;
    s.samples.resize(L);
    for (std::size_t i = 0; i < L; ++i) s.samples[i] = base[i % base.size()];
    return s;
}

Spectrogram clip_spectrogram(std::uint64_t seed, const GaborSystem& sys) {
    return dgt(clip_signal(seed, sys.L), sys, Convention::FrequencyInvariant);
}

Spectrogram random_spectrogram(std::uint64_t seed, const GaborSystem& sys) {
    testsupport::Rng rng(seed);
    Spectrogram spec;
    spec.system = sys;
    spec.coefficients.resize(sys.rows() * sys.frames());
    for (auto& z : spec.coefficients) z = {rng.normal(), rng.normal()};
    return spec;
}

void add_noise(Spectrogram& spec, double snr_db, std::uint64_t seed) {
    testsupport::Rng rng(seed);
    double power = 0.0;
    for (const auto& z : spec.coefficients) power += std::norm(z);
    power /= static_cast<double>(spec.coefficients.size());
    const double sigma = std::sqrt(power * std::pow(10.0, -snr_db / 10.0) / 2.0);
    for (auto& z : spec.coefficients)
        z += std::complex<double>(sigma * rng.normal(), sigma * rng.normal());
}

}  // namespace

TEST_CASE("pearson handles the textbook cases") {
    CHECK(pearson({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pearson({1, 2, 3}, {6, 4, 2}) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(pearson({1, 2, 3, 4}, {1, 3, 2, 4}) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK_THROWS_AS(pearson({1, 1, 1}, {1, 2, 3}), RangeError);
    CHECK_THROWS_AS(pearson({1, 2}, {1, 2, 3}), ShapeError);
    CHECK_THROWS_AS(pearson({1}, {2}), ParamError);
}

TEST_CASE("consistent coefficients project onto themselves") {
    const Spectrogram spec = clip_spectrogram(1, reference_system());
    CHECK(projection_error(spec) <= 1e-9 * weighted_norm(spec));
}

TEST_CASE("random matrices are far from the coefficient range") {
    const Spectrogram spec = random_spectrogram(2, reference_system());
    CHECK(projection_error(spec) >= 0.5 * weighted_norm(spec));
}

TEST_CASE("projection error scales with its input") {
    const Spectrogram spec = random_spectrogram(3, reference_system());
    Spectrogram scaled = spec;
    for (auto& z : scaled.coefficients) z *= 3.0;
    const double base = projection_error(spec);
    CHECK(std::abs(projection_error(scaled) - 3.0 * base) <= 1e-12 * base);
}

TEST_CASE("affine curvature surfaces are perfectly consistent") {
    LogMagnitude lm;
    lm.system = reference_system();
    const std::size_t MR = lm.rows();
    const std::size_t N = lm.cols();
    lm.values.resize(MR * N);
    const double wn = kTwoPi * 3.0 / static_cast<double>(N);
    for (std::size_t m = 0; m < MR; ++m)
        for (std::size_t n = 0; n < N; ++n)
            lm.values[m * N + n] =
                0.01 * std::cos(wn * static_cast<double>(n)) * std::cos(0.2 * static_cast<double>(m));

    const ConsistencyReport rep = consistency(lm);
    CHECK(!rep.undefined);
    CHECK(rep.rho >= 1.0 - 1e-6);
}

TEST_CASE("flat surfaces make the measure undefined") {
    LogMagnitude lm;
    lm.system = reference_system();
    lm.values.assign(lm.rows() * lm.cols(), -5.0);
    const ConsistencyReport rep = consistency(lm);
    CHECK(rep.undefined);
    CHECK(rep.rho == 0.0);
}

TEST_CASE("a matched quadratic with balanced harmonics kills the curvature residual") {
    const GaborSystem sys = make_system(make_gaussian_window(4.0, 16, 16), 2, 16, 16);
    LogMagnitude lm;
    lm.system = sys;
    const std::size_t MR = lm.rows();
    const std::size_t N = lm.cols();
    lm.values.resize(MR * N);

    const double lam_l = sys.lambda * static_cast<double>(sys.L);
    const double c_n = kPi * static_cast<double>(sys.a * sys.a) / lam_l;
    const double c_m = kPi * lam_l / static_cast<double>(sys.M * sys.M);
    const double wn = kTwoPi / static_cast<double>(N);
    const double wm = 2.0 * std::asinh(lam_l / static_cast<double>(sys.a * sys.M) *
                                       std::sin(wn / 2.0));
    const double eps = 1e-4;
    for (std::size_t m = 0; m < MR; ++m)
        for (std::size_t n = 0; n < N; ++n)
            lm.values[m * N + n] = -0.5 * c_n * static_cast<double>(n * n) -
                                   0.5 * c_m * static_cast<double>(m * m) +
                                   eps * std::cos(wn * static_cast<double>(n)) *
                                       std::cosh(wm * static_cast<double>(m));

    const ConsistencyReport rep = consistency(lm);
    double worst = 0.0;
    for (std::size_t m = 1; m + 1 < MR; ++m)
        for (std::size_t n = 1; n + 1 < N; ++n)
            worst = std::max(worst, std::abs(rep.laplacian_residual[m * N + n]));
    CHECK(worst <= 1e-6);
}

TEST_CASE("consistency ignores constant magnitude offsets") {
    const LogMagnitude lm = log_magnitude(clip_spectrogram(4, reference_system()));
    LogMagnitude shifted = lm;
    for (double& v : shifted.values) v += 7.0;
    const ConsistencyReport a = consistency(lm);
    const ConsistencyReport b = consistency(shifted);
    CHECK(std::abs(a.rho - b.rho) <= 1e-9);
}

TEST_CASE("speech scores in the expected consistency range") {
    const GaborSystem sys = reference_system();
    double acc = 0.0;
    for (std::uint64_t seed = 1; seed <= 8; ++seed)
        acc += consistency(log_magnitude(clip_spectrogram(seed, sys))).rho;
    const double mean = acc / 8.0;
    CHECK(mean > 0.5);
    CHECK(mean < 0.9);
}

TEST_CASE("projection of consistent coefficients reports a tiny spectral error") {
    const Spectrogram spec = clip_spectrogram(5, reference_system());
    const double r = rspe(log_magnitude(spec), spec);
    CHECK(r >= -300.0);
    CHECK(r <= -200.0);
}

TEST_CASE("white noise magnitudes are harder to phase-reconstruct than speech") {
    const GaborSystem sys = dense_system();
    testsupport::Rng rng(6);
    Signal s;
    s.samples.resize(sys.L);
    for (auto& v : s.samples) v = rng.normal();

    auto reconstruct = [](const LogMagnitude& lm) {
        const PhaseDerivatives d = estimate_phase_derivatives(lm);
        return rspe(lm, assemble_spectrogram(lm, pghi(lm, d, kDefaultRelTol)));
    };
    const double noise = reconstruct(log_magnitude(dgt(s, sys, Convention::FrequencyInvariant)));
    const double speech = reconstruct(
        log_magnitude(dgt(clip_signal(6, sys.L), sys, Convention::FrequencyInvariant)));
    CHECK(noise < 0.0);
    CHECK(noise > speech + 3.0);
}

TEST_CASE("identical batches have zero distance") {
    const GaborSystem sys = reference_system();
    std::vector<LogMagnitude> batch;
    for (std::uint64_t seed = 1; seed <= 3; ++seed)
        batch.push_back(log_magnitude(clip_spectrogram(seed, sys)));
    CHECK(gamma(batch, batch) == 0.0);
}

TEST_CASE("batch distance is symmetric") {
    const GaborSystem sys = reference_system();
    std::vector<LogMagnitude> a, b;
    for (std::uint64_t seed = 1; seed <= 3; ++seed)
        a.push_back(log_magnitude(clip_spectrogram(seed, sys)));
    for (std::uint64_t seed = 4; seed <= 6; ++seed)
        b.push_back(log_magnitude(clip_spectrogram(seed, sys)));
    CHECK(gamma(a, b) == doctest::Approx(gamma(b, a)).epsilon(1e-12));
}

TEST_CASE("batch distance grows with coefficient noise") {
    const GaborSystem sys = dense_system();
    std::vector<LogMagnitude> clean, light, heavy;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        Spectrogram spec = clip_spectrogram(seed, sys);
        clean.push_back(log_magnitude(spec));
        Spectrogram a = spec;
        add_noise(a, 40.0, 100 + seed);
        light.push_back(log_magnitude(a));
        Spectrogram b = spec;
        add_noise(b, 10.0, 200 + seed);
        heavy.push_back(log_magnitude(b));
    }
    CHECK(gamma(clean, light) < gamma(clean, heavy));
}

TEST_CASE("mixed geometries are rejected") {
    std::vector<LogMagnitude> a{log_magnitude(clip_spectrogram(1, reference_system()))};
    std::vector<LogMagnitude> b{log_magnitude(clip_spectrogram(1, dense_system()))};
    CHECK_THROWS_AS(gamma(a, b), ShapeError);
    CHECK_THROWS_AS(gamma({}, a), ParamError);
}
