#include "tfgen/features.hpp"

#include <algorithm>
#include <cmath>

#include "tfgen/common.hpp"
#include "tfgen/metrics.hpp"

namespace tfgen {

FeatureTensor preprocess(const Spectrogram& spec, double r, double peak_override) {
    if (!(r > 0.0)) throw ParamError("preprocess: r must be positive");
    const std::size_t MR = spec.rows();
    const std::size_t N = spec.cols();
    if (MR < 2) throw ShapeError("preprocess: need at least two frequency rows");

    double mx = peak_override;
    if (mx <= 0.0) {
        for (const auto& z : spec.coefficients) mx = std::max(mx, std::abs(z));
        if (mx == 0.0) throw ParamError("preprocess: all-zero spectrogram");
    }

    FeatureTensor feat;
    feat.system = spec.system;
    feat.r = r;
    feat.peak = mx;
    feat.values.resize((MR - 1) * N);
    const double h = r / 2.0;
    for (std::size_t m = 0; m + 1 < MR; ++m) {
        for (std::size_t n = 0; n < N; ++n) {
            const double rel = std::abs(spec.at(m, n)) / mx;
            const double x = std::clamp(std::log(rel), -r, 0.0);
            feat.values[m * N + n] = x / h + 1.0;
        }
    }
    return feat;
}

FeatureTensor preprocess(const LogMagnitude& lm, double r) {
    if (!(r > 0.0)) throw ParamError("preprocess: r must be positive");
    const std::size_t MR = lm.rows();
    const std::size_t N = lm.cols();
    if (MR < 2) throw ShapeError("preprocess: need at least two frequency rows");
    if (lm.values.size() != MR * N)
        throw ShapeError("preprocess: value matrix does not match system shape");

    double mx = lm.values[0];
    for (double v : lm.values) mx = std::max(mx, v);

    FeatureTensor feat;
    feat.system = lm.system;
    feat.r = r;
    feat.peak = std::exp(mx);
    feat.values.resize((MR - 1) * N);
    const double h = r / 2.0;
    for (std::size_t m = 0; m + 1 < MR; ++m) {
        for (std::size_t n = 0; n < N; ++n) {
            const double x = std::clamp(lm.at(m, n) - mx, -r, 0.0);
            feat.values[m * N + n] = x / h + 1.0;
        }
    }
    return feat;
}

LogMagnitude deprocess(const FeatureTensor& feat) {
    for (double v : feat.values)
        if (!(v >= -1.0 && v <= 1.0))
            throw RangeError("deprocess: feature value outside [-1, 1]");
    const std::size_t rows = feat.rows();
    const std::size_t N = feat.cols();
    if (feat.values.size() != rows * N)
        throw ShapeError("deprocess: value matrix does not match system shape");

    LogMagnitude lm;
    lm.system = feat.system;
    lm.floor = -feat.r;
    lm.values.resize((rows + 1) * N);
    const double h = feat.r / 2.0;
    for (std::size_t i = 0; i < rows * N; ++i) lm.values[i] = (feat.values[i] - 1.0) * h;
    for (std::size_t n = 0; n < N; ++n) lm.values[rows * N + n] = -feat.r;
    return lm;
}

namespace {

struct ValueStream {
    double lo = 0.0, hi = 0.0, sum = 0.0, sumsq = 0.0;
    std::size_t n = 0;

    void add(const std::vector<double>& vals) {
        for (double v : vals) {
            if (n == 0) {
                lo = hi = v;
            } else {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            sum += v;
            sumsq += v * v;
            ++n;
        }
    }
};

void fill_histogram(BatchStats& st, const std::vector<const std::vector<double>*>& arrays) {
    st.histogram.assign(64, 0);
    const double span = st.hi - st.lo;
    for (const auto* vals : arrays) {
        for (double v : *vals) {
            std::size_t bin = 0;
            if (span > 0.0) {
                bin = static_cast<std::size_t>((v - st.lo) / span * 64.0);
                bin = std::min<std::size_t>(bin, 63);
            }
            ++st.histogram[bin];
        }
    }
}

void add_rho(BatchStats& st, const std::vector<double>& rhos) {
    if (rhos.empty()) return;
    double acc = 0.0;
    for (double r : rhos) acc += r;
    const double mean = acc / static_cast<double>(rhos.size());
    double var = 0.0;
    for (double r : rhos) var += (r - mean) * (r - mean);
    st.has_rho = true;
    st.mean_rho = mean;
    st.std_rho = std::sqrt(var / static_cast<double>(rhos.size()));
}

BatchStats finish(ValueStream& vs, std::size_t count,
                  const std::vector<const std::vector<double>*>& arrays,
                  const std::vector<double>& rhos) {
    BatchStats st;
    st.count = count;
    st.lo = vs.lo;
    st.hi = vs.hi;
    st.mean = vs.sum / static_cast<double>(vs.n);
    const double var = std::max(0.0, vs.sumsq / static_cast<double>(vs.n) - st.mean * st.mean);
    st.stddev = std::sqrt(var);
    fill_histogram(st, arrays);
    add_rho(st, rhos);
    return st;
}

}  // namespace

BatchStats batch_stats(const std::vector<FeatureTensor>& batch) {
    if (batch.empty()) throw ParamError("batch_stats: empty batch");
    ValueStream vs;
    std::vector<const std::vector<double>*> arrays;
    std::vector<double> rhos;
    for (const auto& feat : batch) {
        vs.add(feat.values);
        arrays.push_back(&feat.values);
        if (feat.system.lambda > 0.0) {
            try {
                rhos.push_back(consistency(deprocess(feat)).rho);
            } catch (const Error&) {
            }
        }
    }
    return finish(vs, batch.size(), arrays, rhos);
}

BatchStats batch_stats(const std::vector<LogMagnitude>& batch) {
    if (batch.empty()) throw ParamError("batch_stats: empty batch");
    ValueStream vs;
    std::vector<const std::vector<double>*> arrays;
    std::vector<double> rhos;
    for (const auto& lm : batch) {
        vs.add(lm.values);
        arrays.push_back(&lm.values);
        if (lm.system.lambda > 0.0) {
            try {
                rhos.push_back(consistency(lm).rho);
            } catch (const Error&) {
            }
        }
    }
    return finish(vs, batch.size(), arrays, rhos);
}

}  // namespace tfgen
