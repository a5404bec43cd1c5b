#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tfgen/features.hpp"
#include "tfgen/gabor.hpp"
#include "tfgen/phase.hpp"

namespace tfgen {

enum class PayloadKind : std::uint8_t { Complex = 0, LogMagnitude = 1, Feature = 2 };

/// On-disk TFSG v1 container (little-endian): magic "TFSG", u32 version, u64 L,
/// u32 a, u32 M, u32 convention, f64 lambda, u32 rows, u32 cols, u8 payload kind,
/// then row-major f64 payload (complex entries interleaved re, im). The format
/// carries no window description; consumers rebuild the default Gaussian window
/// from lambda with support min(L, M).
struct TfsgContainer {
    std::uint64_t L = 0;
    std::uint32_t a = 0;
    std::uint32_t M = 0;
    Convention convention = Convention::FrequencyInvariant;
    double lambda = 0.0;
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    PayloadKind kind = PayloadKind::Complex;
    std::vector<double> data;
};

TfsgContainer read_tfsg(const std::string& path);
void write_tfsg(const TfsgContainer& c, const std::string& path);

TfsgContainer to_container(const Spectrogram& spec);
TfsgContainer to_container(const LogMagnitude& logmag);
TfsgContainer to_container(const FeatureTensor& feat);

/// Rebuilds the transform parameterization with the default Gaussian window.
GaborSystem system_from_container(const TfsgContainer& c);

Spectrogram spectrogram_from_container(const TfsgContainer& c);
LogMagnitude logmag_from_container(const TfsgContainer& c, double floor = kDefaultLogFloor);
/// r is not stored in the format and must be supplied; peak defaults to 1.
FeatureTensor feature_from_container(const TfsgContainer& c, double r = 10.0);

}  // namespace tfgen
