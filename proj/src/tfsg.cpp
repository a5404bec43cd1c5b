#include "tfgen/tfsg.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "tfgen/common.hpp"

namespace tfgen {
namespace {

constexpr std::size_t kHeaderSize = 4 + 4 + 8 + 4 + 4 + 4 + 8 + 4 + 4 + 1;
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::vector<unsigned char>& out, T v) {
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    out.insert(out.end(), raw, raw + sizeof(T));  // native little-endian layout
}

template <typename T>
T take(const unsigned char* p) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    return v;
}

std::size_t payload_doubles(PayloadKind kind, std::size_t rows, std::size_t cols) {
    return rows * cols * (kind == PayloadKind::Complex ? 2 : 1);
}

}  // namespace

TfsgContainer read_tfsg(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    if (buf.size() < kHeaderSize)
        throw FormatError(path + ": truncated header (" + std::to_string(buf.size()) +
                          " bytes)");
    if (std::memcmp(buf.data(), "TFSG", 4) != 0)
        throw FormatError(path + ": wrong magic (expected TFSG)");
    const std::uint32_t version = take<std::uint32_t>(buf.data() + 4);
    if (version != kVersion)
        throw FormatError(path + ": unsupported version " + std::to_string(version));

    TfsgContainer c;
    std::size_t off = 8;
    c.L = take<std::uint64_t>(buf.data() + off);
    off += 8;
    c.a = take<std::uint32_t>(buf.data() + off);
    off += 4;
    c.M = take<std::uint32_t>(buf.data() + off);
    off += 4;
    const std::uint32_t conv = take<std::uint32_t>(buf.data() + off);
    off += 4;
    if (conv > 2)
        throw FormatError(path + ": invalid convention code " + std::to_string(conv));
    c.convention = static_cast<Convention>(conv);
    c.lambda = take<double>(buf.data() + off);
    off += 8;
    c.rows = take<std::uint32_t>(buf.data() + off);
    off += 4;
    c.cols = take<std::uint32_t>(buf.data() + off);
    off += 4;
    const std::uint8_t kind = buf[off];
    off += 1;
    if (kind > 2)
        throw FormatError(path + ": invalid payload kind " + std::to_string(kind));
    c.kind = static_cast<PayloadKind>(kind);

    const std::size_t want = payload_doubles(c.kind, c.rows, c.cols);
    if (buf.size() - off != want * 8)
        throw FormatError(path + ": payload size " + std::to_string(buf.size() - off) +
                          " bytes does not match declared " + std::to_string(c.rows) + "x" +
                          std::to_string(c.cols) + " shape (" + std::to_string(want * 8) +
                          " bytes expected)");
    c.data.resize(want);
    std::memcpy(c.data.data(), buf.data() + off, want * 8);
    for (double v : c.data)
        if (!std::isfinite(v)) throw FormatError(path + ": non-finite payload value");
    return c;
}

void write_tfsg(const TfsgContainer& c, const std::string& path) {
    const std::size_t want = payload_doubles(c.kind, c.rows, c.cols);
    if (c.data.size() != want)
        throw ShapeError("write_tfsg: payload length " + std::to_string(c.data.size()) +
                         " does not match declared shape");
    std::vector<unsigned char> out;
    out.reserve(kHeaderSize + want * 8);
    out.insert(out.end(), {'T', 'F', 'S', 'G'});
    put<std::uint32_t>(out, kVersion);
    put<std::uint64_t>(out, c.L);
    put<std::uint32_t>(out, c.a);
    put<std::uint32_t>(out, c.M);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(c.convention));
    put<double>(out, c.lambda);
    put<std::uint32_t>(out, c.rows);
    put<std::uint32_t>(out, c.cols);
    out.push_back(static_cast<unsigned char>(c.kind));
    const unsigned char* raw = reinterpret_cast<const unsigned char*>(c.data.data());
    out.insert(out.end(), raw, raw + want * 8);

    std::ofstream of(path, std::ios::binary | std::ios::trunc);
    if (!of) throw IoError("cannot open " + path + " for writing");
    of.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
    if (!of) throw IoError("write failed for " + path);
}

namespace {

TfsgContainer header_from_system(const GaborSystem& sys, Convention conv) {
    TfsgContainer c;
    c.L = sys.L;
    c.a = static_cast<std::uint32_t>(sys.a);
    c.M = static_cast<std::uint32_t>(sys.M);
    c.convention = conv;
    c.lambda = sys.lambda;
    return c;
}

}  // namespace

TfsgContainer to_container(const Spectrogram& spec) {
    TfsgContainer c = header_from_system(spec.system, spec.convention);
    c.rows = static_cast<std::uint32_t>(spec.rows());
    c.cols = static_cast<std::uint32_t>(spec.cols());
    c.kind = PayloadKind::Complex;
    c.data.resize(spec.coefficients.size() * 2);
    std::memcpy(c.data.data(), spec.coefficients.data(), c.data.size() * sizeof(double));
    return c;
}

TfsgContainer to_container(const LogMagnitude& lm) {
    TfsgContainer c = header_from_system(lm.system, Convention::FrequencyInvariant);
    c.rows = static_cast<std::uint32_t>(lm.rows());
    c.cols = static_cast<std::uint32_t>(lm.cols());
    c.kind = PayloadKind::LogMagnitude;
    c.data = lm.values;
    return c;
}

TfsgContainer to_container(const FeatureTensor& feat) {
    TfsgContainer c = header_from_system(feat.system, Convention::FrequencyInvariant);
    c.rows = static_cast<std::uint32_t>(feat.rows());
    c.cols = static_cast<std::uint32_t>(feat.cols());
    c.kind = PayloadKind::Feature;
    c.data = feat.values;
    return c;
}

GaborSystem system_from_container(const TfsgContainer& c) {
    const std::size_t L = static_cast<std::size_t>(c.L);
    const std::size_t Lg = std::min<std::size_t>(L, c.M);
    const double lambda = c.lambda > 0.0 ? c.lambda : 4.0;
    Window w = make_gaussian_window(lambda, L, Lg);
    return make_system(std::move(w), c.a, c.M, L, lambda);
}

Spectrogram spectrogram_from_container(const TfsgContainer& c) {
    if (c.kind != PayloadKind::Complex)
        throw FormatError("container does not hold complex coefficients");
    Spectrogram spec;
    spec.system = system_from_container(c);
    spec.convention = c.convention;
    if (c.rows != spec.rows() || c.cols != spec.cols())
        throw ShapeError("container shape " + std::to_string(c.rows) + "x" +
                         std::to_string(c.cols) + " does not match its system");
    spec.coefficients.resize(c.rows * static_cast<std::size_t>(c.cols));
    std::memcpy(spec.coefficients.data(), c.data.data(), c.data.size() * sizeof(double));
    return spec;
}

LogMagnitude logmag_from_container(const TfsgContainer& c, double floor) {
    if (c.kind != PayloadKind::LogMagnitude)
        throw FormatError("container does not hold log-magnitudes");
    LogMagnitude lm;
    lm.system = system_from_container(c);
    lm.floor = floor;
    if (c.rows != lm.rows() || c.cols != lm.cols())
        throw ShapeError("container shape " + std::to_string(c.rows) + "x" +
                         std::to_string(c.cols) + " does not match its system");
    lm.values = c.data;
    return lm;
}

FeatureTensor feature_from_container(const TfsgContainer& c, double r) {
    if (c.kind != PayloadKind::Feature)
        throw FormatError("container does not hold a feature tensor");
    FeatureTensor feat;
    feat.system = system_from_container(c);
    feat.r = r;
    feat.peak = 1.0;
    if (c.rows != feat.rows() || c.cols != feat.cols())
        throw ShapeError("container shape " + std::to_string(c.rows) + "x" +
                         std::to_string(c.cols) + " does not match its system");
    feat.values = c.data;
    return feat;
}

}  // namespace tfgen
