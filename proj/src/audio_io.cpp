#include "tfgen/audio_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "tfgen/common.hpp"

namespace tfgen {
namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what, std::size_t offset) {
    throw FormatError(path + ": " + what + " at byte " + std::to_string(offset));
}

std::uint32_t rd_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint16_t rd_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}

void wr_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>(v >> 8 & 0xff));
    out.push_back(static_cast<unsigned char>(v >> 16 & 0xff));
    out.push_back(static_cast<unsigned char>(v >> 24 & 0xff));
}

void wr_u16(std::vector<unsigned char>& out, std::uint16_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>(v >> 8 & 0xff));
}

}  // namespace

Signal read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    if (buf.size() < 12) bad(path, "truncated RIFF header", buf.size());
    if (std::memcmp(buf.data(), "RIFF", 4) != 0) bad(path, "missing RIFF magic", 0);
    if (std::memcmp(buf.data() + 8, "WAVE", 4) != 0) bad(path, "missing WAVE tag", 8);

    Signal sig;
    bool have_fmt = false;
    bool have_data = false;
    std::size_t pos = 12;
    while (pos + 8 <= buf.size()) {
        const unsigned char* hdr = buf.data() + pos;
        const std::uint32_t size = rd_u32(hdr + 4);
        const std::size_t body = pos + 8;
        if (std::memcmp(hdr, "fmt ", 4) == 0) {
            if (size < 16 || body + 16 > buf.size()) bad(path, "truncated fmt chunk", body);
            const std::uint16_t format = rd_u16(buf.data() + body);
            const std::uint16_t channels = rd_u16(buf.data() + body + 2);
            const std::uint32_t rate = rd_u32(buf.data() + body + 4);
            const std::uint16_t bits = rd_u16(buf.data() + body + 14);
            if (format != 1) bad(path, "not PCM (format " + std::to_string(format) + ")", body);
            if (channels != 1)
                bad(path, "not mono (" + std::to_string(channels) + " channels)", body + 2);
            if (bits != 16)
                bad(path, "not 16-bit (" + std::to_string(bits) + " bits)", body + 14);
            sig.sample_rate = rate;
            have_fmt = true;
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            if (!have_fmt) bad(path, "data chunk before fmt chunk", pos);
            if (body + size > buf.size()) bad(path, "truncated data chunk", buf.size());
            if (size % 2 != 0) bad(path, "odd data chunk size for 16-bit samples", pos + 4);
            const std::size_t count = size / 2;
            sig.samples.resize(count);
            for (std::size_t i = 0; i < count; ++i) {
                const std::uint16_t u = rd_u16(buf.data() + body + 2 * i);
                sig.samples[i] = static_cast<double>(static_cast<std::int16_t>(u)) / 32768.0;
            }
            have_data = true;
        }
        pos = body + size + (size % 2);  // chunks are word-aligned
    }
    if (!have_fmt) bad(path, "missing fmt chunk", buf.size());
    if (!have_data) bad(path, "missing data chunk", buf.size());
    return sig;
}

std::size_t write_wav(const Signal& audio, const std::string& path) {
    for (double v : audio.samples)
        if (!std::isfinite(v)) throw ParamError("write_wav: non-finite sample");
    const std::uint32_t data_size = static_cast<std::uint32_t>(audio.samples.size() * 2);

    std::vector<unsigned char> out;
    out.reserve(44 + data_size);
    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    wr_u32(out, 36 + data_size);
    out.insert(out.end(), {'W', 'A', 'V', 'E'});
    out.insert(out.end(), {'f', 'm', 't', ' '});
    wr_u32(out, 16);
    wr_u16(out, 1);  // PCM
    wr_u16(out, 1);  // mono
    wr_u32(out, audio.sample_rate);
    wr_u32(out, audio.sample_rate * 2);  // byte rate
    wr_u16(out, 2);                      // block align
    wr_u16(out, 16);                     // bits per sample
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    wr_u32(out, data_size);

    std::size_t clipped = 0;
    for (double v : audio.samples) {
        double x = v;
        if (x > 1.0) {
            x = 1.0;
            ++clipped;
        } else if (x < -1.0) {
            x = -1.0;
            ++clipped;
        }
        long q = std::lrint(x * 32768.0);
        q = std::clamp(q, -32768L, 32767L);
        wr_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    }

    std::ofstream of(path, std::ios::binary | std::ios::trunc);
    if (!of) throw IoError("cannot open " + path + " for writing");
    of.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
    if (!of) throw IoError("write failed for " + path);
    return clipped;
}

}  // namespace tfgen
