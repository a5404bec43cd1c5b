#pragma once

#include <cstddef>
#include <string>

#include "tfgen/gabor.hpp"

namespace tfgen {

/// Reads a mono 16-bit PCM RIFF/WAVE file; samples are mapped to [-1, 1] by
/// division by 32768. Malformed input raises FormatError naming the byte offset.
Signal read_wav(const std::string& path);

/// Writes a mono 16-bit PCM RIFF/WAVE file; values outside [-1, 1] are hard-clipped.
/// Returns the number of clipped samples.
std::size_t write_wav(const Signal& audio, const std::string& path);

}  // namespace tfgen
