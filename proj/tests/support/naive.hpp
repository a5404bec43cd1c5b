#pragma once

#include "tfgen/gabor.hpp"

namespace testsupport {

/// Direct-sum transform over the full signal, independent of the folded
/// implementation. Quadratic cost; intended for short systems only.
tfgen::Spectrogram naive_dgt(const tfgen::Signal& audio, const tfgen::GaborSystem& sys,
                             tfgen::Convention conv);

/// Delayed-window evaluation with the window indexed from its first sample
/// rather than its center.
tfgen::Spectrogram naive_start_indexed(const tfgen::Signal& audio, const tfgen::GaborSystem& sys);

}  // namespace testsupport
