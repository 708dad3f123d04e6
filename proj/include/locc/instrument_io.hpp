#pragma once

// Text format for instruments.
//
//   # comment (anywhere; runs to end of line)
//   instrument <dimension>
//   branch <label>
//   kraus [weight]
//   <dimension rows of <dimension> complex entries>
//   kraus ...
//   branch ...
//
// A complex entry is written without spaces as `re`, `re+imi`, `re-imi` or
// `imi`, where re and im are decimal floating-point literals (exponents
// allowed). Labels are single whitespace-free tokens. The serializer writes
// every entry as `re+imi`/`re-imi` with 17 significant digits, so text ->
// instrument -> text is stable and instrument -> text -> instrument is exact.

#include <filesystem>
#include <string>
#include <string_view>

#include "locc/instruments.hpp"

namespace locc {

std::string format_complex(Complex z);
/// Throws ArgumentError on malformed input.
Complex parse_complex(std::string_view token);

std::string serialize_instrument(const QuantumInstrument& inst);
QuantumInstrument parse_instrument(std::string_view text);
QuantumInstrument load_instrument(const std::filesystem::path& path);

}  // namespace locc
