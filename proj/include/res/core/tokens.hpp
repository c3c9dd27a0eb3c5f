#pragma once

#include <cstdint>
#include <string_view>

namespace res {

/// Deterministic stand-in for a model tokenizer: one token per four
/// characters (UTF-8 code points), rounded up. Used whenever a backend does
/// not report measured usage.
std::uint64_t estimate_tokens(std::string_view text);

}  // namespace res
