#include "res/core/tokens.hpp"

#include "res/core/types.hpp"

namespace res {

std::uint64_t estimate_tokens(std::string_view text) {
    const std::uint64_t chars = utf8_length(text);
    return (chars + 3) / 4;
}

}  // namespace res
