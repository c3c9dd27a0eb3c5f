#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace res {

using Timestamp = std::chrono::sys_seconds;

Timestamp now_utc();

// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_timestamp(Timestamp t);
std::optional<Timestamp> parse_timestamp(std::string_view text);

int current_utc_year();

}  // namespace res
