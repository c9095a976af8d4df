#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Small text helpers shared by the file readers and writers.
namespace textgcn {

std::vector<std::string> split_fields(std::string_view line, char sep);
void strip_cr(std::string& line);
std::optional<double> parse_double(std::string_view s);
std::optional<std::size_t> parse_index(std::string_view s);

/// "%.17g"-style text; round-trips every finite double exactly.
std::string format_double17(double v);
/// Shortest text that round-trips exactly.
std::string format_double_shortest(double v);

}  // namespace textgcn
