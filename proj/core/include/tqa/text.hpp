#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared by the table engine, the fuzzy matcher and the
// prompt builders. All strings are UTF-8.
namespace tqa::text {

std::string_view trim_view(std::string_view s);
std::string trim(std::string_view s);

/// Decodes UTF-8 into code points. Invalid bytes decode as U+FFFD.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);

/// Lowercases ASCII, Latin-1 and Latin Extended-A letters; everything else
/// (including accents) is preserved.
char32_t to_lower(char32_t c);
std::u32string to_lower(std::u32string_view s);
std::string to_lower(std::string_view utf8);

bool contains_ci(std::string_view haystack, std::string_view needle);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Shortest decimal rendering that parses back to the same double. Integral
/// values below 1e15 render without a fractional part and -0 renders as "0".
std::string render_number(double v);

/// Parses the whole (trimmed) string as a decimal number. Accepts an optional
/// sign, a decimal point or a decimal comma between digits, and an exponent.
/// Rejects "nan", "inf", hex and anything with trailing garbage.
std::optional<double> parse_number(std::string_view s);

/// Returns the first decimal number embedded in `s` (see extract_numeric).
std::optional<double> first_number(std::string_view s);

/// Replaces every "{key}" in `tmpl` with the matching value.
std::string substitute(std::string_view tmpl,
                       const std::vector<std::pair<std::string, std::string>>& vars);

}  // namespace tqa::text
