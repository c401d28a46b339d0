#include "tqa/reply.hpp"

#include "tqa/text.hpp"

namespace tqa::reply {

std::string strip_code_fences(std::string_view text) {
  const auto open = text.find("```");
  if (open == std::string_view::npos) return text::trim(text);
  auto body_start = text.find('\n', open + 3);
  if (body_start == std::string_view::npos) return text::trim(text.substr(open + 3));
  ++body_start;
  const auto close = text.find("```", body_start);
  return text::trim(text.substr(body_start, close == std::string_view::npos ? std::string_view::npos
                                                                            : close - body_start));
}

namespace {

// End offset (exclusive) of the bracketed value starting at `start`, honoring
// JSON strings.
std::optional<std::size_t> balanced_end(std::string_view s, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = start; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{' || c == '[') {
      ++depth;
    } else if (c == '}' || c == ']') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<nlohmann::json> first_json(std::string_view text, char open) {
  for (std::size_t pos = text.find(open); pos != std::string_view::npos;
       pos = text.find(open, pos + 1)) {
    const auto end = balanced_end(text, pos);
    if (!end) continue;
    auto parsed = nlohmann::json::parse(text.substr(pos, *end - pos), nullptr, false);
    if (!parsed.is_discarded()) return parsed;
  }
  return std::nullopt;
}

std::optional<nlohmann::json> any_json(std::string_view text) {
  const auto body = strip_code_fences(text);
  auto parsed = nlohmann::json::parse(body, nullptr, false);
  if (!parsed.is_discarded()) return parsed;
  const auto obj = body.find('{');
  const auto arr = body.find('[');
  const char first = (arr != std::string::npos && (obj == std::string::npos || arr < obj)) ? '[' : '{';
  if (auto j = first_json(body, first)) return j;
  return first_json(body, first == '[' ? '{' : '[');
}

}  // namespace tqa::reply
