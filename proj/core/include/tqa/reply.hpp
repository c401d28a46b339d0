#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

// Helpers for pulling structured data out of free-form LLM replies.
namespace tqa::reply {

/// Removes a surrounding ``` fence (and its language tag) if present;
/// otherwise returns the trimmed input.
std::string strip_code_fences(std::string_view text);

/// First balanced JSON value starting with `open` ('{' or '[') that parses.
std::optional<nlohmann::json> first_json(std::string_view text, char open);

/// Whole reply as a JSON value (after fence stripping), falling back to the
/// first embedded object or array.
std::optional<nlohmann::json> any_json(std::string_view text);

}  // namespace tqa::reply
