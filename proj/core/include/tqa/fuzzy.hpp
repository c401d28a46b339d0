#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tqa/table.hpp"

namespace tqa::fuzzy {

struct FuzzyConfig {
  /// Used when clarifying filter values against stored values.
  int match_threshold = 90;
  /// Used by the fuzzy round of the contains-filters.
  int filter_threshold = 75;
};

/// Throws ConfigError unless both thresholds are within 0..100.
void validate(const FuzzyConfig& cfg);

/// Insertion/deletion-only edit distance over code points.
std::size_t indel_distance(std::u32string_view a, std::u32string_view b);

/// Unit-cost Levenshtein distance over code points.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);
std::size_t levenshtein(std::string_view a, std::string_view b);

/// Normalized indel similarity in [0, 100]:
///   100 * (|a| + |b| - indel(a, b)) / (|a| + |b|)
/// and 100 for two empty strings. Case-sensitive; callers lowercase.
double similarity(std::string_view a, std::string_view b);

/// Best value by lowercase similarity to `target` among the de-duplicated,
/// non-missing `values`, provided its score reaches `threshold`. Ties keep the
/// first occurrence.
std::optional<Cell> best_fuzzy_match(const std::vector<Cell>& values, std::string_view target,
                                     int threshold);

/// Returns `name` if it is one of `candidates`, otherwise the candidate with
/// the smallest Levenshtein distance (first wins on ties). Throws
/// std::invalid_argument on an empty candidate list.
std::string correct_name(std::string_view name, const std::vector<std::string>& candidates);

}  // namespace tqa::fuzzy
