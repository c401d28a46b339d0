#include "tqa/fuzzy.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "tqa/error.hpp"
#include "tqa/text.hpp"

namespace tqa::fuzzy {

void validate(const FuzzyConfig& cfg) {
  for (int t : {cfg.match_threshold, cfg.filter_threshold}) {
    if (t < 0 || t > 100) throw ConfigError("fuzzy threshold out of range 0..100: " + std::to_string(t));
  }
}

namespace {

// Hyyrö's bit-parallel LCS for a pattern of at most 64 code points.
std::size_t lcs_bitparallel(std::u32string_view pattern, std::u32string_view text) {
  std::unordered_map<char32_t, std::uint64_t> masks;
  for (std::size_t i = 0; i < pattern.size(); ++i) masks[pattern[i]] |= std::uint64_t{1} << i;
  std::uint64_t s = ~std::uint64_t{0};
  for (char32_t c : text) {
    const auto it = masks.find(c);
    const std::uint64_t m = it == masks.end() ? 0 : it->second;
    const std::uint64_t u = s & m;
    s = (s + u) | (s - u);
  }
  const std::uint64_t used =
      pattern.size() == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << pattern.size()) - 1);
  return static_cast<std::size_t>(std::popcount(~s & used));
}

std::size_t lcs_dp(std::u32string_view a, std::u32string_view b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::size_t lcs(std::u32string_view a, std::u32string_view b) {
  if (a.size() > b.size()) std::swap(a, b);
  if (a.empty()) return 0;
  if (a.size() <= 64) return lcs_bitparallel(a, b);
  return lcs_dp(a, b);
}

double ratio_u32(std::u32string_view a, std::u32string_view b) {
  const std::size_t total = a.size() + b.size();
  if (total == 0) return 100.0;
  const std::size_t dist = total - 2 * lcs(a, b);
  return 100.0 * static_cast<double>(total - dist) / static_cast<double>(total);
}

}  // namespace

std::size_t indel_distance(std::u32string_view a, std::u32string_view b) {
  return a.size() + b.size() - 2 * lcs(a, b);
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  return levenshtein(text::decode_utf8(a), text::decode_utf8(b));
}

double similarity(std::string_view a, std::string_view b) {
  return ratio_u32(text::decode_utf8(a), text::decode_utf8(b));
}

std::optional<Cell> best_fuzzy_match(const std::vector<Cell>& values, std::string_view target,
                                     int threshold) {
  const auto lowered_target = text::to_lower(text::decode_utf8(target));
  std::unordered_set<std::string> seen;
  const Cell* best = nullptr;
  double best_score = -1.0;
  for (const auto& v : values) {
    if (v.is_missing() || !seen.insert(v.key()).second) continue;
    const double score = ratio_u32(text::to_lower(text::decode_utf8(v.to_text())), lowered_target);
    if (score > best_score) {
      best = &v;
      best_score = score;
    }
  }
  if (best == nullptr || best_score < static_cast<double>(threshold)) return std::nullopt;
  return *best;
}

std::string correct_name(std::string_view name, const std::vector<std::string>& candidates) {
  if (candidates.empty()) throw std::invalid_argument("correct_name: empty candidate list");
  for (const auto& c : candidates) {
    if (c == name) return c;
  }
  const auto target = text::decode_utf8(name);
  const std::string* best = nullptr;
  std::size_t best_dist = 0;
  for (const auto& c : candidates) {
    const auto d = levenshtein(target, text::decode_utf8(c));
    if (best == nullptr || d < best_dist) {
      best = &c;
      best_dist = d;
    }
  }
  return *best;
}

}  // namespace tqa::fuzzy
