#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tqa/llm.hpp"
#include "tqa/table.hpp"

namespace tqa::profiler {

/// Bumped whenever profiling or description logic changes; part of every
/// cache fingerprint.
inline constexpr std::string_view kProfilerVersion = "tqa-profiler-1";

struct ColumnProfile {
  std::string name;
  ColumnKind kind = ColumnKind::Categorical;
  std::string description;
  std::size_t null_count = 0;
  std::size_t distinct_count = 0;
  std::vector<std::string> example_values;
  std::optional<double> min;
  std::optional<double> max;

  friend bool operator==(const ColumnProfile&, const ColumnProfile&) = default;
};

void to_json(nlohmann::json& j, const ColumnProfile& p);
void from_json(const nlohmann::json& j, ColumnProfile& p);

struct ProfileOptions {
  std::size_t example_count = 3;
  /// Columns per description prompt.
  std::size_t batch_size = 25;
};

std::vector<ColumnProfile> profile_table(const Table& t, const ProfileOptions& opts = {});

/// "Column '<name>' of type <kind> with example values: <v1>, <v2>, <v3>"
std::string fallback_description(const ColumnProfile& p);

/// Fills descriptions via the LLM (one prompt per batch of columns). Columns
/// the reply does not cover, and whole batches whose call or parse fails,
/// get fallback_description. `llm` may be null.
std::vector<ColumnProfile> describe_columns(std::vector<ColumnProfile> profiles, const Table& t,
                                            llm::LlmClient* llm, const ProfileOptions& opts = {});

std::string build_descriptor_prompt(const std::vector<ColumnProfile>& batch, const Table& t);

/// Hex SHA-256 over the CSV bytes followed by the profiler version.
std::string fingerprint(std::string_view csv_bytes, std::string_view version = kProfilerVersion);
std::string fingerprint_file(const std::filesystem::path& csv_path);

/// `<dir>/<fingerprint>.json` store. Corrupt entries read as misses and are
/// removed.
class ProfileCache {
 public:
  explicit ProfileCache(std::filesystem::path dir);

  std::optional<std::vector<ColumnProfile>> get(const std::string& fingerprint) const;
  void put(const std::string& fingerprint, const std::vector<ColumnProfile>& profiles) const;
  std::filesystem::path path_for(const std::string& fingerprint) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace tqa::profiler
