#pragma once

#include <filesystem>
#include <optional>

#include <nlohmann/json.hpp>

#include "tqa/llm.hpp"
#include "tqa/pipeline.hpp"

namespace tqa {

/// JSON configuration file. Every key is optional:
///
///   base_url, api_key ("env:NAME" or "$NAME"), model.{general, coder,
///   explainer_override}, temperature, max_tokens, concurrency, retries,
///   retry_base_seconds, timeout_seconds, cache_dir, use_interpreter,
///   selector.{enabled, chunk_size, denylist_patterns, suffix_family_min,
///   max_parse_retries}, fuzzy.{match_threshold, filter_threshold},
///   profiler.{example_count, batch_size}, explainer.max_attempts,
///   coder.max_attempts, flatten_delimiters, ensemble.{repetitions,
///   sentinel_messages}, compare.{abs_tol, rel_tol, ordered_lists}
///
/// Unknown keys raise ConfigError.
struct AppConfig {
  llm::LlmConfig llm;
  pipeline::PipelineConfig pipeline;
  std::optional<std::filesystem::path> cache_dir;
};

AppConfig config_from_json(const nlohmann::json& j);
AppConfig load_config(const std::filesystem::path& path);

/// Temperature 0 and a single in-flight question.
void make_deterministic(AppConfig& cfg);

}  // namespace tqa
