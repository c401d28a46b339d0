#pragma once

#include <string>
#include <vector>

#include "tqa/llm.hpp"
#include "tqa/profiler.hpp"

namespace tqa::selector {

using profiler::ColumnProfile;

struct SelectorConfig {
  std::size_t chunk_size = 25;
  /// ECMAScript regexes searched against column names.
  std::vector<std::string> denylist_patterns = {"^N_R"};
  /// Columns sharing a stem followed by `_<digits>` are dropped together when
  /// the family has at least this many members.
  std::size_t suffix_family_min = 5;
  int max_parse_retries = 2;
};

void validate(const SelectorConfig& cfg);

struct PruneResult {
  std::vector<ColumnProfile> kept;
  std::vector<std::string> dropped;
};

PruneResult prune_uninformative(const std::vector<ColumnProfile>& profiles,
                                const SelectorConfig& cfg = {});

struct ChunkLog {
  std::vector<std::string> prompts;
  std::vector<std::string> replies;
  std::vector<std::string> chosen;
  bool kept_whole_chunk = false;
};

struct Selection {
  std::vector<ColumnProfile> columns;
  std::vector<ChunkLog> chunks;
  std::vector<std::string> warnings;
};

std::string build_selector_prompt(const std::string& question,
                                  const std::vector<ColumnProfile>& chunk);

/// Parses a JSON array of column names out of a reply; throws ReplyParseError.
std::vector<std::string> parse_selection_reply(const std::string& reply);

/// Chunked relevance selection biased toward recall: unparseable chunks are
/// kept whole, an empty union keeps everything, and a transport failure
/// degrades to keeping every profile.
Selection select_columns(const std::string& question, const std::vector<ColumnProfile>& profiles,
                         llm::LlmClient& llm, const SelectorConfig& cfg = {});

}  // namespace tqa::selector
