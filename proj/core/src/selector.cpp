#include "tqa/selector.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <set>

#include "tqa/error.hpp"
#include "tqa/fuzzy.hpp"
#include "tqa/prompts.hpp"
#include "tqa/reply.hpp"
#include "tqa/text.hpp"

namespace tqa::selector {

void validate(const SelectorConfig& cfg) {
  if (cfg.chunk_size < 1) throw ConfigError("selector chunk_size must be >= 1");
  if (cfg.max_parse_retries < 0) throw ConfigError("selector max_parse_retries must be >= 0");
  for (const auto& p : cfg.denylist_patterns) {
    try {
      std::regex re(p);
    } catch (const std::regex_error& e) {
      throw ConfigError("invalid denylist pattern '" + p + "': " + e.what());
    }
  }
}

PruneResult prune_uninformative(const std::vector<ColumnProfile>& profiles,
                                const SelectorConfig& cfg) {
  std::vector<std::regex> deny;
  for (const auto& p : cfg.denylist_patterns) deny.emplace_back(p);

  static const std::regex kSuffix(R"(^(.*)_([0-9]+)$)");
  std::map<std::string, std::size_t> family_size;
  std::vector<std::optional<std::string>> stems;
  for (const auto& p : profiles) {
    std::smatch m;
    if (std::regex_match(p.name, m, kSuffix)) {
      stems.emplace_back(m[1].str());
      ++family_size[m[1].str()];
    } else {
      stems.emplace_back(std::nullopt);
    }
  }

  PruneResult out;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& p = profiles[i];
    const bool denied = std::any_of(deny.begin(), deny.end(),
                                    [&](const std::regex& re) { return std::regex_search(p.name, re); });
    const bool family = stems[i] && family_size[*stems[i]] >= cfg.suffix_family_min;
    if (denied || family) {
      out.dropped.push_back(p.name);
    } else {
      out.kept.push_back(p);
    }
  }
  return out;
}

std::string build_selector_prompt(const std::string& question,
                                  const std::vector<ColumnProfile>& chunk) {
  std::string columns;
  for (const auto& p : chunk) columns += "- " + p.name + ": " + p.description + "\n";
  return text::substitute(prompts::kSelectorUser, {{"question", question}, {"columns", columns}});
}

std::vector<std::string> parse_selection_reply(const std::string& reply) {
  const auto j = reply::first_json(reply::strip_code_fences(reply), '[');
  if (!j || !j->is_array()) throw ReplyParseError("reply is not a JSON array of column names");
  std::vector<std::string> names;
  for (const auto& v : *j) {
    if (v.is_string()) names.push_back(v.get<std::string>());
  }
  return names;
}

Selection select_columns(const std::string& question, const std::vector<ColumnProfile>& profiles,
                         llm::LlmClient& llm, const SelectorConfig& cfg) {
  validate(cfg);
  Selection out;
  std::set<std::string> chosen;

  for (std::size_t start = 0; start < profiles.size(); start += cfg.chunk_size) {
    const auto end = std::min(profiles.size(), start + cfg.chunk_size);
    std::vector<ColumnProfile> chunk(profiles.begin() + static_cast<std::ptrdiff_t>(start),
                                     profiles.begin() + static_cast<std::ptrdiff_t>(end));
    std::vector<std::string> chunk_names;
    for (const auto& p : chunk) chunk_names.push_back(p.name);

    ChunkLog log;
    std::vector<llm::Message> messages{{llm::Role::System, std::string(prompts::kSelectorSystem)},
                                       {llm::Role::User, build_selector_prompt(question, chunk)}};
    log.prompts.push_back(messages.back().content);
    std::optional<std::vector<std::string>> names;
    for (int attempt = 0; attempt <= cfg.max_parse_retries && !names; ++attempt) {
      std::string reply;
      try {
        reply = llm.complete(llm::Stage::Selector, messages);
      } catch (const LlmError& e) {
        out.columns = profiles;
        out.warnings.push_back(std::string("column selection skipped: ") + e.what());
        out.chunks.push_back(std::move(log));
        return out;
      }
      log.replies.push_back(reply);
      try {
        names = parse_selection_reply(reply);
      } catch (const ReplyParseError&) {
        messages.push_back({llm::Role::Assistant, reply});
        messages.push_back({llm::Role::User, std::string(prompts::kSelectorRetry)});
        log.prompts.push_back(messages.back().content);
      }
    }
    if (!names) {
      log.kept_whole_chunk = true;
      log.chosen = chunk_names;
      out.warnings.push_back("unparseable selector reply for columns " + std::to_string(start + 1) +
                             ".." + std::to_string(end) + "; kept the whole chunk");
    } else {
      for (const auto& n : *names) log.chosen.push_back(fuzzy::correct_name(n, chunk_names));
    }
    chosen.insert(log.chosen.begin(), log.chosen.end());
    out.chunks.push_back(std::move(log));
  }

  for (const auto& p : profiles) {
    if (chosen.count(p.name)) out.columns.push_back(p);
  }
  if (out.columns.empty()) {
    out.columns = profiles;
    if (!profiles.empty()) out.warnings.push_back("no column selected; kept all columns");
  }
  return out;
}

}  // namespace tqa::selector
