#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tqa/fuzzy.hpp"
#include "tqa/llm.hpp"
#include "tqa/profiler.hpp"
#include "tqa/table.hpp"

namespace tqa::explainer {

using profiler::ColumnProfile;

struct FilterValue {
  std::optional<std::string> column;
  std::string value;

  friend bool operator==(const FilterValue&, const FilterValue&) = default;
};

/// Natural-language solution steps produced by the explainer.
struct InstructionSet {
  std::vector<std::string> instructions;
  std::vector<std::string> columns;
  std::vector<FilterValue> filter_values;

  friend bool operator==(const InstructionSet&, const InstructionSet&) = default;
};

void to_json(nlohmann::json& j, const InstructionSet& is);
void from_json(const nlohmann::json& j, InstructionSet& is);

/// Rendering of a column kind inside clarification lines ('object' for
/// categorical columns).
std::string_view kind_label(ColumnKind kind);

/// `Be careful!. The value <v> appears in the database with the following format: '<w>'`
std::string be_careful_line(const std::string& value, const std::string& stored);
/// `The column '<c>' is of type '<kind>' and has the following example values: <v1>, ...`
std::string column_type_line(const std::string& column, ColumnKind kind,
                             const std::vector<std::string>& examples);

/// Throws std::invalid_argument on an empty selection.
std::string build_explainer_prompt(const std::string& question,
                                   const std::vector<ColumnProfile>& selected);

/// Reads the first JSON object of a reply (prose and code fences tolerated).
/// Throws ReplyParseError when no object is found or `instructions` is
/// missing or empty.
InstructionSet parse_instruction_set(const std::string& reply);

/// Corrects column names against the table schema and appends stored-format
/// hints for filter values followed by type/example lines for non-numeric
/// columns. Original instructions are left untouched.
InstructionSet clarify(InstructionSet is, const Table& t, const std::vector<ColumnProfile>& profiles,
                       const fuzzy::FuzzyConfig& fuzzy_cfg = {});

struct Explanation {
  InstructionSet instructions;
  std::vector<std::string> prompts;
  std::vector<std::string> replies;
};

/// Prompts until a reply parses or `max_attempts` is reached (then rethrows
/// the last ReplyParseError). Transport errors propagate.
Explanation explain(const std::string& question, const std::vector<ColumnProfile>& selected,
                    llm::LlmClient& llm, int max_attempts = 5);

}  // namespace tqa::explainer
