#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "tqa/llm.hpp"
#include "tqa/runner.hpp"

namespace tqa::answer {

enum class AnswerType { Boolean, Number, Category, ListCategory, ListNumber };

inline constexpr std::array kAllTypes = {AnswerType::Boolean, AnswerType::Number, AnswerType::Category,
                                         AnswerType::ListCategory, AnswerType::ListNumber};

/// Canonical names: "boolean", "number", "category", "list[category]",
/// "list[number]".
std::string_view to_string(AnswerType t);
/// Display names used in reports: "Boolean", ..., "List[Number]".
std::string_view display_name(AnswerType t);
/// Case-insensitive; also accepts "list_category" style spellings. Throws
/// FormatError for unknown names.
AnswerType parse_answer_type(std::string_view name);

struct Answer {
  using Value = std::variant<bool, double, std::string, std::vector<std::string>, std::vector<double>>;

  AnswerType type = AnswerType::Category;
  Value value = std::string();

  friend bool operator==(const Answer&, const Answer&) = default;
};

/// `{"type": "...", "value": ...}`; integral numbers are written as integers.
nlohmann::json to_json(const Answer& a);
/// Throws FormatError when the value does not match the declared type.
Answer answer_from_json(const nlohmann::json& j);
/// Vote key: compact JSON of to_json (lists in produced order).
std::string canonical(const Answer& a);
/// Plain text rendering (lists joined with ", "); compared against sentinels.
std::string answer_text(const Answer& a);

/// Rule-based coercion of a runtime value into `type`. Category values are
/// returned byte-for-byte. Throws FormatError.
Answer format_answer(const runner::RuntimeValue& v, AnswerType type);

/// Converts a JSON value to an answer of the given type (used for interpreter
/// replies). Throws FormatError.
Answer coerce_json(const nlohmann::json& j, AnswerType type);

std::string build_interpreter_prompt(const std::string& question, const runner::RuntimeValue& v,
                                     AnswerType type);

/// LLM-based coercion; any call or parse failure falls back to format_answer.
Answer interpret_answer(const std::string& question, const runner::RuntimeValue& v, AnswerType type,
                        llm::LlmClient& llm);

struct CompareOptions {
  double abs_tol = 1e-9;
  double rel_tol = 1e-6;
  bool ordered_lists = false;
};

/// Benchmark comparator: exact booleans, toleranced numbers, trimmed
/// case-insensitive categories, multiset lists by default. Type mismatch is
/// false.
bool compare_answers(const Answer& pred, const Answer& gold, const CompareOptions& opts = {});

}  // namespace tqa::answer
