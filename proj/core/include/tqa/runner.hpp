#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "tqa/explainer.hpp"
#include "tqa/llm.hpp"
#include "tqa/planlang.hpp"
#include "tqa/profiler.hpp"
#include "tqa/table.hpp"
#include "tqa/tablefns.hpp"

namespace tqa::runner {

/// Result of a plan: a table, a list of cells, or a single cell.
using RuntimeValue = std::variant<Table, std::vector<Cell>, Cell>;

nlohmann::json to_json_value(const Cell& c);
nlohmann::json to_json_value(const RuntimeValue& v);
/// Human-readable rendering used in interpreter prompts.
std::string render_value(const RuntimeValue& v, std::size_t max_rows = 20);

struct ExecStats {
  std::size_t calls = 0;
};

/// Evaluates a validated plan with `df` bound to `t`. Builtin failures raise
/// PlanError(Stage::Execute) carrying the builtin name.
RuntimeValue execute_plan(const plan::Plan& p, const Table& t, const fns::FnOptions& opts = {},
                          ExecStats* stats = nullptr);

enum class Outcome { Parsed, Validated, Executed, Error };
std::string_view to_string(Outcome o);

struct Attempt {
  std::string prompt;
  std::string plan_text;
  Outcome outcome = Outcome::Error;
  /// "parse", "validate", "execute" or "llm" when outcome is Error.
  std::string error_stage;
  std::string error_message;
};

struct RunTrace {
  std::vector<Attempt> attempts;
  std::optional<RuntimeValue> final_value;
  std::size_t attempts_used = 0;

  bool succeeded() const { return final_value.has_value(); }
};

nlohmann::json to_json(const RunTrace& trace);

std::string build_coder_prompt(const explainer::InstructionSet& is,
                               const std::vector<profiler::ColumnProfile>& schema,
                               const std::string& dsl_reference, const std::string& question = {});

struct SolveOptions {
  int max_attempts = 5;
  fns::FnOptions fns;
};

/// Plan-generation loop: prompt, parse, validate, execute; on failure re-prompt
/// with the failed plan and its error until success or `max_attempts`.
RunTrace solve(const explainer::InstructionSet& is, const Table& t,
               const std::vector<profiler::ColumnProfile>& schema, llm::LlmClient& llm,
               const SolveOptions& opts = {}, const std::string& question = {});

}  // namespace tqa::runner
