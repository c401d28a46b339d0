#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tqa/error.hpp"
#include "tqa/table.hpp"

// A closed, loop-free plan language. A plan is a sequence of
// `name = expression` lines ending with `answer = expression`; expressions
// are builtin calls, literals, or references to `df` and earlier names.
namespace tqa::plan {

enum class Stage { Parse, Validate, Execute };
std::string_view to_string(Stage stage);

/// Every plan failure. what() always names the stage, e.g.
/// "parse error at line 2, column 7: expected ')'".
class PlanError : public Error {
 public:
  PlanError(Stage stage, std::string message, int line = 0, int column = 0,
            std::string builtin = {});

  Stage stage() const noexcept { return stage_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::string& builtin() const noexcept { return builtin_; }
  /// Message without the stage/position prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Stage stage_;
  int line_;
  int column_;
  std::string builtin_;
  std::string detail_;
};

struct SourcePos {
  int line = 0;
  int column = 0;
};

struct Expr;

struct Call {
  std::string fn;
  std::vector<Expr> args;
};

struct Ref {
  std::string name;
};

struct Literal {
  std::variant<Cell, std::vector<Cell>> value;
};

struct Expr {
  std::variant<Call, Ref, Literal> node;
  SourcePos pos;
};

/// Structural equality; source positions are ignored.
bool operator==(const Expr& a, const Expr& b);

struct Binding {
  std::string name;
  Expr expr;
  SourcePos pos;
};

struct Plan {
  std::vector<Binding> bindings;
  /// The final `answer = ...` line; absent only in plans that fail validation.
  std::optional<Expr> answer;
  SourcePos answer_pos;
};

bool operator==(const Plan& a, const Plan& b);

/// Name of the input table inside plans.
inline constexpr std::string_view kInputName = "df";
inline constexpr std::string_view kAnswerName = "answer";

/// Strips Markdown fences and a leading language tag, then parses. Throws
/// PlanError(Stage::Parse).
Plan parse_plan(std::string_view source);

/// Canonical source: one line per binding, `answer` last, double-quoted
/// strings.
std::string render_plan(const Plan& p);
std::string render_expr(const Expr& e);

/// Checks builtins, arities, references and the final-answer rule, and
/// corrects column-name string literals against `schema`. Throws
/// PlanError(Stage::Validate).
Plan validate_plan(Plan p, const std::vector<std::string>& schema);

/// Number of builtin calls a plan evaluates (each call node runs once).
std::size_t call_count(const Plan& p);

// --- builtin registry --------------------------------------------------------

enum class Param { Table, Column, Value, Number, Integer, List, Boolean, Scalar };

struct Builtin {
  std::string_view name;
  std::vector<Param> params;
  std::string_view returns;
  std::string_view doc;
};

const std::vector<Builtin>& builtins();
const Builtin* find_builtin(std::string_view name);
/// Up to three builtin names closest to `name` by similarity.
std::vector<std::string> suggest_builtins(std::string_view name);

/// Grammar and builtin reference; embedded verbatim in the coder prompt.
std::string dsl_reference();

}  // namespace tqa::plan
