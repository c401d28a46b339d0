#include <algorithm>

#include "tqa/fuzzy.hpp"
#include "tqa/planlang.hpp"

namespace tqa::plan {

const std::vector<Builtin>& builtins() {
  using P = Param;
  static const std::vector<Builtin> kBuiltins = {
      {"flatten_column_values", {P::Table, P::Column}, "table",
       "one row per value of multi-valued cells (split on ';', then ',', then '|')"},
      {"top_n_non_missing", {P::Table, P::Column, P::Integer}, "table",
       "first n rows whose column is not missing"},
      {"tail_n_non_missing", {P::Table, P::Column, P::Integer}, "table",
       "last n rows whose column is not missing"},
      {"delete_rows_by_column_value", {P::Table, P::Column, P::Value}, "table",
       "drops rows whose cell equals value exactly (none drops missing cells)"},
      {"sort_alphabetical", {P::Table, P::Column}, "table",
       "rows sorted A-Z by the column, case-insensitive, missing last"},
      {"filter_le", {P::Table, P::Column, P::Number}, "table", "rows where column <= value (numbers extracted from text)"},
      {"filter_lt", {P::Table, P::Column, P::Number}, "table", "rows where column < value"},
      {"filter_ge", {P::Table, P::Column, P::Number}, "table", "rows where column >= value"},
      {"filter_gt", {P::Table, P::Column, P::Number}, "table", "rows where column > value"},
      {"filter_contains", {P::Table, P::Column, P::Value}, "table",
       "rows whose cell contains value (case-insensitive, falls back to the closest stored value)"},
      {"filter_not_contains", {P::Table, P::Column, P::Value}, "table",
       "rows whose cell does not contain value (case-insensitive)"},
      {"exists_value", {P::Table, P::Column, P::Value}, "boolean",
       "true if filter_contains would return at least one row"},
      {"count_equal", {P::Table, P::Column, P::Value}, "number",
       "number of cells exactly equal to value (case-sensitive)"},
      {"count_containing", {P::Table, P::Column, P::Value}, "number",
       "number of rows filter_contains returns"},
      {"most_frequent", {P::Table, P::Column}, "value", "most frequent non-missing value"},
      {"most_frequent_n", {P::Table, P::Column, P::Integer}, "list",
       "the n most frequent values, most frequent first"},
      {"most_frequent_in_subset", {P::Table, P::Column, P::Column, P::Value}, "value",
       "most frequent value of the first column among rows whose second column contains value"},
      {"most_frequent_n_in_subset", {P::Table, P::Column, P::Column, P::Value, P::Integer}, "list",
       "n most frequent values of the first column among rows whose second column contains value"},
      {"column", {P::Table, P::Column}, "list", "the cells of a column"},
      {"count_rows", {P::Table}, "number", "number of rows"},
      {"unique", {P::List}, "list", "distinct non-missing values in first-seen order"},
      {"length", {P::List}, "number", "number of elements"},
      {"sum", {P::List}, "number", "sum of the numbers in the list (missing skipped)"},
      {"mean", {P::List}, "number", "mean of the numbers in the list (missing skipped)"},
      {"min_of", {P::List}, "number", "smallest number in the list"},
      {"max_of", {P::List}, "number", "largest number in the list"},
      {"head_n", {P::List, P::Integer}, "list", "first n elements"},
      {"sort_asc", {P::List}, "list", "ascending (numeric when every element holds a number)"},
      {"sort_desc", {P::List}, "list", "descending (numeric when every element holds a number)"},
      {"add", {P::Number, P::Number}, "number", "a + b"},
      {"sub", {P::Number, P::Number}, "number", "a - b"},
      {"mul", {P::Number, P::Number}, "number", "a * b"},
      {"div", {P::Number, P::Number}, "number", "a / b (error on division by zero)"},
      {"gt", {P::Scalar, P::Scalar}, "boolean", "a > b"},
      {"ge", {P::Scalar, P::Scalar}, "boolean", "a >= b"},
      {"lt", {P::Scalar, P::Scalar}, "boolean", "a < b"},
      {"le", {P::Scalar, P::Scalar}, "boolean", "a <= b"},
      {"eq", {P::Scalar, P::Scalar}, "boolean", "a equals b (numbers compared numerically)"},
      {"not_", {P::Boolean}, "boolean", "logical negation"},
      {"to_number", {P::Scalar}, "number", "number contained in a value, e.g. \"10 - Mucho\" -> 10"},
      {"first", {P::List}, "value", "first element"},
  };
  return kBuiltins;
}

const Builtin* find_builtin(std::string_view name) {
  const auto& all = builtins();
  auto it = std::find_if(all.begin(), all.end(), [&](const Builtin& b) { return b.name == name; });
  return it == all.end() ? nullptr : &*it;
}

std::vector<std::string> suggest_builtins(std::string_view name) {
  std::vector<std::pair<double, std::string>> scored;
  for (const auto& b : builtins()) scored.emplace_back(fuzzy::similarity(name, b.name), std::string(b.name));
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::string> out;
  for (const auto& [score, n] : scored) {
    if (out.size() == 3 || (!out.empty() && score < 60.0)) break;
    out.push_back(n);
  }
  return out;
}

namespace {

std::string_view param_label(Param p) {
  switch (p) {
    case Param::Table:
      return "table";
    case Param::Column:
      return "column";
    case Param::Value:
      return "value";
    case Param::Number:
      return "number";
    case Param::Integer:
      return "n";
    case Param::List:
      return "list";
    case Param::Boolean:
      return "boolean";
    case Param::Scalar:
      return "scalar";
  }
  return "value";
}

}  // namespace

std::string dsl_reference() {
  std::string out = R"ref(GRAMMAR
  program := line+
  line    := NAME "=" expr
  expr    := NAME "(" [expr ("," expr)*] ")" | NUMBER | STRING | true | false | none
           | "[" [literal ("," literal)*] "]" | NAME
  - `df` is the input table. Every other NAME must be assigned on an earlier line.
  - The last line must be `answer = <expr>`; there is exactly one such line.
  - Strings use double quotes ("Enero"); `#` starts a comment.
  - There are no loops, conditionals, operators or user-defined functions:
    use the functions below (e.g. add(a, b), gt(a, b), not_(x)).
  - Column arguments are column names given as strings, e.g. "Edad".

EXAMPLE
  x = filter_contains(df, "Mes de realización", "Enero")
  answer = gt(count_rows(x), div(count_rows(df), 2))

FUNCTIONS
)ref";
  for (const auto& b : builtins()) {
    std::string sig = "  " + std::string(b.name) + "(";
    for (std::size_t i = 0; i < b.params.size(); ++i) {
      if (i > 0) sig += ", ";
      sig += param_label(b.params[i]);
    }
    sig += ") -> " + std::string(b.returns);
    out += sig + "\n      " + std::string(b.doc) + "\n";
  }
  return out;
}

}  // namespace tqa::plan
