#include "tqa/runner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_set>

#include "tqa/prompts.hpp"
#include "tqa/text.hpp"

namespace tqa::runner {

nlohmann::json to_json_value(const Cell& c) {
  if (c.is_missing()) return nullptr;
  if (c.is_bool()) return c.boolean();
  if (c.is_number()) {
    const double v = c.number();
    if (v == std::trunc(v) && std::fabs(v) < 9e15) return static_cast<long long>(v);
    return v;
  }
  return c.text();
}

nlohmann::json to_json_value(const RuntimeValue& v) {
  if (const auto* c = std::get_if<Cell>(&v)) return to_json_value(*c);
  if (const auto* l = std::get_if<std::vector<Cell>>(&v)) {
    auto arr = nlohmann::json::array();
    for (const auto& c : *l) arr.push_back(to_json_value(c));
    return arr;
  }
  const auto& t = std::get<Table>(v);
  auto rows = nlohmann::json::array();
  for (std::size_t r = 0; r < t.row_count(); ++r) {
    auto row = nlohmann::json::array();
    for (const auto& col : t.columns()) row.push_back(to_json_value(col.cells[r]));
    rows.push_back(std::move(row));
  }
  return {{"columns", t.column_names()}, {"rows", std::move(rows)}};
}

std::string render_value(const RuntimeValue& v, std::size_t max_rows) {
  if (const auto* c = std::get_if<Cell>(&v)) return c->is_missing() ? "(missing)" : c->to_text();
  if (const auto* l = std::get_if<std::vector<Cell>>(&v)) {
    std::vector<std::string> parts;
    for (const auto& c : *l) parts.push_back(c.is_missing() ? "(missing)" : c.to_text());
    return "[" + text::join(parts, ", ") + "]";
  }
  const auto& t = std::get<Table>(v);
  std::string out = "table with " + std::to_string(t.row_count()) + " row(s)\n" +
                    text::join(t.column_names(), " | ") + "\n";
  for (std::size_t r = 0; r < t.row_count() && r < max_rows; ++r) {
    std::vector<std::string> cells;
    for (const auto& col : t.columns()) cells.push_back(col.cells[r].to_text());
    out += text::join(cells, " | ") + "\n";
  }
  if (t.row_count() > max_rows) out += "...\n";
  return out;
}

// --- evaluation ----------------------------------------------------------------

namespace {

using plan::PlanError;

std::string_view type_name(const RuntimeValue& v) {
  if (std::holds_alternative<Table>(v)) return "table";
  if (std::holds_alternative<std::vector<Cell>>(v)) return "list";
  return "value";
}

class Evaluator {
 public:
  Evaluator(const Table& df, const fns::FnOptions& opts) : opts_(opts) {
    env_.emplace(std::string(plan::kInputName), df);
  }

  RuntimeValue eval(const plan::Expr& e) {
    if (const auto* lit = std::get_if<plan::Literal>(&e.node)) {
      if (const auto* c = std::get_if<Cell>(&lit->value)) return *c;
      return std::get<std::vector<Cell>>(lit->value);
    }
    if (const auto* ref = std::get_if<plan::Ref>(&e.node)) {
      auto it = env_.find(ref->name);
      if (it == env_.end()) {
        throw PlanError(plan::Stage::Execute, "'" + ref->name + "' is not defined", e.pos.line, e.pos.column);
      }
      return it->second;
    }
    const auto& call = std::get<plan::Call>(e.node);
    const auto* b = plan::find_builtin(call.fn);
    if (b == nullptr || b->params.size() != call.args.size()) {
      throw PlanError(plan::Stage::Execute, "invalid call to '" + call.fn + "'", e.pos.line, e.pos.column);
    }
    std::vector<RuntimeValue> args;
    args.reserve(call.args.size());
    for (const auto& a : call.args) args.push_back(eval(a));
    ++calls_;
    try {
      return apply(*b, args);
    } catch (const PlanError&) {
      throw;
    } catch (const Error& err) {
      throw PlanError(plan::Stage::Execute, err.what(), e.pos.line, e.pos.column, call.fn);
    } catch (const ArgError& err) {
      throw PlanError(plan::Stage::Execute, err.message, e.pos.line, e.pos.column, call.fn);
    }
  }

  void bind(const std::string& name, RuntimeValue v) { env_.insert_or_assign(name, std::move(v)); }
  std::size_t calls() const { return calls_; }

 private:
  struct ArgError {
    std::string message;
  };

  [[noreturn]] static void bad(std::size_t i, std::string_view expected, const RuntimeValue& got) {
    throw ArgError{"argument " + std::to_string(i + 1) + " must be " + std::string(expected) +
                   ", got " + std::string(type_name(got))};
  }

  static const Table& as_table(const std::vector<RuntimeValue>& a, std::size_t i) {
    if (const auto* t = std::get_if<Table>(&a[i])) return *t;
    bad(i, "a table", a[i]);
  }

  static Cell as_scalar(const std::vector<RuntimeValue>& a, std::size_t i) {
    if (const auto* c = std::get_if<Cell>(&a[i])) return *c;
    if (const auto* l = std::get_if<std::vector<Cell>>(&a[i]); l && l->size() == 1) return l->front();
    if (const auto* t = std::get_if<Table>(&a[i]); t && t->row_count() == 1 && t->column_count() == 1) {
      return t->columns().front().cells.front();
    }
    bad(i, "a single value", a[i]);
  }

  static std::string as_column(const std::vector<RuntimeValue>& a, std::size_t i) {
    const auto c = as_scalar(a, i);
    if (!c.is_text()) throw ArgError{"argument " + std::to_string(i + 1) + " must be a column name string"};
    return c.text();
  }

  static double to_number(const Cell& c, std::size_t i) {
    if (c.is_bool()) return c.boolean() ? 1.0 : 0.0;
    if (auto x = extract_numeric(c)) return *x;
    throw ArgError{"argument " + std::to_string(i + 1) + " is not a number: '" +
                   (c.is_missing() ? std::string("missing") : c.to_text()) + "'"};
  }

  static double as_number(const std::vector<RuntimeValue>& a, std::size_t i) {
    return to_number(as_scalar(a, i), i);
  }

  static long long as_integer(const std::vector<RuntimeValue>& a, std::size_t i) {
    const double x = as_number(a, i);
    if (x != std::trunc(x) || std::fabs(x) > 1e15) {
      throw ArgError{"argument " + std::to_string(i + 1) + " must be a whole number"};
    }
    return static_cast<long long>(x);
  }

  static std::vector<Cell> as_list(const std::vector<RuntimeValue>& a, std::size_t i) {
    if (const auto* l = std::get_if<std::vector<Cell>>(&a[i])) return *l;
    if (const auto* t = std::get_if<Table>(&a[i]); t && t->column_count() == 1) {
      return t->columns().front().cells;
    }
    bad(i, "a list (use column(table, name) to get one)", a[i]);
  }

  static bool as_bool(const std::vector<RuntimeValue>& a, std::size_t i) {
    const auto c = as_scalar(a, i);
    if (!c.is_bool()) throw ArgError{"argument " + std::to_string(i + 1) + " must be true or false"};
    return c.boolean();
  }

  static std::vector<double> numbers_of(const std::vector<Cell>& list) {
    std::vector<double> out;
    for (const auto& c : list) {
      if (auto x = extract_numeric(c)) out.push_back(*x);
    }
    return out;
  }

  static std::vector<Cell> sorted(std::vector<Cell> list, bool descending) {
    bool numeric = true;
    for (const auto& c : list) {
      if (!c.is_missing() && !extract_numeric(c)) {
        numeric = false;
        break;
      }
    }
    auto less = [&](const Cell& x, const Cell& y) {
      if (numeric) return *extract_numeric(x) < *extract_numeric(y);
      return text::to_lower(x.to_text()) < text::to_lower(y.to_text());
    };
    std::stable_sort(list.begin(), list.end(), [&](const Cell& x, const Cell& y) {
      if (x.is_missing() || y.is_missing()) return !x.is_missing() && y.is_missing();
      return descending ? less(y, x) : less(x, y);
    });
    return list;
  }

  static Cell number(double v) { return Cell{v}; }
  static Cell count(std::size_t n) { return Cell{static_cast<double>(n)}; }

  RuntimeValue apply(const plan::Builtin& b, const std::vector<RuntimeValue>& a) {
    const std::string_view n = b.name;
    if (n == "flatten_column_values") return fns::flatten_column_values(as_table(a, 0), as_column(a, 1), opts_);
    if (n == "top_n_non_missing") return fns::top_n_non_missing(as_table(a, 0), as_column(a, 1), as_integer(a, 2), fns::End::Head);
    if (n == "tail_n_non_missing") return fns::top_n_non_missing(as_table(a, 0), as_column(a, 1), as_integer(a, 2), fns::End::Tail);
    if (n == "delete_rows_by_column_value") return fns::delete_rows_by_column_value(as_table(a, 0), as_column(a, 1), as_scalar(a, 2));
    if (n == "sort_alphabetical") return fns::sort_alphabetical(as_table(a, 0), as_column(a, 1));
    if (n == "filter_le") return fns::filter_numeric(as_table(a, 0), as_column(a, 1), fns::Compare::Le, as_number(a, 2));
    if (n == "filter_lt") return fns::filter_numeric(as_table(a, 0), as_column(a, 1), fns::Compare::Lt, as_number(a, 2));
    if (n == "filter_ge") return fns::filter_numeric(as_table(a, 0), as_column(a, 1), fns::Compare::Ge, as_number(a, 2));
    if (n == "filter_gt") return fns::filter_numeric(as_table(a, 0), as_column(a, 1), fns::Compare::Gt, as_number(a, 2));
    if (n == "filter_contains") return fns::filter_contains(as_table(a, 0), as_column(a, 1), as_scalar(a, 2), opts_);
    if (n == "filter_not_contains") return fns::filter_not_contains(as_table(a, 0), as_column(a, 1), as_scalar(a, 2));
    if (n == "exists_value") return Cell{fns::exists_value(as_table(a, 0), as_column(a, 1), as_scalar(a, 2), opts_)};
    if (n == "count_equal") return count(fns::count_equal(as_table(a, 0), as_column(a, 1), as_scalar(a, 2)));
    if (n == "count_containing") return count(fns::count_containing(as_table(a, 0), as_column(a, 1), as_scalar(a, 2), opts_));
    if (n == "most_frequent") return fns::most_frequent(as_table(a, 0), as_column(a, 1));
    if (n == "most_frequent_n") return fns::most_frequent_n(as_table(a, 0), as_column(a, 1), as_integer(a, 2));
    if (n == "most_frequent_in_subset") {
      return fns::most_frequent_in_subset(as_table(a, 0), as_column(a, 1), as_column(a, 2), as_scalar(a, 3), opts_);
    }
    if (n == "most_frequent_n_in_subset") {
      return fns::most_frequent_n_in_subset(as_table(a, 0), as_column(a, 1), as_column(a, 2), as_scalar(a, 3),
                                            as_integer(a, 4), opts_);
    }
    if (n == "column") {
      const auto& t = as_table(a, 0);
      return t.find(fns::resolve_column(t, as_column(a, 1)))->cells;
    }
    if (n == "count_rows") return count(as_table(a, 0).row_count());
    if (n == "unique") {
      std::vector<Cell> out;
      std::unordered_set<std::string> seen;
      for (const auto& c : as_list(a, 0)) {
        if (!c.is_missing() && seen.insert(c.key()).second) out.push_back(c);
      }
      return out;
    }
    if (n == "length") return count(as_list(a, 0).size());
    if (n == "sum") {
      const auto xs = numbers_of(as_list(a, 0));
      return number(std::accumulate(xs.begin(), xs.end(), 0.0));
    }
    if (n == "mean" || n == "min_of" || n == "max_of") {
      const auto xs = numbers_of(as_list(a, 0));
      if (xs.empty()) throw ArgError{"the list has no numeric values"};
      if (n == "mean") return number(std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size()));
      if (n == "min_of") return number(*std::min_element(xs.begin(), xs.end()));
      return number(*std::max_element(xs.begin(), xs.end()));
    }
    if (n == "head_n") {
      auto list = as_list(a, 0);
      const auto k = as_integer(a, 1);
      if (k < 0) throw ArgError{"n must be non-negative"};
      if (static_cast<std::size_t>(k) < list.size()) list.resize(static_cast<std::size_t>(k));
      return list;
    }
    if (n == "sort_asc") return sorted(as_list(a, 0), false);
    if (n == "sort_desc") return sorted(as_list(a, 0), true);
    if (n == "add") return number(as_number(a, 0) + as_number(a, 1));
    if (n == "sub") return number(as_number(a, 0) - as_number(a, 1));
    if (n == "mul") return number(as_number(a, 0) * as_number(a, 1));
    if (n == "div") {
      const double d = as_number(a, 1);
      if (d == 0.0) throw ArgError{"division by zero"};
      return number(as_number(a, 0) / d);
    }
    if (n == "gt") return Cell{as_number(a, 0) > as_number(a, 1)};
    if (n == "ge") return Cell{as_number(a, 0) >= as_number(a, 1)};
    if (n == "lt") return Cell{as_number(a, 0) < as_number(a, 1)};
    if (n == "le") return Cell{as_number(a, 0) <= as_number(a, 1)};
    if (n == "eq") return Cell{cells_equal(as_scalar(a, 0), as_scalar(a, 1))};
    if (n == "not_") return Cell{!as_bool(a, 0)};
    if (n == "to_number") return number(as_number(a, 0));
    if (n == "first") {
      const auto list = as_list(a, 0);
      if (list.empty()) throw ArgError{"the list is empty"};
      return list.front();
    }
    throw ArgError{"builtin has no implementation"};
  }

  const fns::FnOptions& opts_;
  std::map<std::string, RuntimeValue> env_;
  std::size_t calls_ = 0;
};

}  // namespace

RuntimeValue execute_plan(const plan::Plan& p, const Table& t, const fns::FnOptions& opts,
                          ExecStats* stats) {
  if (!p.answer) throw PlanError(plan::Stage::Execute, "plan has no answer line");
  Evaluator ev(t, opts);
  for (const auto& b : p.bindings) ev.bind(b.name, ev.eval(b.expr));
  auto result = ev.eval(*p.answer);
  if (stats != nullptr) stats->calls = ev.calls();
  return result;
}

// --- coder loop ----------------------------------------------------------------

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Parsed:
      return "parsed";
    case Outcome::Validated:
      return "validated";
    case Outcome::Executed:
      return "executed";
    case Outcome::Error:
      return "error";
  }
  return "error";
}

nlohmann::json to_json(const RunTrace& trace) {
  auto attempts = nlohmann::json::array();
  for (const auto& a : trace.attempts) {
    nlohmann::json j = {{"plan", a.plan_text}, {"outcome", to_string(a.outcome)}};
    if (a.outcome == Outcome::Error) {
      j["error"] = {{"stage", a.error_stage}, {"message", a.error_message}};
    }
    attempts.push_back(std::move(j));
  }
  return {{"attempts", std::move(attempts)},
          {"attempts_used", trace.attempts_used},
          {"final_value", trace.final_value ? to_json_value(*trace.final_value) : nlohmann::json()},
          {"succeeded", trace.succeeded()}};
}

std::string build_coder_prompt(const explainer::InstructionSet& is,
                               const std::vector<profiler::ColumnProfile>& schema,
                               const std::string& dsl_reference, const std::string& question) {
  std::string instructions;
  for (std::size_t i = 0; i < is.instructions.size(); ++i) {
    instructions += std::to_string(i + 1) + ") " + is.instructions[i] + "\n";
  }
  std::string columns;
  for (const auto& p : schema) {
    columns += "- \"" + p.name + "\" [" + std::string(explainer::kind_label(p.kind)) +
               "] example values: " + text::join(p.example_values, ", ") + "\n";
  }
  return text::substitute(prompts::kCoderUser, {{"question", question.empty() ? "(see instructions)" : question},
                                                {"instructions", instructions},
                                                {"columns", columns},
                                                {"reference", dsl_reference}});
}

RunTrace solve(const explainer::InstructionSet& is, const Table& t,
               const std::vector<profiler::ColumnProfile>& schema, llm::LlmClient& llm,
               const SolveOptions& opts, const std::string& question) {
  if (opts.max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
  const auto base = build_coder_prompt(is, schema, plan::dsl_reference(), question);
  const auto names = t.column_names();
  RunTrace trace;
  std::string prompt = base;
  for (int i = 0; i < opts.max_attempts; ++i) {
    Attempt attempt;
    attempt.prompt = prompt;
    try {
      attempt.plan_text = llm.complete(llm::Stage::Coder, std::string(prompts::kCoderSystem), prompt);
    } catch (const LlmError& e) {
      attempt.error_stage = "llm";
      attempt.error_message = e.what();
      trace.attempts.push_back(std::move(attempt));
      break;
    }
    try {
      auto parsed = plan::parse_plan(attempt.plan_text);
      attempt.outcome = Outcome::Parsed;
      auto valid = plan::validate_plan(std::move(parsed), names);
      attempt.outcome = Outcome::Validated;
      trace.final_value = execute_plan(valid, t, opts.fns);
      attempt.outcome = Outcome::Executed;
      trace.attempts.push_back(std::move(attempt));
      break;
    } catch (const plan::PlanError& e) {
      attempt.outcome = Outcome::Error;
      attempt.error_stage = std::string(plan::to_string(e.stage()));
      attempt.error_message = e.what();
    }
    prompt = base + text::substitute(prompts::kCoderRepair, {{"plan", attempt.plan_text},
                                                             {"stage", attempt.error_stage},
                                                             {"message", attempt.error_message}});
    trace.attempts.push_back(std::move(attempt));
  }
  trace.attempts_used = trace.attempts.size();
  return trace;
}

}  // namespace tqa::runner
