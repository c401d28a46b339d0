#include "tqa/answer.hpp"

#include <algorithm>
#include <cmath>

#include "tqa/error.hpp"
#include "tqa/prompts.hpp"
#include "tqa/reply.hpp"
#include "tqa/text.hpp"

namespace tqa::answer {

std::string_view to_string(AnswerType t) {
  switch (t) {
    case AnswerType::Boolean:
      return "boolean";
    case AnswerType::Number:
      return "number";
    case AnswerType::Category:
      return "category";
    case AnswerType::ListCategory:
      return "list[category]";
    case AnswerType::ListNumber:
      return "list[number]";
  }
  return "category";
}

std::string_view display_name(AnswerType t) {
  switch (t) {
    case AnswerType::Boolean:
      return "Boolean";
    case AnswerType::Number:
      return "Number";
    case AnswerType::Category:
      return "Category";
    case AnswerType::ListCategory:
      return "List[Category]";
    case AnswerType::ListNumber:
      return "List[Number]";
  }
  return "Category";
}

AnswerType parse_answer_type(std::string_view name) {
  std::string key;
  for (char c : text::to_lower(text::trim_view(name))) {
    if (c != ' ' && c != '_' && c != '[' && c != ']' && c != '-') key.push_back(c);
  }
  if (key == "boolean" || key == "bool") return AnswerType::Boolean;
  if (key == "number" || key == "numeric") return AnswerType::Number;
  if (key == "category" || key == "categorical") return AnswerType::Category;
  if (key == "listcategory") return AnswerType::ListCategory;
  if (key == "listnumber") return AnswerType::ListNumber;
  throw FormatError("unknown answer type '" + std::string(name) + "'");
}

namespace {

nlohmann::json number_json(double v) {
  if (v == std::trunc(v) && std::fabs(v) < 9e15) return static_cast<long long>(v);
  return v;
}

}  // namespace

nlohmann::json to_json(const Answer& a) {
  nlohmann::json value;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          value = number_json(v);
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
          value = nlohmann::json::array();
          for (double x : v) value.push_back(number_json(x));
        } else {
          value = v;
        }
      },
      a.value);
  return {{"type", to_string(a.type)}, {"value", std::move(value)}};
}

Answer answer_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type") || !j.contains("value") || !j["type"].is_string()) {
    throw FormatError("answer must be {\"type\": ..., \"value\": ...}");
  }
  const auto type = parse_answer_type(j["type"].get<std::string>());
  const auto& v = j["value"];
  Answer a{type, {}};
  switch (type) {
    case AnswerType::Boolean:
      if (!v.is_boolean()) throw FormatError("boolean answer expects true/false");
      a.value = v.get<bool>();
      break;
    case AnswerType::Number:
      if (!v.is_number()) throw FormatError("number answer expects a number");
      a.value = v.get<double>();
      break;
    case AnswerType::Category:
      if (!v.is_string()) throw FormatError("category answer expects a string");
      a.value = v.get<std::string>();
      break;
    case AnswerType::ListCategory: {
      if (!v.is_array()) throw FormatError("list answer expects an array");
      std::vector<std::string> out;
      for (const auto& x : v) {
        if (!x.is_string()) throw FormatError("list[category] expects strings");
        out.push_back(x.get<std::string>());
      }
      a.value = std::move(out);
      break;
    }
    case AnswerType::ListNumber: {
      if (!v.is_array()) throw FormatError("list answer expects an array");
      std::vector<double> out;
      for (const auto& x : v) {
        if (!x.is_number()) throw FormatError("list[number] expects numbers");
        out.push_back(x.get<double>());
      }
      a.value = std::move(out);
      break;
    }
  }
  return a;
}

std::string canonical(const Answer& a) { return to_json(a).dump(); }

std::string answer_text(const Answer& a) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, double>) {
          return text::render_number(v);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
          return text::join(v, ", ");
        } else {
          std::vector<std::string> parts;
          for (double x : v) parts.push_back(text::render_number(x));
          return text::join(parts, ", ");
        }
      },
      a.value);
}

// --- formatter -----------------------------------------------------------------

namespace {

using runner::RuntimeValue;

// Unwraps single-element lists and 1x1 tables for scalar answer types.
Cell scalar_of(const RuntimeValue& v) {
  if (const auto* c = std::get_if<Cell>(&v)) return *c;
  if (const auto* l = std::get_if<std::vector<Cell>>(&v)) {
    if (l->size() == 1) return l->front();
    throw FormatError("expected a single value, got a list of " + std::to_string(l->size()));
  }
  const auto& t = std::get<Table>(v);
  if (t.row_count() == 1 && t.column_count() == 1) return t.columns().front().cells.front();
  throw FormatError("expected a single value, got a table with " + std::to_string(t.row_count()) +
                    " row(s) and " + std::to_string(t.column_count()) + " column(s)");
}

std::vector<Cell> list_of(const RuntimeValue& v) {
  if (const auto* c = std::get_if<Cell>(&v)) return {*c};
  if (const auto* l = std::get_if<std::vector<Cell>>(&v)) return *l;
  const auto& t = std::get<Table>(v);
  if (t.column_count() == 1) return t.columns().front().cells;
  throw FormatError("expected a list, got a table with " + std::to_string(t.column_count()) + " columns");
}

bool to_bool(const Cell& c) {
  if (c.is_bool()) return c.boolean();
  if (c.is_number()) {
    if (c.number() == 1.0) return true;
    if (c.number() == 0.0) return false;
    throw FormatError("number " + c.to_text() + " is not a boolean");
  }
  if (c.is_text()) {
    const auto s = text::to_lower(text::trim_view(c.text()));
    if (s == "si" || s == "sí" || s == "yes" || s == "true") return true;
    if (s == "no" || s == "false") return false;
    throw FormatError("text '" + c.text() + "' is not a boolean");
  }
  throw FormatError("missing value is not a boolean");
}

double to_number(const Cell& c) {
  if (c.is_bool()) return c.boolean() ? 1.0 : 0.0;
  if (auto x = extract_numeric(c)) return *x;
  throw FormatError("value '" + c.to_text() + "' holds no number");
}

std::string to_category(const Cell& c) {
  if (c.is_missing()) throw FormatError("missing value cannot be a category");
  return c.to_text();
}

}  // namespace

Answer format_answer(const RuntimeValue& v, AnswerType type) {
  switch (type) {
    case AnswerType::Boolean:
      return {type, to_bool(scalar_of(v))};
    case AnswerType::Number:
      return {type, to_number(scalar_of(v))};
    case AnswerType::Category:
      return {type, to_category(scalar_of(v))};
    case AnswerType::ListCategory: {
      std::vector<std::string> out;
      for (const auto& c : list_of(v)) {
        if (!c.is_missing()) out.push_back(c.to_text());
      }
      return {type, std::move(out)};
    }
    case AnswerType::ListNumber: {
      std::vector<double> out;
      for (const auto& c : list_of(v)) {
        if (!c.is_missing()) out.push_back(to_number(c));
      }
      return {type, std::move(out)};
    }
  }
  throw FormatError("unsupported answer type");
}

// --- interpreter ---------------------------------------------------------------

Answer coerce_json(const nlohmann::json& j, AnswerType type) {
  if (j.is_object()) {
    if (j.contains("value")) return coerce_json(j["value"], type);
    if (j.contains("answer")) return coerce_json(j["answer"], type);
    throw FormatError("object reply without a value");
  }
  auto to_cell = [](const nlohmann::json& x) -> Cell {
    if (x.is_boolean()) return Cell{x.get<bool>()};
    if (x.is_number()) return Cell{x.get<double>()};
    if (x.is_string()) return Cell{x.get<std::string>()};
    if (x.is_null()) return Cell{};
    throw FormatError("nested value in reply");
  };
  if (j.is_array()) {
    std::vector<Cell> cells;
    for (const auto& x : j) cells.push_back(to_cell(x));
    return format_answer(cells, type);
  }
  return format_answer(to_cell(j), type);
}

std::string build_interpreter_prompt(const std::string& question, const RuntimeValue& v,
                                     AnswerType type) {
  return text::substitute(prompts::kInterpreterUser, {{"question", question},
                                                     {"value", runner::render_value(v)},
                                                     {"type", std::string(to_string(type))}});
}

Answer interpret_answer(const std::string& question, const RuntimeValue& v, AnswerType type,
                        llm::LlmClient& llm) {
  try {
    const auto reply = llm.complete(llm::Stage::Interpreter, std::string(prompts::kInterpreterSystem),
                                    build_interpreter_prompt(question, v, type));
    if (auto j = reply::any_json(reply)) return coerce_json(*j, type);
  } catch (const Error&) {
  }
  return format_answer(v, type);
}

// --- comparator ----------------------------------------------------------------

namespace {

bool numbers_close(double a, double b, const CompareOptions& o) {
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return std::fabs(a - b) <= std::max(o.abs_tol, o.rel_tol * scale);
}

std::string norm(const std::string& s) { return text::to_lower(text::trim_view(s)); }

}  // namespace

bool compare_answers(const Answer& pred, const Answer& gold, const CompareOptions& opts) {
  if (pred.type != gold.type || pred.value.index() != gold.value.index()) return false;
  switch (pred.type) {
    case AnswerType::Boolean:
      return std::get<bool>(pred.value) == std::get<bool>(gold.value);
    case AnswerType::Number:
      return numbers_close(std::get<double>(pred.value), std::get<double>(gold.value), opts);
    case AnswerType::Category:
      return norm(std::get<std::string>(pred.value)) == norm(std::get<std::string>(gold.value));
    case AnswerType::ListCategory: {
      auto a = std::get<std::vector<std::string>>(pred.value);
      auto b = std::get<std::vector<std::string>>(gold.value);
      if (a.size() != b.size()) return false;
      for (auto& s : a) s = norm(s);
      for (auto& s : b) s = norm(s);
      if (!opts.ordered_lists) {
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
      }
      return a == b;
    }
    case AnswerType::ListNumber: {
      auto a = std::get<std::vector<double>>(pred.value);
      auto b = std::get<std::vector<double>>(gold.value);
      if (a.size() != b.size()) return false;
      if (!opts.ordered_lists) {
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
      }
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (!numbers_close(a[i], b[i], opts)) return false;
      }
      return true;
    }
  }
  return false;
}

}  // namespace tqa::answer
