#include "tqa/explainer.hpp"

#include <algorithm>
#include <stdexcept>

#include "tqa/error.hpp"
#include "tqa/prompts.hpp"
#include "tqa/reply.hpp"
#include "tqa/text.hpp"

namespace tqa::explainer {

void to_json(nlohmann::json& j, const InstructionSet& is) {
  auto fv = nlohmann::json::array();
  for (const auto& f : is.filter_values) {
    fv.push_back({{"column", f.column ? nlohmann::json(*f.column) : nlohmann::json()},
                  {"value", f.value}});
  }
  j = {{"instructions", is.instructions}, {"columns", is.columns}, {"filter_values", fv}};
}

namespace {

std::optional<std::string> scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return text::trim(v.get<std::string>());
  if (v.is_number()) return text::render_number(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return std::nullopt;
}

}  // namespace

void from_json(const nlohmann::json& j, InstructionSet& is) {
  is = InstructionSet{};
  if (!j.is_object()) throw ReplyParseError("instruction set must be a JSON object");
  if (j.contains("instructions") && j["instructions"].is_array()) {
    for (const auto& s : j["instructions"]) {
      if (auto t = scalar_text(s); t && !t->empty()) is.instructions.push_back(*t);
    }
  } else if (j.contains("instructions") && j["instructions"].is_string()) {
    is.instructions.push_back(text::trim(j["instructions"].get<std::string>()));
  }
  if (j.contains("columns") && j["columns"].is_array()) {
    for (const auto& c : j["columns"]) {
      if (c.is_string()) is.columns.push_back(c.get<std::string>());
    }
  }
  if (j.contains("filter_values")) {
    const auto& fv = j["filter_values"];
    if (fv.is_array()) {
      for (const auto& item : fv) {
        if (item.is_object()) {
          auto value = item.contains("value") ? scalar_text(item["value"]) : std::nullopt;
          if (!value) continue;
          std::optional<std::string> column;
          if (item.contains("column") && item["column"].is_string()) {
            column = item["column"].get<std::string>();
          }
          is.filter_values.push_back({column, *value});
        } else if (auto value = scalar_text(item)) {
          is.filter_values.push_back({std::nullopt, *value});
        }
      }
    } else if (fv.is_object()) {
      for (const auto& [column, v] : fv.items()) {
        if (auto value = scalar_text(v)) is.filter_values.push_back({column, *value});
      }
    }
  }
}

std::string_view kind_label(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::Categorical:
      return "object";
    case ColumnKind::Numeric:
      return "number";
    case ColumnKind::MixedNumeric:
      return "mixed";
    case ColumnKind::Boolean:
      return "bool";
  }
  return "object";
}

std::string be_careful_line(const std::string& value, const std::string& stored) {
  return "Be careful!. The value " + value +
         " appears in the database with the following format: '" + stored + "'";
}

std::string column_type_line(const std::string& column, ColumnKind kind,
                             const std::vector<std::string>& examples) {
  return "The column '" + column + "' is of type '" + std::string(kind_label(kind)) +
         "' and has the following example values: " + text::join(examples, ", ");
}

std::string build_explainer_prompt(const std::string& question,
                                   const std::vector<ColumnProfile>& selected) {
  if (selected.empty()) throw std::invalid_argument("build_explainer_prompt: no columns selected");
  std::string columns;
  for (const auto& p : selected) {
    columns += "- " + p.name + " [" + std::string(kind_label(p.kind)) + "]: " + p.description +
               " (example values: " + text::join(p.example_values, ", ") + ")\n";
  }
  return text::substitute(prompts::kExplainerUser, {{"question", question}, {"columns", columns}});
}

InstructionSet parse_instruction_set(const std::string& reply) {
  const auto j = reply::first_json(reply::strip_code_fences(reply), '{');
  if (!j) throw ReplyParseError("no JSON object found in the explainer reply");
  auto is = j->get<InstructionSet>();
  if (is.instructions.empty()) throw ReplyParseError("the JSON object has no instructions");
  return is;
}

namespace {

bool occurs_exactly(const Column& col, const std::string& value) {
  return std::any_of(col.cells.begin(), col.cells.end(), [&](const Cell& c) {
    return !c.is_missing() && c.to_text() == value;
  });
}

}  // namespace

InstructionSet clarify(InstructionSet is, const Table& t, const std::vector<ColumnProfile>& profiles,
                       const fuzzy::FuzzyConfig& fuzzy_cfg) {
  const auto schema = t.column_names();
  if (schema.empty()) {
    is.columns.clear();
    return is;
  }
  for (auto& c : is.columns) c = fuzzy::correct_name(c, schema);

  std::vector<std::string> careful;
  for (const auto& fv : is.filter_values) {
    const Column* col = nullptr;
    std::optional<Cell> match;
    if (fv.column) {
      col = t.find(fuzzy::correct_name(*fv.column, schema));
      match = fuzzy::best_fuzzy_match(col->cells, fv.value, fuzzy_cfg.match_threshold);
    } else {
      for (const auto& name : is.columns) {
        const auto* candidate = t.find(name);
        auto m = fuzzy::best_fuzzy_match(candidate->cells, fv.value, fuzzy_cfg.match_threshold);
        if (m) {
          col = candidate;
          match = std::move(m);
          break;
        }
      }
    }
    if (col == nullptr || !match || occurs_exactly(*col, fv.value)) continue;
    const auto stored = match->to_text();
    if (stored == fv.value) continue;
    auto line = be_careful_line(fv.value, stored);
    if (std::find(careful.begin(), careful.end(), line) == careful.end()) careful.push_back(line);
  }

  std::vector<std::string> typed;
  std::vector<std::string> seen;
  for (const auto& name : is.columns) {
    if (std::find(seen.begin(), seen.end(), name) != seen.end()) continue;
    seen.push_back(name);
    const auto* col = t.find(name);
    if (col->kind == ColumnKind::Numeric) continue;
    auto it = std::find_if(profiles.begin(), profiles.end(),
                           [&](const ColumnProfile& p) { return p.name == name; });
    std::vector<std::string> examples;
    if (it != profiles.end()) {
      examples = it->example_values;
    } else {
      examples = profiler::profile_table(Table(t.name(), {*col})).front().example_values;
    }
    typed.push_back(column_type_line(name, col->kind, examples));
  }

  is.instructions.insert(is.instructions.end(), careful.begin(), careful.end());
  is.instructions.insert(is.instructions.end(), typed.begin(), typed.end());
  return is;
}

Explanation explain(const std::string& question, const std::vector<ColumnProfile>& selected,
                    llm::LlmClient& llm, int max_attempts) {
  Explanation out;
  std::vector<llm::Message> messages{{llm::Role::System, std::string(prompts::kExplainerSystem)},
                                     {llm::Role::User, build_explainer_prompt(question, selected)}};
  out.prompts.push_back(messages.back().content);
  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt < std::max(1, max_attempts); ++attempt) {
    auto reply = llm.complete(llm::Stage::Explainer, messages);
    out.replies.push_back(reply);
    try {
      out.instructions = parse_instruction_set(reply);
      return out;
    } catch (const ReplyParseError& e) {
      last_error = e.what();
      messages.push_back({llm::Role::Assistant, reply});
      messages.push_back(
          {llm::Role::User, text::substitute(prompts::kExplainerRetry, {{"error", last_error}})});
      out.prompts.push_back(messages.back().content);
    }
  }
  throw ReplyParseError("explainer failed after " + std::to_string(max_attempts) +
                        " attempts: " + last_error);
}

}  // namespace tqa::explainer
