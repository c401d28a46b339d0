#include "tqa/dataset.hpp"

#include <fstream>

#include "tqa/error.hpp"
#include "tqa/text.hpp"

namespace tqa {

namespace {

template <typename F>
void for_each_json_line(const std::filesystem::path& path, F&& fn) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim_view(line).empty()) continue;
    try {
      fn(nlohmann::json::parse(line));
    } catch (const std::exception& e) {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

std::string id_of(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw Error("id must be a string or an integer");
}

}  // namespace

Question question_from_json(const nlohmann::json& j) {
  Question q;
  q.id = id_of(j.at("id"));
  q.table_id = j.at("table_id").get<std::string>();
  q.text = j.at("question").get<std::string>();
  q.type = answer::parse_answer_type(j.at("answer_type").get<std::string>());
  if (j.contains("answer") && !j["answer"].is_null()) {
    const auto& raw = j["answer"];
    try {
      q.gold = answer::answer_from_json({{"type", answer::to_string(q.type)}, {"value", raw}});
    } catch (const FormatError&) {
      q.gold = answer::coerce_json(raw, q.type);
    }
  }
  return q;
}

nlohmann::json to_json(const Question& q) {
  return {{"id", q.id},
          {"table_id", q.table_id},
          {"question", q.text},
          {"answer_type", answer::to_string(q.type)},
          {"answer", q.gold ? answer::to_json(*q.gold)["value"] : nlohmann::json()}};
}

std::vector<Question> load_questions(const std::filesystem::path& path) {
  std::vector<Question> out;
  for_each_json_line(path, [&](const nlohmann::json& j) { out.push_back(question_from_json(j)); });
  return out;
}

std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
  std::vector<Prediction> out;
  for_each_json_line(path, [&](const nlohmann::json& j) {
    Prediction p;
    p.id = id_of(j.at("id"));
    if (j.contains("answer") && !j["answer"].is_null()) p.answer = answer::answer_from_json(j["answer"]);
    out.push_back(std::move(p));
  });
  return out;
}

void write_predictions(const std::vector<Prediction>& preds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  for (const auto& p : preds) {
    nlohmann::json j = {{"id", p.id}, {"answer", p.answer ? answer::to_json(*p.answer) : nlohmann::json()}};
    out << j.dump() << "\n";
  }
}

}  // namespace tqa
