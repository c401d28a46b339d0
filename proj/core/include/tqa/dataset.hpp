#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tqa/answer.hpp"

namespace tqa {

struct Question {
  std::string id;
  std::string table_id;
  std::string text;
  answer::AnswerType type = answer::AnswerType::Category;
  std::optional<answer::Answer> gold;
};

/// One JSON object per line: {id, table_id, question, answer_type, answer}.
/// `answer` may be absent or null. Throws Error with the line number on bad
/// input.
std::vector<Question> load_questions(const std::filesystem::path& path);
Question question_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Question& q);

struct Prediction {
  std::string id;
  /// Empty for an abstention.
  std::optional<answer::Answer> answer;
};

/// {"id": ..., "answer": {"type", "value"} | null}
std::vector<Prediction> load_predictions(const std::filesystem::path& path);
void write_predictions(const std::vector<Prediction>& preds, const std::filesystem::path& path);

}  // namespace tqa
