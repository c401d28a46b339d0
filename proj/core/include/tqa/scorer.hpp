#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tqa/answer.hpp"
#include "tqa/dataset.hpp"

namespace tqa::scorer {

struct TypeScore {
  answer::AnswerType type = answer::AnswerType::Category;
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy = 0.0;
};

struct Report {
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy = 0.0;
  /// Only types with at least one scored question, in canonical type order.
  std::vector<TypeScore> per_type;
  std::vector<std::string> warnings;
};

struct Scored {
  Question question;
  /// Empty for an abstention.
  std::optional<answer::Answer> prediction;
};

/// Abstentions count as wrong. Questions without gold are excluded with a
/// warning.
Report score(const std::vector<Scored>& items, const answer::CompareOptions& cmp = {});

/// Joins predictions to questions by id. Questions with no prediction count as
/// abstentions; predictions with an unknown id are warned about.
Report score(const std::vector<Question>& questions, const std::vector<Prediction>& predictions,
             const answer::CompareOptions& cmp = {});

nlohmann::json to_json(const Report& r);

/// Two-decimal accuracy with trailing zeros trimmed: 0.71, 0.9, 1.
std::string format_accuracy(double acc);

/// Aligned text table with a Score row and a Size row; columns Total followed
/// by each present answer type.
std::string render_table(const Report& r);

}  // namespace tqa::scorer
