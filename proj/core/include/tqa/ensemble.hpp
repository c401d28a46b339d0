#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tqa/answer.hpp"

namespace tqa::ensemble {

using answer::Answer;

struct EnsembleConfig {
  int repetitions = 8;
  /// Answers whose text rendering equals one of these are discarded.
  std::vector<std::string> sentinel_messages = {"No matching records were found"};
};

bool is_sentinel(const Answer& a, const EnsembleConfig& cfg);

struct Tally {
  std::string key;
  Answer answer;
  int votes = 0;
  /// Repetition index where this value first appeared.
  std::size_t first_repetition = 0;
};

struct Vote {
  /// Empty when every run was discarded (abstain).
  std::optional<Answer> winner;
  std::vector<Tally> tallies;
  std::size_t discarded = 0;
};

/// Plurality vote over per-repetition answers (empty = failed run). Sentinel
/// answers are discarded; ties go to the value seen at the lowest repetition
/// index.
Vote vote(const std::vector<std::optional<Answer>>& runs, const EnsembleConfig& cfg = {});
nlohmann::json to_json(const Vote& v);

/// Runs `run_once(repetition)` `cfg.repetitions` times and votes. Exceptions
/// from a run count as a discarded run.
Vote ensemble_answer(const std::function<std::optional<Answer>(int)>& run_once,
                     const EnsembleConfig& cfg = {});

/// Stored per-repetition answers for one question.
struct QuestionRuns {
  std::string id;
  answer::AnswerType type = answer::AnswerType::Category;
  std::optional<Answer> gold;
  std::vector<std::optional<Answer>> repetitions;
};

nlohmann::json to_json(const QuestionRuns& r);
QuestionRuns question_runs_from_json(const nlohmann::json& j);

struct CurvePoint {
  int n = 0;
  double accuracy = 0.0;
};

/// Accuracy of majority voting over the first n repetitions for n = 1..max_n.
/// Questions without gold are skipped. max_n beyond the stored repetitions is
/// truncated and reported in `warnings`.
std::vector<CurvePoint> ensemble_curve(const std::vector<QuestionRuns>& results, int max_n,
                                       const EnsembleConfig& cfg = {},
                                       const answer::CompareOptions& cmp = {},
                                       std::vector<std::string>* warnings = nullptr);

std::string curve_csv(const std::vector<CurvePoint>& curve);

}  // namespace tqa::ensemble
