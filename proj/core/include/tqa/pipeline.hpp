#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tqa/answer.hpp"
#include "tqa/dataset.hpp"
#include "tqa/ensemble.hpp"
#include "tqa/explainer.hpp"
#include "tqa/llm.hpp"
#include "tqa/profiler.hpp"
#include "tqa/runner.hpp"
#include "tqa/scorer.hpp"
#include "tqa/selector.hpp"
#include "tqa/table.hpp"

namespace tqa::pipeline {

struct PipelineConfig {
  LoadOptions load;
  profiler::ProfileOptions profile;
  selector::SelectorConfig selector;
  /// When false only pruning is applied before the explainer.
  bool select_columns = true;
  fuzzy::FuzzyConfig fuzzy;
  int explainer_attempts = 5;
  runner::SolveOptions solve;
  bool use_interpreter = false;
  ensemble::EnsembleConfig ensemble;
  answer::CompareOptions compare;
  /// Questions processed at once within a stage.
  int concurrency = 4;
};

void validate(const PipelineConfig& cfg);

/// Per-run trace layout:
///   <root>/_tables/<table_id>/profiles.json
///   <root>/<qid>/rep<k>/{selection.json, explainer_prompt_<n>.txt,
///     explainer_reply_<n>.txt, instructions.json, coder_prompt_<n>.txt,
///     plan_<n>.dsl, run_trace.json, answer.json}
///   <root>/<qid>/votes.json
class TraceWriter {
 public:
  explicit TraceWriter(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path question_dir(const std::string& question_id) const;
  std::filesystem::path run_dir(const std::string& question_id, int repetition) const;
  std::filesystem::path table_dir(const std::string& table_id) const;

  static void write_text(const std::filesystem::path& file, const std::string& content);
  static void write_json(const std::filesystem::path& file, const nlohmann::json& j);

 private:
  std::filesystem::path root_;
};

/// Path-safe rendering of an identifier.
std::string safe_component(const std::string& id);

struct TableContext {
  std::string table_id;
  std::filesystem::path path;
  std::string fingerprint;
  std::shared_ptr<const Table> table;
  std::vector<profiler::ColumnProfile> profiles;
};

struct RunResult {
  std::string question_id;
  int repetition = 0;
  std::optional<answer::Answer> answer;
  /// Empty on success; otherwise "profile", "select", "explain", "solve" or
  /// "format".
  std::string failed_stage;
  std::string error;
  selector::PruneResult pruned;
  selector::Selection selection;
  explainer::Explanation explanation;
  explainer::InstructionSet instructions;
  runner::RunTrace trace;

  bool ok() const { return failed_stage.empty(); }
};

nlohmann::json to_json(const RunResult& r);

class Pipeline {
 public:
  /// `llm` must outlive the pipeline. It may be null for profiling only.
  Pipeline(PipelineConfig cfg, llm::LlmClient* llm,
           std::optional<std::filesystem::path> cache_dir = std::nullopt,
           std::shared_ptr<TraceWriter> trace = nullptr);

  const PipelineConfig& config() const { return cfg_; }
  const std::shared_ptr<TraceWriter>& trace_writer() const { return trace_; }

  /// Loads and profiles a table. Profiles are memoized per fingerprint and
  /// persisted to the disk cache when one is configured.
  std::shared_ptr<const TableContext> table(const std::string& table_id,
                                            const std::filesystem::path& csv_path);

  /// Runs every question through each stage before starting the next. Tables
  /// resolve to `<tables_dir>/<table_id>.csv`. Failures are recorded per
  /// question.
  std::vector<RunResult> run_batch(const std::vector<Question>& questions,
                                   const std::filesystem::path& tables_dir, int repetition = 0);

  /// `cfg.ensemble.repetitions` independent runs of one question, then a vote.
  ensemble::Vote ensemble_answer(const Question& q, const std::filesystem::path& tables_dir);

  /// Number of profile computations (memo and disk-cache misses).
  std::size_t profiler_runs() const;

 private:
  void write_trace(const RunResult& r) const;

  PipelineConfig cfg_;
  llm::LlmClient* llm_;
  std::optional<profiler::ProfileCache> cache_;
  std::shared_ptr<TraceWriter> trace_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<const TableContext>> by_path_;
  std::map<std::string, std::vector<profiler::ColumnProfile>> by_fingerprint_;
  std::size_t profiler_runs_ = 0;
};

struct BenchResult {
  std::vector<ensemble::QuestionRuns> runs;
  std::vector<ensemble::Vote> votes;
  std::vector<Prediction> predictions;
  scorer::Report report;
};

/// Runs the whole question set `repetitions` times (one batch per
/// repetition), votes per question and scores the winners.
BenchResult bench(Pipeline& p, const std::vector<Question>& questions,
                  const std::filesystem::path& tables_dir, int repetitions);

/// predictions.jsonl, runs.jsonl, report.json and report.txt.
void write_bench_outputs(const BenchResult& r, const std::filesystem::path& out_dir);

/// Reads runs.jsonl from a bench output directory (or the file itself).
std::vector<ensemble::QuestionRuns> load_runs(const std::filesystem::path& path);

}  // namespace tqa::pipeline
