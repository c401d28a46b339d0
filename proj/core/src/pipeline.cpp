#include "tqa/pipeline.hpp"

#include <atomic>
#include <cctype>
#include <fstream>
#include <set>
#include <thread>

#include "tqa/error.hpp"
#include "tqa/text.hpp"

namespace tqa::pipeline {

namespace fs = std::filesystem;

namespace {

template <typename F>
void parallel_for(std::size_t n, int limit, F&& fn) {
  const auto workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, limit)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

// Runs `body` and records the failure on `r` under `stage`.
template <typename F>
void guarded(RunResult& r, const char* stage, F&& body) {
  if (!r.ok()) return;
  try {
    body();
  } catch (const std::exception& e) {
    r.failed_stage = stage;
    r.error = e.what();
  }
}

}  // namespace

void validate(const PipelineConfig& cfg) {
  selector::validate(cfg.selector);
  fuzzy::validate(cfg.fuzzy);
  if (cfg.explainer_attempts < 1) throw ConfigError("explainer attempts must be >= 1");
  if (cfg.solve.max_attempts < 1) throw ConfigError("coder max_attempts must be >= 1");
  if (cfg.ensemble.repetitions < 1) throw ConfigError("ensemble repetitions must be >= 1");
  if (cfg.concurrency < 1) throw ConfigError("concurrency must be >= 1");
  if (cfg.profile.batch_size < 1) throw ConfigError("profiler batch_size must be >= 1");
}

std::string safe_component(const std::string& id) {
  std::string out;
  for (unsigned char c : id) {
    out += (std::isalnum(c) != 0 || c == '-' || c == '_' || c == '.') ? static_cast<char>(c) : '_';
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

TraceWriter::TraceWriter(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

fs::path TraceWriter::question_dir(const std::string& question_id) const {
  return root_ / safe_component(question_id);
}

fs::path TraceWriter::run_dir(const std::string& question_id, int repetition) const {
  return question_dir(question_id) / ("rep" + std::to_string(repetition));
}

fs::path TraceWriter::table_dir(const std::string& table_id) const {
  return root_ / "_tables" / safe_component(table_id);
}

void TraceWriter::write_text(const fs::path& file, const std::string& content) {
  fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write '" + file.string() + "'");
  out << content;
}

void TraceWriter::write_json(const fs::path& file, const nlohmann::json& j) {
  write_text(file, j.dump(2) + "\n");
}

nlohmann::json to_json(const RunResult& r) {
  return {{"question_id", r.question_id},
          {"repetition", r.repetition},
          {"answer", r.answer ? answer::to_json(*r.answer) : nlohmann::json()},
          {"failed_stage", r.failed_stage.empty() ? nlohmann::json() : nlohmann::json(r.failed_stage)},
          {"error", r.error}};
}

Pipeline::Pipeline(PipelineConfig cfg, llm::LlmClient* llm, std::optional<fs::path> cache_dir,
                   std::shared_ptr<TraceWriter> trace)
    : cfg_(std::move(cfg)), llm_(llm), trace_(std::move(trace)) {
  validate(cfg_);
  cfg_.solve.fns.fuzzy = cfg_.fuzzy;
  if (cache_dir) cache_.emplace(*cache_dir);
}

std::size_t Pipeline::profiler_runs() const {
  std::lock_guard lock(mu_);
  return profiler_runs_;
}

std::shared_ptr<const TableContext> Pipeline::table(const std::string& table_id, const fs::path& csv_path) {
  const auto key = fs::weakly_canonical(csv_path).string();
  {
    std::lock_guard lock(mu_);
    if (auto it = by_path_.find(key); it != by_path_.end()) return it->second;
  }
  auto ctx = std::make_shared<TableContext>();
  ctx->table_id = table_id;
  ctx->path = csv_path;
  ctx->table = std::make_shared<const Table>(load_csv(csv_path, cfg_.load));
  ctx->fingerprint = profiler::fingerprint_file(csv_path);

  std::optional<std::vector<profiler::ColumnProfile>> profiles;
  {
    std::lock_guard lock(mu_);
    if (auto it = by_fingerprint_.find(ctx->fingerprint); it != by_fingerprint_.end()) profiles = it->second;
  }
  if (!profiles && cache_) profiles = cache_->get(ctx->fingerprint);
  if (!profiles) {
    profiles = profiler::describe_columns(profiler::profile_table(*ctx->table, cfg_.profile), *ctx->table,
                                          llm_, cfg_.profile);
    if (cache_) cache_->put(ctx->fingerprint, *profiles);
    std::lock_guard lock(mu_);
    ++profiler_runs_;
  }
  ctx->profiles = std::move(*profiles);
  if (trace_) {
    auto arr = nlohmann::json::array();
    for (const auto& p : ctx->profiles) arr.push_back(p);
    TraceWriter::write_json(trace_->table_dir(table_id) / "profiles.json",
                            {{"fingerprint", ctx->fingerprint}, {"profiles", arr}});
  }

  std::lock_guard lock(mu_);
  by_fingerprint_.emplace(ctx->fingerprint, ctx->profiles);
  return by_path_.emplace(key, std::move(ctx)).first->second;
}

std::vector<RunResult> Pipeline::run_batch(const std::vector<Question>& questions, const fs::path& tables_dir,
                                           int repetition) {
  const auto n = questions.size();
  std::vector<RunResult> results(n);
  std::vector<std::shared_ptr<const TableContext>> ctx(n);
  for (std::size_t i = 0; i < n; ++i) {
    results[i].question_id = questions[i].id;
    results[i].repetition = repetition;
  }
  if (n == 0) return results;
  if (llm_ == nullptr) throw Error("pipeline has no LLM client");

  // Profile: once per distinct table, in question order.
  {
    std::map<std::string, std::shared_ptr<const TableContext>> loaded;
    std::map<std::string, std::string> load_errors;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& id = questions[i].table_id;
      if (!loaded.count(id) && !load_errors.count(id)) {
        try {
          loaded[id] = table(id, tables_dir / (id + ".csv"));
        } catch (const std::exception& e) {
          load_errors[id] = e.what();
        }
      }
      if (auto it = loaded.find(id); it != loaded.end()) {
        ctx[i] = it->second;
      } else {
        results[i].failed_stage = "profile";
        results[i].error = load_errors[id];
      }
    }
  }

  // Prune + select.
  parallel_for(n, cfg_.concurrency, [&](std::size_t i) {
    auto& r = results[i];
    guarded(r, "select", [&] {
      r.pruned = selector::prune_uninformative(ctx[i]->profiles, cfg_.selector);
      if (r.pruned.kept.empty()) {
        r.selection.warnings.push_back("pruning removed every column; keeping all");
        r.pruned.kept = ctx[i]->profiles;
      }
      if (cfg_.select_columns) {
        auto warnings = std::move(r.selection.warnings);
        r.selection = selector::select_columns(questions[i].text, r.pruned.kept, *llm_, cfg_.selector);
        r.selection.warnings.insert(r.selection.warnings.begin(), warnings.begin(), warnings.end());
      } else {
        r.selection.columns = r.pruned.kept;
      }
    });
  });

  // Explain + clarify.
  parallel_for(n, cfg_.concurrency, [&](std::size_t i) {
    auto& r = results[i];
    guarded(r, "explain", [&] {
      r.explanation = explainer::explain(questions[i].text, r.selection.columns, *llm_, cfg_.explainer_attempts);
      r.instructions = explainer::clarify(r.explanation.instructions, *ctx[i]->table, ctx[i]->profiles, cfg_.fuzzy);
    });
  });

  // Solve.
  parallel_for(n, cfg_.concurrency, [&](std::size_t i) {
    auto& r = results[i];
    guarded(r, "solve", [&] {
      r.trace = runner::solve(r.instructions, *ctx[i]->table, r.selection.columns, *llm_, cfg_.solve,
                              questions[i].text);
      if (!r.trace.succeeded()) {
        const auto& last = r.trace.attempts.back();
        throw Error("no plan succeeded after " + std::to_string(r.trace.attempts_used) + " attempt(s); last " +
                    last.error_stage + " error: " + last.error_message);
      }
    });
  });

  // Format or interpret.
  parallel_for(n, cfg_.concurrency, [&](std::size_t i) {
    auto& r = results[i];
    guarded(r, "format", [&] {
      const auto& v = *r.trace.final_value;
      r.answer = cfg_.use_interpreter ? answer::interpret_answer(questions[i].text, v, questions[i].type, *llm_)
                                      : answer::format_answer(v, questions[i].type);
    });
    if (trace_) write_trace(r);
  });
  return results;
}

void Pipeline::write_trace(const RunResult& r) const {
  const auto dir = trace_->run_dir(r.question_id, r.repetition);
  fs::create_directories(dir);

  auto chunks = nlohmann::json::array();
  for (const auto& c : r.selection.chunks) {
    chunks.push_back({{"prompts", c.prompts},
                      {"replies", c.replies},
                      {"chosen", c.chosen},
                      {"kept_whole_chunk", c.kept_whole_chunk}});
  }
  std::vector<std::string> kept;
  for (const auto& p : r.pruned.kept) kept.push_back(p.name);
  std::vector<std::string> selected;
  for (const auto& p : r.selection.columns) selected.push_back(p.name);
  TraceWriter::write_json(dir / "selection.json", {{"pruned_kept", kept},
                                                   {"pruned_dropped", r.pruned.dropped},
                                                   {"selected", selected},
                                                   {"warnings", r.selection.warnings},
                                                   {"chunks", chunks}});

  for (std::size_t k = 0; k < r.explanation.prompts.size(); ++k) {
    TraceWriter::write_text(dir / ("explainer_prompt_" + std::to_string(k + 1) + ".txt"), r.explanation.prompts[k]);
  }
  for (std::size_t k = 0; k < r.explanation.replies.size(); ++k) {
    TraceWriter::write_text(dir / ("explainer_reply_" + std::to_string(k + 1) + ".txt"), r.explanation.replies[k]);
  }
  if (!r.explanation.instructions.instructions.empty()) {
    TraceWriter::write_json(dir / "instructions.json",
                            {{"explainer", r.explanation.instructions}, {"clarified", r.instructions}});
  }

  for (std::size_t k = 0; k < r.trace.attempts.size(); ++k) {
    const auto& a = r.trace.attempts[k];
    const auto n = std::to_string(k + 1);
    TraceWriter::write_text(dir / ("coder_prompt_" + n + ".txt"), a.prompt);
    TraceWriter::write_text(dir / ("plan_" + n + ".dsl"), a.plan_text);
  }
  if (!r.trace.attempts.empty()) TraceWriter::write_json(dir / "run_trace.json", runner::to_json(r.trace));

  TraceWriter::write_json(dir / "answer.json", to_json(r));
}

ensemble::Vote Pipeline::ensemble_answer(const Question& q, const fs::path& tables_dir) {
  std::vector<std::optional<answer::Answer>> runs;
  for (int rep = 0; rep < cfg_.ensemble.repetitions; ++rep) {
    auto r = run_batch({q}, tables_dir, rep);
    runs.push_back(r.front().answer);
  }
  auto v = ensemble::vote(runs, cfg_.ensemble);
  if (trace_) TraceWriter::write_json(trace_->question_dir(q.id) / "votes.json", ensemble::to_json(v));
  return v;
}

BenchResult bench(Pipeline& p, const std::vector<Question>& questions, const fs::path& tables_dir,
                  int repetitions) {
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  BenchResult out;
  out.runs.resize(questions.size());
  for (std::size_t i = 0; i < questions.size(); ++i) {
    out.runs[i].id = questions[i].id;
    out.runs[i].type = questions[i].type;
    out.runs[i].gold = questions[i].gold;
  }
  for (int rep = 0; rep < repetitions; ++rep) {
    auto batch = p.run_batch(questions, tables_dir, rep);
    for (std::size_t i = 0; i < batch.size(); ++i) out.runs[i].repetitions.push_back(batch[i].answer);
  }
  std::vector<scorer::Scored> scored;
  for (std::size_t i = 0; i < questions.size(); ++i) {
    auto v = ensemble::vote(out.runs[i].repetitions, p.config().ensemble);
    out.predictions.push_back({questions[i].id, v.winner});
    scored.push_back({questions[i], v.winner});
    if (const auto& tw = p.trace_writer()) {
      TraceWriter::write_json(tw->question_dir(questions[i].id) / "votes.json", ensemble::to_json(v));
    }
    out.votes.push_back(std::move(v));
  }
  out.report = scorer::score(scored, p.config().compare);
  return out;
}

void write_bench_outputs(const BenchResult& r, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  write_predictions(r.predictions, out_dir / "predictions.jsonl");
  std::ofstream runs(out_dir / "runs.jsonl");
  if (!runs) throw Error("cannot write '" + (out_dir / "runs.jsonl").string() + "'");
  for (const auto& q : r.runs) runs << ensemble::to_json(q).dump() << "\n";
  TraceWriter::write_json(out_dir / "report.json", scorer::to_json(r.report));
  TraceWriter::write_text(out_dir / "report.txt", scorer::render_table(r.report));
}

std::vector<ensemble::QuestionRuns> load_runs(const fs::path& path) {
  const auto file = fs::is_directory(path) ? path / "runs.jsonl" : path;
  std::ifstream in(file);
  if (!in) throw Error("cannot read '" + file.string() + "'");
  std::vector<ensemble::QuestionRuns> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim_view(line).empty()) continue;
    try {
      out.push_back(ensemble::question_runs_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw Error(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace tqa::pipeline
