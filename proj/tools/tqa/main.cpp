#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tqa/config.hpp"
#include "tqa/ensemble.hpp"
#include "tqa/error.hpp"
#include "tqa/pipeline.hpp"
#include "tqa/planlang.hpp"
#include "tqa/profiler.hpp"
#include "tqa/runner.hpp"
#include "tqa/scorer.hpp"

namespace fs = std::filesystem;
using namespace tqa;

namespace {

struct Globals {
  std::string config;
  std::string mock;
  bool deterministic = false;
  bool use_interpreter = false;
  std::string cache_dir;
  std::string trace_dir;
};

struct Env {
  AppConfig cfg;
  std::unique_ptr<llm::LlmClient> llm;
  std::shared_ptr<pipeline::TraceWriter> trace;
};

Env make_env(const Globals& g, bool need_llm) {
  Env env;
  if (!g.config.empty()) env.cfg = load_config(g.config);
  if (g.deterministic || !g.mock.empty()) make_deterministic(env.cfg);
  if (g.use_interpreter) env.cfg.pipeline.use_interpreter = true;
  if (!g.cache_dir.empty()) env.cfg.cache_dir = g.cache_dir;
  if (!g.trace_dir.empty()) env.trace = std::make_shared<pipeline::TraceWriter>(g.trace_dir);

  std::shared_ptr<llm::ChatBackend> backend;
  if (!g.mock.empty()) {
    backend = std::make_shared<llm::MockBackend>(llm::MockScript::load(g.mock));
  } else if (!env.cfg.llm.base_url.empty()) {
    backend = std::make_shared<llm::HttpBackend>(env.cfg.llm);
  } else if (need_llm) {
    throw ConfigError("no LLM endpoint: set base_url in --config or pass --mock");
  }
  if (backend) env.llm = std::make_unique<llm::LlmClient>(backend, env.cfg.llm);
  return env;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_or_print(const std::string& out, const std::string& content) {
  if (out.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Error("cannot write '" + out + "'");
  f << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Table question answering with staged LLM calls and a small plan language"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--mock", g.mock, "Scripted LLM replies (JSON); implies --deterministic")->check(CLI::ExistingFile);
  app.add_flag("--deterministic", g.deterministic, "Temperature 0 and sequential processing");
  app.add_flag("--use-interpreter", g.use_interpreter, "Coerce answers with the LLM interpreter");
  app.add_option("--cache-dir", g.cache_dir, "Directory for cached table profiles");
  app.add_option("--trace-dir", g.trace_dir, "Directory for per-run traces");

  auto* describe = app.add_subcommand("describe", "Profile and describe the columns of a table");
  std::string table_path;
  describe->add_option("table", table_path, "CSV file")->required()->check(CLI::ExistingFile);

  auto* ask = app.add_subcommand("ask", "Answer one question about a table");
  std::string question;
  std::string type_name = "category";
  int ask_reps = 1;
  bool ask_json = false;
  ask->add_option("table", table_path, "CSV file")->required()->check(CLI::ExistingFile);
  ask->add_option("question", question, "Question text")->required();
  ask->add_option("--type", type_name, "boolean, number, category, list[category] or list[number]");
  ask->add_option("--repetitions", ask_reps, "Runs to vote over")->check(CLI::PositiveNumber);
  ask->add_flag("--json", ask_json, "Print the answer as JSON");

  auto* bench = app.add_subcommand("bench", "Run a question set and score it");
  std::string questions_path;
  std::string tables_dir;
  std::optional<int> bench_reps;
  std::string out_dir = "bench-out";
  bench->add_option("questions", questions_path, "Questions JSONL")->required()->check(CLI::ExistingFile);
  bench->add_option("--tables-dir", tables_dir, "Directory of <table_id>.csv")->required()->check(CLI::ExistingDirectory);
  bench->add_option("--repetitions", bench_reps, "Runs per question (default from config)")->check(CLI::PositiveNumber);
  bench->add_option("--out", out_dir, "Output directory");

  auto* plan_run = app.add_subcommand("plan-run", "Validate and execute a plan against a table");
  std::string plan_path;
  std::optional<std::string> plan_type;
  plan_run->add_option("table", table_path, "CSV file")->required()->check(CLI::ExistingFile);
  plan_run->add_option("plan", plan_path, "Plan file")->required()->check(CLI::ExistingFile);
  plan_run->add_option("--type", plan_type, "Also format the result as this answer type");

  auto* curve = app.add_subcommand("ensemble-curve", "Accuracy against ensemble size from a bench run");
  std::string bench_output;
  int max_n = 8;
  std::string curve_out;
  curve->add_option("bench-output", bench_output, "Bench output directory or runs.jsonl")->required()->check(CLI::ExistingPath);
  curve->add_option("--max-n", max_n, "Largest ensemble size")->check(CLI::PositiveNumber);
  curve->add_option("--out", curve_out, "CSV output file (default stdout)");

  auto* dsl = app.add_subcommand("dsl-reference", "Print the plan language reference");

  auto* score = app.add_subcommand("score", "Score a predictions file");
  std::string predictions_path;
  bool score_json = false;
  score->add_option("questions", questions_path, "Questions JSONL")->required()->check(CLI::ExistingFile);
  score->add_option("predictions", predictions_path, "Predictions JSONL")->required()->check(CLI::ExistingFile);
  score->add_flag("--json", score_json, "Print the JSON report");

  CLI11_PARSE(app, argc, argv);

  try {
    if (describe->parsed()) {
      auto env = make_env(g, false);
      pipeline::Pipeline p(env.cfg.pipeline, env.llm.get(), env.cfg.cache_dir, env.trace);
      auto ctx = p.table(fs::path(table_path).stem().string(), table_path);
      auto arr = nlohmann::json::array();
      for (const auto& prof : ctx->profiles) arr.push_back(prof);
      std::cout << nlohmann::json{{"table", ctx->table_id}, {"fingerprint", ctx->fingerprint}, {"columns", arr}}.dump(2)
                << "\n";
    } else if (ask->parsed()) {
      auto env = make_env(g, true);
      env.cfg.pipeline.ensemble.repetitions = ask_reps;
      pipeline::Pipeline p(env.cfg.pipeline, env.llm.get(), env.cfg.cache_dir, env.trace);
      const fs::path path = table_path;
      Question q{"ask", path.stem().string(), question, answer::parse_answer_type(type_name), std::nullopt};
      auto dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();
      auto v = p.ensemble_answer(q, dir);
      if (!v.winner) {
        std::cerr << "no answer: every run failed or was discarded\n";
        return 3;
      }
      std::cout << (ask_json ? answer::to_json(*v.winner).dump() : answer::answer_text(*v.winner)) << "\n";
    } else if (bench->parsed()) {
      auto env = make_env(g, true);
      const int reps = bench_reps.value_or(env.cfg.pipeline.ensemble.repetitions);
      pipeline::Pipeline p(env.cfg.pipeline, env.llm.get(), env.cfg.cache_dir, env.trace);
      auto questions = load_questions(questions_path);
      auto result = pipeline::bench(p, questions, tables_dir, reps);
      pipeline::write_bench_outputs(result, out_dir);
      for (const auto& w : result.report.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << scorer::render_table(result.report);
    } else if (plan_run->parsed()) {
      auto t = load_csv(table_path);
      auto plan = plan::validate_plan(plan::parse_plan(read_file(plan_path)), t.column_names());
      runner::ExecStats stats;
      auto value = runner::execute_plan(plan, t, {}, &stats);
      if (plan_type) {
        auto a = answer::format_answer(value, answer::parse_answer_type(*plan_type));
        std::cout << answer::to_json(a).dump() << "\n";
      } else {
        std::cout << runner::render_value(value) << "\n";
      }
    } else if (curve->parsed()) {
      auto runs = pipeline::load_runs(bench_output);
      AppConfig cfg = g.config.empty() ? AppConfig{} : load_config(g.config);
      std::vector<std::string> warnings;
      auto points = ensemble::ensemble_curve(runs, max_n, cfg.pipeline.ensemble, cfg.pipeline.compare, &warnings);
      for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
      write_or_print(curve_out, ensemble::curve_csv(points));
    } else if (dsl->parsed()) {
      std::cout << plan::dsl_reference();
    } else if (score->parsed()) {
      AppConfig cfg = g.config.empty() ? AppConfig{} : load_config(g.config);
      auto report = scorer::score(load_questions(questions_path), load_predictions(predictions_path),
                                  cfg.pipeline.compare);
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << (score_json ? scorer::to_json(report).dump(2) + "\n" : scorer::render_table(report));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
