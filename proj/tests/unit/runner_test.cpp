#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "gen.hpp"
#include "tqa/runner.hpp"

using namespace tqa;
using namespace tqa::runner;
using nlohmann::json;

namespace {

Table small() {
  return parse_csv("Edad,Partido\n+65,PSOE\n18-24,PP\n+65,\n", "small");
}

RuntimeValue run(std::string_view src, const Table& t) {
  return execute_plan(plan::validate_plan(plan::parse_plan(src), t.column_names()), t);
}

const explainer::InstructionSet kInstructions{{"Count the rows"}, {"Edad"}, {}};

json coder(const std::string& reply, bool once) {
  return {{"stage", "coder"}, {"match", ""}, {"reply", reply}, {"once", once}};
}

}  // namespace

TEST(Execute, Examples) {
  const auto t = small();
  EXPECT_EQ(std::get<Cell>(run("answer = count_equal(df, \"Edad\", \"+65\")", t)), Cell(2));
  EXPECT_EQ(std::get<Cell>(run("answer = count_rows(df)", t)), Cell(3));
  EXPECT_EQ(std::get<Cell>(run("x = filter_contains(df, \"Partido\", \"psoe\")\nanswer = count_rows(x)", t)), Cell(1));
  EXPECT_EQ(std::get<std::vector<Cell>>(run("answer = unique(column(df, \"Edad\"))", t)),
            (std::vector<Cell>{Cell("+65"), Cell("18-24")}));
  EXPECT_EQ(std::get<Cell>(run("answer = gt(count_rows(df), 2)", t)), Cell(true));
  const auto table = std::get<Table>(run("answer = filter_ge(df, \"Edad\", 30)", t));
  EXPECT_EQ(table.row_count(), 2u);
}

TEST(Execute, DivisionByZeroNamesTheBuiltin) {
  try {
    run("answer = div(count_rows(df), 0)", small());
    FAIL();
  } catch (const plan::PlanError& e) {
    EXPECT_EQ(e.stage(), plan::Stage::Execute);
    EXPECT_EQ(e.builtin(), "div");
    EXPECT_NE(std::string(e.what()).find("execution error in div"), std::string::npos);
  }
}

TEST(Execute, ExecutesEachCallOnce) {
  gen::Rng rng(61);
  int executed = 0;
  for (int i = 0; i < 300; ++i) {
    const auto t = gen::random_table(rng);
    if (t.column_count() == 0) continue;
    auto p = plan::validate_plan(gen::random_plan(rng, t.column_names()), t.column_names());
    ExecStats stats;
    try {
      execute_plan(p, t, {}, &stats);
      ++executed;
      EXPECT_EQ(stats.calls, plan::call_count(p)) << plan::render_plan(p);
    } catch (const plan::PlanError& e) {
      EXPECT_EQ(e.stage(), plan::Stage::Execute);
      EXPECT_LE(stats.calls, plan::call_count(p));
    }
  }
  EXPECT_GT(executed, 50);
}

TEST(Execute, InputTableUnchanged) {
  const auto t = small();
  const auto copy = t;
  run("x = sort_alphabetical(df, \"Edad\")\ny = delete_rows_by_column_value(x, \"Edad\", \"+65\")\nanswer = count_rows(y)", t);
  EXPECT_EQ(t, copy);
}

TEST(Values, JsonAndRendering) {
  EXPECT_EQ(to_json_value(Cell(3)), json(3));
  EXPECT_EQ(to_json_value(Cell(2.5)), json(2.5));
  EXPECT_TRUE(to_json_value(Cell()).is_null());
  EXPECT_EQ(to_json_value(RuntimeValue(std::vector<Cell>{Cell("a"), Cell(true)})), json::array({"a", true}));
  const auto rendered = render_value(small());
  EXPECT_NE(rendered.find("Edad"), std::string::npos);
  EXPECT_NE(rendered.find("18-24"), std::string::npos);
}

TEST(CoderPrompt, Contents) {
  auto t = fixtures::survey();
  auto profiles = profiler::profile_table(t);
  explainer::InstructionSet is{{"Filter January", "Count"}, {"Mes de realización"}, {}};
  const auto p = build_coder_prompt(is, profiles, plan::dsl_reference(), "¿Cuántas?");
  EXPECT_NE(p.find("¿Cuántas?"), std::string::npos);
  EXPECT_NE(p.find("Filter January"), std::string::npos);
  EXPECT_NE(p.find("Count"), std::string::npos);
  EXPECT_NE(p.find(plan::dsl_reference()), std::string::npos);
  for (const auto& c : profiles) EXPECT_NE(p.find(c.name), std::string::npos) << c.name;
}

TEST(Solve, SucceedsFirstTry) {
  auto m = fixtures::mock(json::array({coder("answer = count_rows(df)", false)}));
  auto trace = solve(kInstructions, small(), profiler::profile_table(small()), *m.client);
  ASSERT_TRUE(trace.succeeded());
  EXPECT_EQ(std::get<Cell>(*trace.final_value), Cell(3));
  EXPECT_EQ(trace.attempts_used, 1u);
  EXPECT_EQ(trace.attempts[0].outcome, Outcome::Executed);
}

TEST(Solve, RetriesAfterEachKindOfFailure) {
  const std::vector<std::pair<std::string, std::string>> failures = {
      {"answer = count_rows(df", "parse"},
      {"answer = count_rowz(df)", "validate"},
      {"answer = div(1, 0)", "execute"},
      {"x = count_rows(df)", "validate"}};
  for (std::size_t k = 0; k <= failures.size(); ++k) {
    json script = json::array();
    for (std::size_t i = 0; i < k; ++i) script.push_back(coder(failures[i].first, true));
    script.push_back(coder("answer = count_rows(df)", false));
    auto m = fixtures::mock(script);
    auto trace = solve(kInstructions, small(), profiler::profile_table(small()), *m.client);
    EXPECT_TRUE(trace.succeeded()) << k;
    EXPECT_EQ(m.backend->call_count(llm::Stage::Coder), k + 1);
    ASSERT_EQ(trace.attempts.size(), k + 1);
    for (std::size_t i = 0; i < k; ++i) {
      EXPECT_EQ(trace.attempts[i].outcome, Outcome::Error);
      EXPECT_EQ(trace.attempts[i].error_stage, failures[i].second);
      EXPECT_NE(trace.attempts[i + 1].prompt.find(failures[i].first), std::string::npos);
      EXPECT_NE(trace.attempts[i + 1].prompt.find(trace.attempts[i].error_message), std::string::npos);
    }
  }
}

TEST(Solve, GivesUpAfterMaxAttempts) {
  auto m = fixtures::mock(json::array({coder("answer = nope(df)", false)}));
  auto trace = solve(kInstructions, small(), profiler::profile_table(small()), *m.client);
  EXPECT_FALSE(trace.succeeded());
  EXPECT_EQ(trace.attempts_used, 5u);
  EXPECT_EQ(m.backend->call_count(llm::Stage::Coder), 5u);
  SolveOptions two;
  two.max_attempts = 2;
  auto m2 = fixtures::mock(json::array({coder("answer = nope(df)", false)}));
  EXPECT_EQ(solve(kInstructions, small(), {}, *m2.client, two).attempts_used, 2u);
}

TEST(Solve, TransportErrorStopsTheLoop) {
  auto m = fixtures::mock(json::array());
  auto trace = solve(kInstructions, small(), {}, *m.client);
  EXPECT_FALSE(trace.succeeded());
  ASSERT_EQ(trace.attempts.size(), 1u);
  EXPECT_EQ(trace.attempts[0].error_stage, "llm");
}

TEST(Solve, Deterministic) {
  const json script = json::array({coder("answer = div(1, 0)", true), coder("answer = count_equal(df, \"edad\", \"+65\")", false)});
  auto go = [&] {
    auto m = fixtures::mock(script);
    return to_json(solve(kInstructions, small(), profiler::profile_table(small()), *m.client)).dump();
  };
  const auto a = go();
  EXPECT_EQ(a, go());
  const auto j = json::parse(a);
  EXPECT_EQ(j["attempts"].size(), 2u);
}
