#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "tqa/error.hpp"
#include "tqa/explainer.hpp"

using namespace tqa;
using namespace tqa::explainer;
using nlohmann::json;

namespace {

const std::string kCareful = "Be careful!. The value enero appears in the database with the following format: 'Enero'";
const std::string kMesType =
    "The column 'Mes de realización' is of type 'object' and has the following example values: Enero, Febrero, Marzo";

std::vector<ColumnProfile> survey_profiles() { return profiler::profile_table(fixtures::survey()); }

}  // namespace

TEST(ExplainerPrompt, ContainsQuestionAndColumns) {
  auto ps = survey_profiles();
  std::vector<ColumnProfile> one = {ps[1]};
  auto p = build_explainer_prompt("¿Cuántas en enero?", one);
  EXPECT_NE(p.find("¿Cuántas en enero?"), std::string::npos);
  EXPECT_NE(p.find("Mes de realización"), std::string::npos);
  EXPECT_NE(p.find("Enero, Febrero, Marzo"), std::string::npos);
  EXPECT_EQ(p.find("Provincia"), std::string::npos);

  std::vector<ColumnProfile> many;
  for (int i = 0; i < 30; ++i) {
    ColumnProfile c;
    c.name = "column_" + std::to_string(i);
    many.push_back(c);
  }
  auto big = build_explainer_prompt("q", many);
  for (const auto& c : many) EXPECT_NE(big.find("- " + c.name + " ["), std::string::npos) << c.name;
  EXPECT_THROW(build_explainer_prompt("q", {}), std::invalid_argument);
}

TEST(ParseInstructions, Forms) {
  auto is = parse_instruction_set(
      "Here you go:\n```json\n{\"instructions\": [\"Filter\", \"Count\"], \"columns\": [\"Edad\"], "
      "\"filter_values\": [\"enero\", {\"column\": \"Partido\", \"value\": \"psoe\"}]}\n```");
  EXPECT_EQ(is.instructions, (std::vector<std::string>{"Filter", "Count"}));
  EXPECT_EQ(is.columns, (std::vector<std::string>{"Edad"}));
  ASSERT_EQ(is.filter_values.size(), 2u);
  EXPECT_EQ(is.filter_values[0], (FilterValue{std::nullopt, "enero"}));
  EXPECT_EQ(is.filter_values[1], (FilterValue{"Partido", "psoe"}));

  auto mapped = parse_instruction_set(R"({"instructions": ["x"], "filter_values": {"Mes": "febrero"}})");
  EXPECT_EQ(mapped.filter_values, (std::vector<FilterValue>{{"Mes", "febrero"}}));

  auto numeric = parse_instruction_set(R"({"instructions": ["x"], "filter_values": [3]})");
  EXPECT_EQ(numeric.filter_values[0].value, "3");
}

TEST(ParseInstructions, Rejects) {
  EXPECT_THROW(parse_instruction_set("no object here"), ReplyParseError);
  EXPECT_THROW(parse_instruction_set(R"({"columns": ["a"]})"), ReplyParseError);
  EXPECT_THROW(parse_instruction_set(R"({"instructions": []})"), ReplyParseError);
}

TEST(InstructionJson, RoundTrip) {
  InstructionSet is{{"a", "b"}, {"c"}, {{std::nullopt, "v"}, {"c", "w"}}};
  json j = is;
  EXPECT_EQ(j.get<InstructionSet>(), is);
}

TEST(Clarify, GoldenLines) {
  auto t = fixtures::survey();
  InstructionSet is{{"Filter the survey month to enero", "Count the rows"}, {"Mes de realizacion"}, {{std::nullopt, "enero"}}};
  auto out = clarify(is, t, survey_profiles());
  EXPECT_EQ(out.columns, (std::vector<std::string>{"Mes de realización"}));
  EXPECT_EQ(out.instructions,
            (std::vector<std::string>{"Filter the survey month to enero", "Count the rows", kCareful, kMesType}));
}

TEST(Clarify, OriginalsUntouched) {
  auto t = fixtures::survey();
  InstructionSet is{{"step"}, {"Mes de realizacion"}, {{std::nullopt, "enero"}}};
  const auto copy = is;
  auto out = clarify(is, t, survey_profiles());
  EXPECT_EQ(is, copy);
  ASSERT_GE(out.instructions.size(), is.instructions.size());
  EXPECT_TRUE(std::equal(is.instructions.begin(), is.instructions.end(), out.instructions.begin()));
}

TEST(Clarify, ExactValueAddsNoHint) {
  auto t = fixtures::survey();
  InstructionSet is{{"step"}, {"Mes de realización"}, {{std::nullopt, "Enero"}}};
  auto out = clarify(is, t, survey_profiles());
  EXPECT_EQ(out.instructions, (std::vector<std::string>{"step", kMesType}));
}

TEST(Clarify, UnknownValueAddsNoHint) {
  auto t = fixtures::survey();
  InstructionSet is{{"step"}, {"Mes de realización"}, {{std::nullopt, "diciembre"}}};
  auto out = clarify(is, t, survey_profiles());
  EXPECT_EQ(out.instructions, (std::vector<std::string>{"step", kMesType}));
}

TEST(Clarify, ColumnScopedValue) {
  auto t = fixtures::survey();
  InstructionSet is{{"step"}, {"Partido"}, {{"partido", "psoe"}}};
  auto out = clarify(is, t, survey_profiles());
  ASSERT_EQ(out.instructions.size(), 3u);
  EXPECT_EQ(out.instructions[1], "Be careful!. The value psoe appears in the database with the following format: 'PSOE'");
  EXPECT_EQ(out.instructions[2],
            "The column 'Partido' is of type 'object' and has the following example values: "
            "PP (Partido Popular), PSOE, Vox");
}

TEST(Clarify, NumericColumnsGetNoTypeLine) {
  auto t = fixtures::survey();
  InstructionSet is{{"step"}, {"Puntuación", "Edad"}, {}};
  auto out = clarify(is, t, survey_profiles());
  EXPECT_EQ(out.instructions,
            (std::vector<std::string>{
                "step", "The column 'Edad' is of type 'mixed' and has the following example values: +65, 18-24, 25-34"}));
}

TEST(Clarify, DuplicateHintsCollapse) {
  auto t = fixtures::survey();
  InstructionSet is{{"step"}, {"Mes de realización", "Mes de realizacion"}, {{std::nullopt, "enero"}, {std::nullopt, "enero"}}};
  auto out = clarify(is, t, survey_profiles());
  EXPECT_EQ(out.instructions, (std::vector<std::string>{"step", kCareful, kMesType}));
}

TEST(Explain, RetriesUntilParse) {
  auto m = fixtures::mock(json::array({{{"stage", "explainer"}, {"reply", "I think you should count"}, {"once", true}},
                                       {{"stage", "explainer"}, {"reply", R"({"instructions": ["count"]})"}}}));
  auto ex = explain("q", survey_profiles(), *m.client);
  EXPECT_EQ(ex.instructions.instructions, (std::vector<std::string>{"count"}));
  EXPECT_EQ(ex.replies.size(), 2u);
  EXPECT_EQ(ex.prompts.size(), 2u);
  const auto calls = m.backend->calls();
  ASSERT_EQ(calls.size(), 2u);
  EXPECT_EQ(calls[1].messages.size(), 4u);
  EXPECT_EQ(calls[1].messages[2].content, "I think you should count");
}

TEST(Explain, GivesUpAfterMaxAttempts) {
  auto m = fixtures::mock(json::array({{{"stage", "explainer"}, {"reply", "nope"}}}));
  EXPECT_THROW(explain("q", survey_profiles(), *m.client, 3), ReplyParseError);
  EXPECT_EQ(m.backend->call_count(llm::Stage::Explainer), 3u);
}

TEST(Explain, TransportErrorsPropagate) {
  auto m = fixtures::mock(json::array());
  EXPECT_THROW(explain("q", survey_profiles(), *m.client), LlmError);
  EXPECT_EQ(m.backend->call_count(llm::Stage::Explainer), 1u);
}
