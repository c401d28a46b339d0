#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "gen.hpp"
#include "tqa/answer.hpp"
#include "tqa/error.hpp"

using namespace tqa;
using namespace tqa::answer;
using nlohmann::json;

namespace {

Answer cat(std::string s) { return {AnswerType::Category, std::move(s)}; }
Answer num(double x) { return {AnswerType::Number, x}; }
Answer boolean(bool b) { return {AnswerType::Boolean, b}; }

}  // namespace

TEST(AnswerType, Names) {
  for (auto t : kAllTypes) EXPECT_EQ(parse_answer_type(to_string(t)), t);
  EXPECT_EQ(to_string(AnswerType::ListCategory), "list[category]");
  EXPECT_EQ(display_name(AnswerType::ListNumber), "List[Number]");
  EXPECT_EQ(parse_answer_type("List_Number"), AnswerType::ListNumber);
  EXPECT_EQ(parse_answer_type("BOOLEAN"), AnswerType::Boolean);
  EXPECT_THROW(parse_answer_type("date"), FormatError);
}

TEST(Format, CategoryIsByteIdentical) {
  for (const char* s : {"+65", "18-24", "PP (Partido Popular)", " padded ", "Sí"}) {
    EXPECT_EQ(format_answer(Cell(s), AnswerType::Category), cat(s)) << s;
  }
  gen::Rng rng(71);
  for (int i = 0; i < 300; ++i) {
    const auto s = gen::random_text(rng, 16);
    if (s.empty()) continue;
    EXPECT_EQ(std::get<std::string>(format_answer(Cell(s), AnswerType::Category).value), s);
  }
}

TEST(Format, Scalars) {
  EXPECT_EQ(format_answer(Cell("sí"), AnswerType::Boolean), boolean(true));
  EXPECT_EQ(format_answer(Cell("No"), AnswerType::Boolean), boolean(false));
  EXPECT_EQ(format_answer(Cell(true), AnswerType::Boolean), boolean(true));
  EXPECT_EQ(format_answer(Cell(0), AnswerType::Boolean), boolean(false));
  EXPECT_EQ(format_answer(Cell(2), AnswerType::Number), num(2));
  EXPECT_EQ(format_answer(Cell("10 - Le votaría siempre"), AnswerType::Number), num(10));
  EXPECT_EQ(format_answer(std::vector<Cell>{Cell(4)}, AnswerType::Number), num(4));
  EXPECT_THROW(format_answer(Cell("maybe"), AnswerType::Boolean), FormatError);
  EXPECT_THROW(format_answer(Cell("none"), AnswerType::Number), FormatError);
  EXPECT_THROW(format_answer(std::vector<Cell>{Cell(1), Cell(2)}, AnswerType::Number), FormatError);
}

TEST(Format, Lists) {
  const std::vector<Cell> cells = {Cell("PSOE"), Cell(), Cell("Vox")};
  EXPECT_EQ(format_answer(cells, AnswerType::ListCategory),
            (Answer{AnswerType::ListCategory, std::vector<std::string>{"PSOE", "Vox"}}));
  EXPECT_EQ(format_answer(std::vector<Cell>{Cell(10), Cell("9"), Cell(8.5)}, AnswerType::ListNumber),
            (Answer{AnswerType::ListNumber, std::vector<double>{10, 9, 8.5}}));
  auto t = parse_csv("Partido\nPSOE\nVox\n", "t");
  EXPECT_EQ(format_answer(t, AnswerType::ListCategory),
            (Answer{AnswerType::ListCategory, std::vector<std::string>{"PSOE", "Vox"}}));
  EXPECT_EQ(format_answer(Cell("x"), AnswerType::ListCategory),
            (Answer{AnswerType::ListCategory, std::vector<std::string>{"x"}}));
}

TEST(AnswerJson, RoundTrip) {
  const std::vector<Answer> answers = {boolean(true), num(3), num(2.5), cat("+65"),
                                       {AnswerType::ListCategory, std::vector<std::string>{"a", "b"}},
                                       {AnswerType::ListNumber, std::vector<double>{10, 9}}};
  for (const auto& a : answers) EXPECT_EQ(answer_from_json(to_json(a)), a);
  EXPECT_EQ(to_json(num(3)).dump(), R"({"type":"number","value":3})");
  EXPECT_EQ(canonical(num(3)), R"({"type":"number","value":3})");
  EXPECT_EQ(answer_text(answers[4]), "a, b");
  EXPECT_THROW(answer_from_json(json{{"type", "number"}, {"value", "x"}}), FormatError);
}

TEST(CoerceJson, Forms) {
  EXPECT_EQ(coerce_json(json(true), AnswerType::Boolean), boolean(true));
  EXPECT_EQ(coerce_json(json{{"answer", 3}}, AnswerType::Number), num(3));
  EXPECT_EQ(coerce_json(json::array({"PSOE"}), AnswerType::Category), cat("PSOE"));
  EXPECT_THROW(coerce_json(json::array({json::array()}), AnswerType::ListCategory), FormatError);
}

TEST(Interpret, UsesScriptedReply) {
  auto m = fixtures::mock(json::array({{{"stage", "interpreter"}, {"match", "Which?"}, {"reply", "```json\n[\"PSOE\", \"PP\"]\n```"}}}));
  auto a = interpret_answer("Which?", std::vector<Cell>{Cell("PSOE"), Cell("PP"), Cell("Vox")},
                            AnswerType::ListCategory, *m.client);
  EXPECT_EQ(a, (Answer{AnswerType::ListCategory, std::vector<std::string>{"PSOE", "PP"}}));
  const auto prompt = m.backend->calls().front().messages.back().content;
  EXPECT_NE(prompt.find("list[category]"), std::string::npos);
  EXPECT_NE(prompt.find("Vox"), std::string::npos);
}

TEST(Interpret, FallsBackToRules) {
  auto unscripted = fixtures::mock(json::array());
  EXPECT_EQ(interpret_answer("q", Cell(7), AnswerType::Number, *unscripted.client), num(7));
  auto garbage = fixtures::mock(json::array({{{"stage", "interpreter"}, {"reply", "I cannot tell"}}}));
  EXPECT_EQ(interpret_answer("q", Cell("sí"), AnswerType::Boolean, *garbage.client), boolean(true));
  auto wrong = fixtures::mock(json::array({{{"stage", "interpreter"}, {"reply", "\"many\""}}}));
  EXPECT_EQ(interpret_answer("q", Cell(7), AnswerType::Number, *wrong.client), num(7));
}

TEST(Compare, Examples) {
  EXPECT_TRUE(compare_answers(cat(" psoe "), cat("PSOE")));
  EXPECT_FALSE(compare_answers(cat("PSOE"), cat("PP")));
  EXPECT_TRUE(compare_answers(num(0.1 + 0.2), num(0.3)));
  EXPECT_TRUE(compare_answers(num(1000000), num(1000000.5)));
  EXPECT_FALSE(compare_answers(num(1), num(1.001)));
  EXPECT_FALSE(compare_answers(num(1), cat("1")));
  EXPECT_FALSE(compare_answers(boolean(true), boolean(false)));
  const Answer ab{AnswerType::ListCategory, std::vector<std::string>{"a", "b"}};
  const Answer ba{AnswerType::ListCategory, std::vector<std::string>{"B", "a"}};
  EXPECT_TRUE(compare_answers(ab, ba));
  CompareOptions ordered;
  ordered.ordered_lists = true;
  EXPECT_FALSE(compare_answers(ab, ba, ordered));
  const Answer nums{AnswerType::ListNumber, std::vector<double>{10, 9, 8}};
  EXPECT_TRUE(compare_answers(nums, {AnswerType::ListNumber, std::vector<double>{8, 9, 10}}));
  EXPECT_FALSE(compare_answers(nums, {AnswerType::ListNumber, std::vector<double>{10, 9}}));
  EXPECT_FALSE(compare_answers({AnswerType::ListCategory, std::vector<std::string>{"a", "a", "b"}},
                               {AnswerType::ListCategory, std::vector<std::string>{"a", "b", "b"}}));
}

TEST(Compare, ReflexiveAndSymmetric) {
  gen::Rng rng(72);
  auto random_answer = [&]() -> Answer {
    switch (gen::uniform(rng, 0, 4)) {
      case 0: return boolean(gen::uniform(rng, 0, 1) == 1);
      case 1: return num(gen::uniform(rng, -3, 3) * (gen::uniform(rng, 0, 1) ? 1.0 : 1e-7 + 1));
      case 2: return cat(gen::uniform(rng, 0, 1) ? "Vox" : " vox");
      case 3: {
        std::vector<std::string> v;
        for (int i = gen::uniform(rng, 0, 3); i > 0; --i) v.push_back(gen::uniform(rng, 0, 1) ? "a" : "B");
        return {AnswerType::ListCategory, v};
      }
      default: {
        std::vector<double> v;
        for (int i = gen::uniform(rng, 0, 3); i > 0; --i) v.push_back(gen::uniform(rng, 0, 2));
        return {AnswerType::ListNumber, v};
      }
    }
  };
  for (int i = 0; i < 2000; ++i) {
    const auto a = random_answer();
    const auto b = random_answer();
    EXPECT_TRUE(compare_answers(a, a));
    EXPECT_EQ(compare_answers(a, b), compare_answers(b, a));
  }
}
