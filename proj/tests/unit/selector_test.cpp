#include <gtest/gtest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "gen.hpp"
#include "tqa/error.hpp"
#include "tqa/selector.hpp"

using namespace tqa;
using namespace tqa::selector;
using nlohmann::json;

namespace {

ColumnProfile prof(const std::string& name) {
  ColumnProfile p;
  p.name = name;
  p.description = "about " + name;
  return p;
}

std::vector<ColumnProfile> profs(const std::vector<std::string>& names) {
  std::vector<ColumnProfile> out;
  for (const auto& n : names) out.push_back(prof(n));
  return out;
}

std::vector<std::string> names_of(const std::vector<ColumnProfile>& ps) {
  std::vector<std::string> out;
  for (const auto& p : ps) out.push_back(p.name);
  return out;
}

}  // namespace

TEST(Prune, DenylistAndSuffixFamily) {
  auto r = prune_uninformative(profs({"Edad", "N_R_1", "Ns_Nc_0", "Ns_Nc_1", "Ns_Nc_2", "Ns_Nc_3",
                                      "Ns_Nc_4", "Ns_Nc_5", "A_1", "A_2"}));
  EXPECT_EQ(names_of(r.kept), (std::vector<std::string>{"Edad", "A_1", "A_2"}));
  EXPECT_EQ(r.dropped, (std::vector<std::string>{"N_R_1", "Ns_Nc_0", "Ns_Nc_1", "Ns_Nc_2", "Ns_Nc_3",
                                                 "Ns_Nc_4", "Ns_Nc_5"}));
}

TEST(Prune, FamilyThreshold) {
  auto four = profs({"X_1", "X_2", "X_3", "X_4"});
  EXPECT_EQ(prune_uninformative(four).kept.size(), 4u);
  SelectorConfig cfg;
  cfg.suffix_family_min = 4;
  EXPECT_TRUE(prune_uninformative(four, cfg).kept.empty());
}

TEST(Prune, SurveyFixture) {
  auto t = fixtures::survey();
  auto r = prune_uninformative(profiler::profile_table(t));
  EXPECT_EQ(names_of(r.kept),
            (std::vector<std::string>{"id", "Mes de realización", "Edad", "Partido", "Puntuación", "Provincia"}));
  EXPECT_EQ(r.dropped.size(), 6u);
}

TEST(Prune, PartitionsInputInOrder) {
  gen::Rng rng(41);
  const std::vector<std::string> pool = {"N_R_", "Ns_Nc_", "A_", "Edad", "X", "N_R", "B_1"};
  for (int i = 0; i < 300; ++i) {
    std::vector<std::string> names;
    const auto n = gen::uniform(rng, 0, 15);
    for (int k = 0; k < n; ++k) {
      auto name = pool[static_cast<std::size_t>(gen::uniform(rng, 0, static_cast<int>(pool.size()) - 1))];
      if (name.back() == '_') name += std::to_string(k);
      names.push_back(name);
    }
    auto r = prune_uninformative(profs(names));
    EXPECT_EQ(r.kept.size() + r.dropped.size(), names.size());
    auto kept = names_of(r.kept);
    std::size_t ki = 0, di = 0;
    for (const auto& name : names) {
      if (ki < kept.size() && kept[ki] == name) {
        ++ki;
      } else {
        ASSERT_LT(di, r.dropped.size());
        EXPECT_EQ(r.dropped[di++], name);
      }
    }
  }
}

TEST(Prune, InvalidConfig) {
  SelectorConfig cfg;
  cfg.denylist_patterns = {"(["};
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = {};
  cfg.chunk_size = 0;
  EXPECT_THROW(validate(cfg), ConfigError);
}

TEST(ParseSelection, Forms) {
  EXPECT_EQ(parse_selection_reply(R"(["a", "b"])"), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(parse_selection_reply("Sure:\n```json\n[\"a\"]\n```"), (std::vector<std::string>{"a"}));
  EXPECT_TRUE(parse_selection_reply("[]").empty());
  EXPECT_THROW(parse_selection_reply("not json"), ReplyParseError);
}

TEST(Select, ChunksSixtyColumns) {
  std::vector<std::string> names;
  for (int i = 0; i < 60; ++i) names.push_back("col" + std::to_string(i));
  auto m = fixtures::mock(json::array({{{"stage", "selector"}, {"match", "- col59:"}, {"reply", R"(["col59"])"}},
                                       {{"stage", "selector"}, {"match", "- col0:"}, {"reply", R"(["col0", "col3"])"}},
                                       {{"stage", "selector"}, {"match", ""}, {"reply", "[]"}}}));
  auto s = select_columns("q", profs(names), *m.client);
  EXPECT_EQ(m.backend->call_count(llm::Stage::Selector), 3u);
  ASSERT_EQ(s.chunks.size(), 3u);
  const auto calls = m.backend->calls();
  auto count_cols = [](const llm::ChatRequest& r) {
    const auto& u = r.messages.back().content;
    std::size_t n = 0;
    for (std::size_t pos = u.find("- col"); pos != std::string::npos; pos = u.find("- col", pos + 1)) ++n;
    return n;
  };
  EXPECT_EQ(count_cols(calls[0]), 25u);
  EXPECT_EQ(count_cols(calls[1]), 25u);
  EXPECT_EQ(count_cols(calls[2]), 10u);
  EXPECT_EQ(names_of(s.columns), (std::vector<std::string>{"col0", "col3", "col59"}));
  EXPECT_TRUE(s.warnings.empty());
}

TEST(Select, CorrectsNamesAgainstChunk) {
  auto m = fixtures::mock(json::array({{{"stage", "selector"}, {"reply", R"(["Mes de realizacion", "edad"])"}}}));
  auto s = select_columns("q", profs({"id", "Mes de realización", "Edad"}), *m.client);
  EXPECT_EQ(names_of(s.columns), (std::vector<std::string>{"Mes de realización", "Edad"}));
}

TEST(Select, RetriesThenKeepsWholeChunk) {
  auto m = fixtures::mock(json::array({{{"stage", "selector"}, {"reply", "not json"}}}));
  auto s = select_columns("q", profs({"a", "b"}), *m.client);
  EXPECT_EQ(m.backend->call_count(llm::Stage::Selector), 3u);
  EXPECT_EQ(names_of(s.columns), (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(s.chunks.size(), 1u);
  EXPECT_TRUE(s.chunks[0].kept_whole_chunk);
  EXPECT_EQ(s.warnings.size(), 1u);
}

TEST(Select, RecoversOnRetry) {
  auto m = fixtures::mock(json::array({{{"stage", "selector"}, {"reply", "not json"}, {"once", true}},
                                       {{"stage", "selector"}, {"reply", R"(["b"])"}}}));
  SelectorConfig cfg;
  cfg.max_parse_retries = 1;
  auto s = select_columns("q", profs({"a", "b"}), *m.client, cfg);
  EXPECT_EQ(names_of(s.columns), (std::vector<std::string>{"b"}));
  EXPECT_EQ(s.chunks[0].prompts.size(), 2u);
  EXPECT_EQ(s.chunks[0].replies.size(), 2u);
}

TEST(Select, EmptyUnionKeepsAll) {
  auto m = fixtures::mock(json::array({{{"stage", "selector"}, {"reply", "[]"}}}));
  auto s = select_columns("q", profs({"a", "b", "c"}), *m.client);
  EXPECT_EQ(names_of(s.columns), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(s.warnings.size(), 1u);
}

TEST(Select, TransportFailureKeepsAll) {
  auto m = fixtures::mock(json::array());
  auto s = select_columns("q", profs({"a", "b"}), *m.client);
  EXPECT_EQ(names_of(s.columns), (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(s.warnings.size(), 1u);
  EXPECT_NE(s.warnings[0].find("unscripted"), std::string::npos);
}

TEST(Select, NoColumnsNoCalls) {
  auto m = fixtures::mock(json::array());
  auto s = select_columns("q", {}, *m.client);
  EXPECT_TRUE(s.columns.empty());
  EXPECT_EQ(m.backend->call_count(llm::Stage::Selector), 0u);
}

TEST(Select, OrderedSubsetForRandomReplies) {
  gen::Rng rng(42);
  for (int i = 0; i < 100; ++i) {
    std::vector<std::string> names;
    const int n = gen::uniform(rng, 1, 40);
    for (int k = 0; k < n; ++k) names.push_back("c" + std::to_string(k));
    json pick = json::array();
    for (int k = 0; k < n; ++k) {
      if (gen::uniform(rng, 0, 3) == 0) pick.push_back("c" + std::to_string(k));
    }
    pick.push_back("unrelated");
    auto m = fixtures::mock(json::array({{{"stage", "selector"}, {"reply", pick.dump()}}}));
    SelectorConfig cfg;
    cfg.chunk_size = static_cast<std::size_t>(gen::uniform(rng, 1, 30));
    auto s = select_columns("q", profs(names), *m.client, cfg);
    auto got = names_of(s.columns);
    EXPECT_FALSE(got.empty());
    std::size_t pos = 0;
    for (const auto& g : got) {
      while (pos < names.size() && names[pos] != g) ++pos;
      ASSERT_LT(pos, names.size()) << g;
    }
    EXPECT_EQ(m.backend->call_count(llm::Stage::Selector), (names.size() + cfg.chunk_size - 1) / cfg.chunk_size);
  }
}

TEST(Select, PromptListsEveryColumn) {
  auto ps = profs({"alpha", "beta"});
  const auto p = build_selector_prompt("how many?", ps);
  EXPECT_NE(p.find("how many?"), std::string::npos);
  EXPECT_NE(p.find("- alpha: about alpha"), std::string::npos);
  EXPECT_NE(p.find("- beta: about beta"), std::string::npos);
}
