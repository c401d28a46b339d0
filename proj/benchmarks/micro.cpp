#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "tqa/fuzzy.hpp"
#include "tqa/planlang.hpp"
#include "tqa/table.hpp"
#include "tqa/tablefns.hpp"

namespace {

std::string word(std::mt19937_64& rng, std::size_t len) {
  static const std::string alphabet = "abcdefghijklmnopqrstuvwxyz áéíóñ";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string s;
  while (s.size() < len) {
    const char ch = alphabet[pick(rng)];
    if (static_cast<unsigned char>(ch) < 0x80) s += ch;
  }
  return s;
}

std::string survey_csv(std::size_t rows) {
  std::mt19937_64 rng(7);
  const char* months[] = {"Enero", "Febrero", "Marzo", "Abril"};
  const char* parties[] = {"PP (Partido Popular)", "PSOE", "Vox", "Sumar", ""};
  std::string csv = "id,Mes de realización,Partido,Puntuación\n";
  for (std::size_t i = 0; i < rows; ++i) {
    csv += std::to_string(i) + "," + months[rng() % 4] + ",\"" + parties[rng() % 5] + "\"," +
           std::to_string(rng() % 10 + 1) + "\n";
  }
  return csv;
}

void BM_Similarity(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto len = static_cast<std::size_t>(state.range(0));
  const auto a = word(rng, len);
  const auto b = word(rng, len);
  for (auto _ : state) benchmark::DoNotOptimize(tqa::fuzzy::similarity(a, b));
}
BENCHMARK(BM_Similarity)->Arg(8)->Arg(32)->Arg(128);

void BM_BestFuzzyMatch(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::vector<tqa::Cell> values;
  for (int i = 0; i < state.range(0); ++i) values.emplace_back(word(rng, 12));
  const auto target = word(rng, 12);
  for (auto _ : state) benchmark::DoNotOptimize(tqa::fuzzy::best_fuzzy_match(values, target, 75));
}
BENCHMARK(BM_BestFuzzyMatch)->Arg(10)->Arg(100)->Arg(1000);

void BM_ParseCsv(benchmark::State& state) {
  const auto csv = survey_csv(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(tqa::parse_csv(csv, "survey"));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * csv.size()));
}
BENCHMARK(BM_ParseCsv)->Arg(100)->Arg(10000);

void BM_FilterContains(benchmark::State& state) {
  const auto t = tqa::parse_csv(survey_csv(static_cast<std::size_t>(state.range(0))), "survey");
  // "enero" hits the exact round, "Sumarr" falls through to the fuzzy round.
  const tqa::Cell exact("enero");
  const tqa::Cell fuzzy("Sumarr");
  for (auto _ : state) {
    benchmark::DoNotOptimize(tqa::fns::filter_contains(t, "Mes de realización", exact));
    benchmark::DoNotOptimize(tqa::fns::filter_contains(t, "Partido", fuzzy));
  }
}
BENCHMARK(BM_FilterContains)->Arg(100)->Arg(10000);

void BM_ParsePlan(benchmark::State& state) {
  const std::string src =
      "x = filter_contains(df, \"Mes de realización\", \"Enero\")\n"
      "y = filter_gt(x, \"Puntuación\", 5)\n"
      "top = most_frequent_n(y, \"Partido\", 3)\n"
      "answer = gt(count_rows(y), div(count_rows(df), 2))\n";
  for (auto _ : state) benchmark::DoNotOptimize(tqa::plan::parse_plan(src));
}
BENCHMARK(BM_ParsePlan);

}  // namespace

BENCHMARK_MAIN();
