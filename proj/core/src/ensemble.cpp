#include "tqa/ensemble.hpp"

#include <algorithm>
#include <cstdio>

#include "tqa/error.hpp"
#include "tqa/text.hpp"

namespace tqa::ensemble {

bool is_sentinel(const Answer& a, const EnsembleConfig& cfg) {
  const auto rendered = text::trim(answer::answer_text(a));
  return std::any_of(cfg.sentinel_messages.begin(), cfg.sentinel_messages.end(),
                     [&](const std::string& s) { return text::trim_view(s) == rendered; });
}

Vote vote(const std::vector<std::optional<Answer>>& runs, const EnsembleConfig& cfg) {
  Vote out;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!runs[i] || is_sentinel(*runs[i], cfg)) {
      ++out.discarded;
      continue;
    }
    const auto key = answer::canonical(*runs[i]);
    auto it = std::find_if(out.tallies.begin(), out.tallies.end(),
                           [&](const Tally& t) { return t.key == key; });
    if (it == out.tallies.end()) {
      out.tallies.push_back(Tally{key, *runs[i], 1, i});
    } else {
      ++it->votes;
    }
  }
  // Tallies are already ordered by first repetition, so a stable sort on votes
  // applies the tie-break.
  std::stable_sort(out.tallies.begin(), out.tallies.end(),
                   [](const Tally& a, const Tally& b) { return a.votes > b.votes; });
  if (!out.tallies.empty()) out.winner = out.tallies.front().answer;
  return out;
}

nlohmann::json to_json(const Vote& v) {
  auto tallies = nlohmann::json::array();
  for (const auto& t : v.tallies) {
    tallies.push_back({{"answer", answer::to_json(t.answer)},
                       {"votes", t.votes},
                       {"first_repetition", t.first_repetition}});
  }
  return {{"winner", v.winner ? answer::to_json(*v.winner) : nlohmann::json()},
          {"abstain", !v.winner.has_value()},
          {"discarded", v.discarded},
          {"tallies", std::move(tallies)}};
}

Vote ensemble_answer(const std::function<std::optional<Answer>(int)>& run_once,
                     const EnsembleConfig& cfg) {
  if (cfg.repetitions < 1) throw ConfigError("ensemble repetitions must be >= 1");
  std::vector<std::optional<Answer>> runs;
  runs.reserve(static_cast<std::size_t>(cfg.repetitions));
  for (int r = 0; r < cfg.repetitions; ++r) {
    try {
      runs.push_back(run_once(r));
    } catch (const std::exception&) {
      runs.emplace_back(std::nullopt);
    }
  }
  return vote(runs, cfg);
}

nlohmann::json to_json(const QuestionRuns& r) {
  auto reps = nlohmann::json::array();
  for (const auto& a : r.repetitions) reps.push_back(a ? answer::to_json(*a) : nlohmann::json());
  return {{"id", r.id},
          {"answer_type", answer::to_string(r.type)},
          {"gold", r.gold ? answer::to_json(*r.gold) : nlohmann::json()},
          {"repetitions", std::move(reps)}};
}

QuestionRuns question_runs_from_json(const nlohmann::json& j) {
  QuestionRuns r;
  r.id = j.at("id").get<std::string>();
  r.type = answer::parse_answer_type(j.at("answer_type").get<std::string>());
  if (!j.at("gold").is_null()) r.gold = answer::answer_from_json(j["gold"]);
  for (const auto& a : j.at("repetitions")) {
    r.repetitions.push_back(a.is_null() ? std::nullopt : std::optional<Answer>(answer::answer_from_json(a)));
  }
  return r;
}

std::vector<CurvePoint> ensemble_curve(const std::vector<QuestionRuns>& results, int max_n,
                                       const EnsembleConfig& cfg, const answer::CompareOptions& cmp,
                                       std::vector<std::string>* warnings) {
  std::size_t stored = 0;
  for (const auto& r : results) stored = std::max(stored, r.repetitions.size());
  int limit = max_n;
  if (limit > static_cast<int>(stored)) {
    if (warnings != nullptr) {
      warnings->push_back("requested " + std::to_string(max_n) + " repetitions but only " +
                          std::to_string(stored) + " are stored; truncating");
    }
    limit = static_cast<int>(stored);
  }
  std::vector<CurvePoint> out;
  for (int n = 1; n <= limit; ++n) {
    std::size_t total = 0;
    std::size_t correct = 0;
    for (const auto& r : results) {
      if (!r.gold) continue;
      ++total;
      const auto end = std::min<std::size_t>(r.repetitions.size(), static_cast<std::size_t>(n));
      std::vector<std::optional<Answer>> prefix(r.repetitions.begin(),
                                                r.repetitions.begin() + static_cast<std::ptrdiff_t>(end));
      const auto v = vote(prefix, cfg);
      if (v.winner && answer::compare_answers(*v.winner, *r.gold, cmp)) ++correct;
    }
    out.push_back({n, total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total)});
  }
  return out;
}

std::string curve_csv(const std::vector<CurvePoint>& curve) {
  std::string out = "n,accuracy\n";
  for (const auto& p : curve) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%d,%.6g\n", p.n, p.accuracy);
    out += buf;
  }
  return out;
}

}  // namespace tqa::ensemble
