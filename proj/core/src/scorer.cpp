#include "tqa/scorer.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <unordered_map>

namespace tqa::scorer {

namespace {

double ratio(std::size_t a, std::size_t b) {
  return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
}

}  // namespace

Report score(const std::vector<Scored>& items, const answer::CompareOptions& cmp) {
  Report r;
  std::map<answer::AnswerType, TypeScore> by_type;
  for (const auto& item : items) {
    const auto& q = item.question;
    if (!q.gold) {
      r.warnings.push_back("question '" + q.id + "' has no gold answer; excluded");
      continue;
    }
    auto& ts = by_type[q.type];
    ts.type = q.type;
    ++ts.total;
    ++r.total;
    if (item.prediction && answer::compare_answers(*item.prediction, *q.gold, cmp)) {
      ++ts.correct;
      ++r.correct;
    }
  }
  r.accuracy = ratio(r.correct, r.total);
  for (auto t : answer::kAllTypes) {
    auto it = by_type.find(t);
    if (it == by_type.end()) continue;
    it->second.accuracy = ratio(it->second.correct, it->second.total);
    r.per_type.push_back(it->second);
  }
  return r;
}

Report score(const std::vector<Question>& questions, const std::vector<Prediction>& predictions,
             const answer::CompareOptions& cmp) {
  std::unordered_map<std::string, const Prediction*> by_id;
  std::vector<std::string> warnings;
  for (const auto& p : predictions) {
    if (!by_id.emplace(p.id, &p).second) warnings.push_back("duplicate prediction for '" + p.id + "'; using the first");
  }
  std::vector<Scored> items;
  items.reserve(questions.size());
  for (const auto& q : questions) {
    auto it = by_id.find(q.id);
    Scored s{q, std::nullopt};
    if (it == by_id.end()) {
      warnings.push_back("no prediction for '" + q.id + "'; counted as abstention");
    } else {
      s.prediction = it->second->answer;
      by_id.erase(it);
    }
    items.push_back(std::move(s));
  }
  std::vector<std::string> unknown;
  for (const auto& [id, p] : by_id) unknown.push_back(id);
  std::sort(unknown.begin(), unknown.end());
  for (const auto& id : unknown) warnings.push_back("prediction '" + id + "' matches no question; ignored");

  auto r = score(items, cmp);
  r.warnings.insert(r.warnings.begin(), warnings.begin(), warnings.end());
  return r;
}

nlohmann::json to_json(const Report& r) {
  auto types = nlohmann::json::object();
  for (const auto& ts : r.per_type) {
    types[std::string(answer::display_name(ts.type))] = {
        {"accuracy", ts.accuracy}, {"correct", ts.correct}, {"total", ts.total}};
  }
  return {{"accuracy", r.accuracy},
          {"correct", r.correct},
          {"total", r.total},
          {"per_type", std::move(types)},
          {"warnings", r.warnings}};
}

std::string format_accuracy(double acc) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", acc);
  std::string s = buf;
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

std::string render_table(const Report& r) {
  std::vector<std::vector<std::string>> cols;
  cols.push_back({"", "Score", "Size"});
  cols.push_back({"Total", format_accuracy(r.accuracy), std::to_string(r.total)});
  for (const auto& ts : r.per_type) {
    cols.push_back({std::string(answer::display_name(ts.type)), format_accuracy(ts.accuracy),
                    std::to_string(ts.total)});
  }
  std::string out;
  for (std::size_t row = 0; row < 3; ++row) {
    std::string line;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      std::size_t width = 0;
      for (const auto& cell : cols[c]) width = std::max(width, cell.size());
      const auto& cell = cols[c][row];
      if (c > 0) line += " | ";
      line += cell;
      line.append(width - cell.size(), ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

}  // namespace tqa::scorer
