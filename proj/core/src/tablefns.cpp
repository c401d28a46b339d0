#include "tqa/tablefns.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "tqa/error.hpp"
#include "tqa/text.hpp"

namespace tqa::fns {

namespace {

const Column& column_of(const Table& t, std::string_view column) {
  return *t.find(resolve_column(t, column));
}

std::vector<std::size_t> rows_where(const Table& t, std::string_view column, auto&& pred) {
  const auto& col = column_of(t, column);
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < t.row_count(); ++r) {
    if (pred(col.cells[r])) rows.push_back(r);
  }
  return rows;
}

bool contains_value(const Cell& cell, const Cell& value, const std::string& needle) {
  if (value.is_missing()) return cell.is_missing();
  if (cell.is_missing()) return false;
  return text::to_lower(cell.to_text()).find(needle) != std::string::npos;
}

std::string needle_of(const Cell& value) {
  return text::to_lower(text::trim_view(value.to_text()));
}

std::vector<std::size_t> contains_rows(const Table& t, std::string_view column, const Cell& value) {
  const auto needle = needle_of(value);
  return rows_where(t, column, [&](const Cell& c) { return contains_value(c, value, needle); });
}

struct Tally {
  Cell value;
  std::size_t count = 0;
  std::size_t first = 0;
};

std::vector<Tally> ranked_values(const Column& col) {
  std::unordered_map<std::string, std::size_t> index;
  std::vector<Tally> tallies;
  for (std::size_t r = 0; r < col.cells.size(); ++r) {
    const auto& c = col.cells[r];
    if (c.is_missing()) continue;
    auto [it, inserted] = index.emplace(c.key(), tallies.size());
    if (inserted) tallies.push_back(Tally{c, 0, r});
    ++tallies[it->second].count;
  }
  std::stable_sort(tallies.begin(), tallies.end(),
                   [](const Tally& a, const Tally& b) { return a.count > b.count; });
  return tallies;
}

}  // namespace

std::string resolve_column(const Table& t, std::string_view column) {
  if (t.find(column) != nullptr) return std::string(column);
  if (t.column_count() == 0) throw TableError("column '" + std::string(column) + "' not found: table has no columns");
  return fuzzy::correct_name(column, t.column_names());
}

Table flatten_column_values(const Table& t, std::string_view column, const FnOptions& opts) {
  const auto name = resolve_column(t, column);
  const auto col_index = *t.index_of(name);
  const auto& col = t.columns()[col_index];

  std::vector<std::size_t> rows;
  std::vector<Cell> replacement;
  for (std::size_t r = 0; r < t.row_count(); ++r) {
    const auto& cell = col.cells[r];
    const std::string* delim = nullptr;
    if (cell.is_text()) {
      for (const auto& d : opts.flatten_delimiters) {
        if (!d.empty() && cell.text().find(d) != std::string::npos) {
          delim = &d;
          break;
        }
      }
    }
    if (delim == nullptr) {
      rows.push_back(r);
      replacement.push_back(cell);
      continue;
    }
    const auto& s = cell.text();
    std::size_t pos = 0;
    bool any = false;
    while (true) {
      const auto next = s.find(*delim, pos);
      auto piece = text::trim(std::string_view(s).substr(pos, next == std::string::npos ? std::string::npos : next - pos));
      if (!piece.empty()) {
        rows.push_back(r);
        replacement.push_back(Cell{std::move(piece)});
        any = true;
      }
      if (next == std::string::npos) break;
      pos = next + delim->size();
    }
    if (!any) {
      rows.push_back(r);
      replacement.push_back(Cell{});
    }
  }

  std::vector<Column> out;
  for (std::size_t c = 0; c < t.column_count(); ++c) {
    const auto& src = t.columns()[c];
    Column nc{src.name, src.kind, {}};
    if (c == col_index) {
      nc.cells = replacement;
    } else {
      nc.cells.reserve(rows.size());
      for (auto r : rows) nc.cells.push_back(src.cells[r]);
    }
    out.push_back(std::move(nc));
  }
  return Table(t.name(), std::move(out));
}

Table top_n_non_missing(const Table& t, std::string_view column, long long n, End end) {
  if (n < 0) throw TableError("n must be non-negative, got " + std::to_string(n));
  auto rows = rows_where(t, column, [](const Cell& c) { return !c.is_missing(); });
  const auto keep = std::min<std::size_t>(rows.size(), static_cast<std::size_t>(n));
  if (end == End::Head) {
    rows.resize(keep);
  } else {
    rows.erase(rows.begin(), rows.end() - static_cast<std::ptrdiff_t>(keep));
  }
  return t.select_rows(rows);
}

Table delete_rows_by_column_value(const Table& t, std::string_view column, const Cell& value) {
  return t.select_rows(
      rows_where(t, column, [&](const Cell& c) { return !cells_equal(c, value); }));
}

Table sort_alphabetical(const Table& t, std::string_view column) {
  const auto& col = column_of(t, column);
  std::vector<std::string> keys;
  keys.reserve(t.row_count());
  for (const auto& c : col.cells) keys.push_back(text::to_lower(c.to_text()));
  std::vector<std::size_t> rows(t.row_count());
  std::iota(rows.begin(), rows.end(), 0);
  std::stable_sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
    const bool ma = col.cells[a].is_missing();
    const bool mb = col.cells[b].is_missing();
    if (ma || mb) return !ma && mb;
    return keys[a] < keys[b];
  });
  return t.select_rows(rows);
}

Table filter_numeric(const Table& t, std::string_view column, Compare cmp, double value) {
  const auto& col = column_of(t, column);
  if (col.kind != ColumnKind::Numeric && col.kind != ColumnKind::MixedNumeric) {
    const bool any = std::any_of(col.cells.begin(), col.cells.end(),
                                 [](const Cell& c) { return extract_numeric(c).has_value(); });
    if (!any) throw TableError("non-numeric column '" + col.name + "'");
  }
  return t.select_rows(rows_where(t, col.name, [&](const Cell& c) {
    const auto x = extract_numeric(c);
    if (!x) return false;
    switch (cmp) {
      case Compare::Le:
        return *x <= value;
      case Compare::Lt:
        return *x < value;
      case Compare::Ge:
        return *x >= value;
      case Compare::Gt:
        return *x > value;
    }
    return false;
  }));
}

Table filter_contains(const Table& t, std::string_view column, const Cell& value,
                      const FnOptions& opts) {
  const auto name = resolve_column(t, column);
  auto round1 = t.select_rows(contains_rows(t, name, value));
  if (round1.row_count() > 0) return round1;

  const auto& col = *t.find(name);
  if (col.kind == ColumnKind::Numeric || !value.is_text() ||
      text::trim_view(value.text()).empty()) {
    return round1;
  }
  const auto match = fuzzy::best_fuzzy_match(col.cells, value.text(), opts.fuzzy.filter_threshold);
  if (!match) return round1;
  const auto key = match->key();
  auto fuzzy_rows = rows_where(t, name, [&](const Cell& c) { return c.key() == key; });
  if (fuzzy_rows.empty()) return round1;
  return t.select_rows(fuzzy_rows);
}

Table filter_not_contains(const Table& t, std::string_view column, const Cell& value) {
  const auto needle = needle_of(value);
  return t.select_rows(
      rows_where(t, column, [&](const Cell& c) { return !contains_value(c, value, needle); }));
}

bool exists_value(const Table& t, std::string_view column, const Cell& value,
                  const FnOptions& opts) {
  return filter_contains(t, column, value, opts).row_count() > 0;
}

std::size_t count_equal(const Table& t, std::string_view column, const Cell& value) {
  return rows_where(t, column, [&](const Cell& c) { return cells_equal(c, value); }).size();
}

std::size_t count_containing(const Table& t, std::string_view column, const Cell& value,
                             const FnOptions& opts) {
  return filter_contains(t, column, value, opts).row_count();
}

Cell most_frequent(const Table& t, std::string_view column) {
  const auto& col = column_of(t, column);
  auto ranked = ranked_values(col);
  if (ranked.empty()) throw TableError("no values in column '" + col.name + "'");
  return ranked.front().value;
}

std::vector<Cell> most_frequent_n(const Table& t, std::string_view column, long long n) {
  if (n < 1) throw TableError("n must be at least 1, got " + std::to_string(n));
  const auto& col = column_of(t, column);
  auto ranked = ranked_values(col);
  if (ranked.empty()) throw TableError("no values in column '" + col.name + "'");
  std::vector<Cell> out;
  for (std::size_t i = 0; i < ranked.size() && i < static_cast<std::size_t>(n); ++i) {
    out.push_back(ranked[i].value);
  }
  return out;
}

namespace {

Table subset_of(const Table& t, std::string_view target_column, std::string_view subset_column,
                const Cell& filter_value, const FnOptions& opts) {
  resolve_column(t, target_column);
  auto subset = filter_contains(t, subset_column, filter_value, opts);
  if (subset.row_count() == 0) throw TableError(std::string(kNoMatchingRecords));
  return subset;
}

}  // namespace

Cell most_frequent_in_subset(const Table& t, std::string_view target_column,
                             std::string_view subset_column, const Cell& filter_value,
                             const FnOptions& opts) {
  return most_frequent(subset_of(t, target_column, subset_column, filter_value, opts),
                       target_column);
}

std::vector<Cell> most_frequent_n_in_subset(const Table& t, std::string_view target_column,
                                            std::string_view subset_column,
                                            const Cell& filter_value, long long n,
                                            const FnOptions& opts) {
  return most_frequent_n(subset_of(t, target_column, subset_column, filter_value, opts),
                         target_column, n);
}

}  // namespace tqa::fns
