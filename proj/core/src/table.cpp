#include "tqa/table.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include "tqa/error.hpp"
#include "tqa/text.hpp"

namespace tqa {

std::string Cell::to_text() const {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Missing>) {
          return {};
        } else if constexpr (std::is_same_v<T, double>) {
          return text::render_number(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return v;
        }
      },
      value_);
}

std::string Cell::key() const {
  switch (value_.index()) {
    case 0:
      return "m:";
    case 1:
      return "n:" + to_text();
    case 2:
      return "s:" + text();
    default:
      return boolean() ? "b:1" : "b:0";
  }
}

bool cells_equal(const Cell& cell, const Cell& value) {
  if (cell.is_missing() || value.is_missing()) return cell.is_missing() && value.is_missing();
  if (cell.is_number() || value.is_number()) {
    const auto lhs = cell.is_number() ? std::optional<double>(cell.number())
                     : cell.is_text() ? text::parse_number(cell.text())
                                      : std::nullopt;
    const auto rhs = value.is_number() ? std::optional<double>(value.number())
                     : value.is_text() ? text::parse_number(value.text())
                                       : std::nullopt;
    return lhs && rhs && *lhs == *rhs;
  }
  return text::trim_view(cell.to_text()) == text::trim_view(value.to_text());
}

std::string_view to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::Numeric:
      return "Numeric";
    case ColumnKind::MixedNumeric:
      return "MixedNumeric";
    case ColumnKind::Categorical:
      return "Categorical";
    case ColumnKind::Boolean:
      return "Boolean";
  }
  return "Categorical";
}

std::optional<ColumnKind> parse_column_kind(std::string_view name) {
  for (auto k : {ColumnKind::Numeric, ColumnKind::MixedNumeric, ColumnKind::Categorical,
                 ColumnKind::Boolean}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

Table::Table(std::string name, std::vector<Column> columns)
    : name_(std::move(name)), columns_(std::move(columns)) {
  row_count_ = columns_.empty() ? 0 : columns_.front().cells.size();
  std::unordered_map<std::string, int> seen;
  for (const auto& c : columns_) {
    if (c.cells.size() != row_count_) {
      throw TableError("column '" + c.name + "' has " + std::to_string(c.cells.size()) +
                       " cells, expected " + std::to_string(row_count_));
    }
    if (++seen[c.name] > 1) throw TableError("duplicate column name '" + c.name + "'");
  }
}

const Column* Table::find(std::string_view column) const {
  for (const auto& c : columns_) {
    if (c.name == column) return &c;
  }
  return nullptr;
}

std::optional<std::size_t> Table::index_of(std::string_view column) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == column) return i;
  }
  return std::nullopt;
}

std::vector<std::string> Table::column_names() const {
  std::vector<std::string> names;
  names.reserve(columns_.size());
  for (const auto& c : columns_) names.push_back(c.name);
  return names;
}

Table Table::select_rows(const std::vector<std::size_t>& rows) const {
  std::vector<Column> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) {
    Column nc{c.name, c.kind, {}};
    nc.cells.reserve(rows.size());
    for (auto r : rows) nc.cells.push_back(c.cells.at(r));
    out.push_back(std::move(nc));
  }
  Table t;
  t.name_ = name_;
  t.columns_ = std::move(out);
  t.row_count_ = rows.size();
  return t;
}

namespace {

bool in_lexicon(const std::string& lowered, const LoadOptions& options) {
  for (const auto& w : options.boolean_lexicon) {
    if (text::to_lower(w) == lowered) return true;
  }
  return false;
}

}  // namespace

ColumnKind infer_column_kind(const std::vector<Cell>& cells, const LoadOptions& options) {
  std::size_t present = 0;
  std::size_t full_numbers = 0;
  std::size_t extractable = 0;
  std::size_t booleans = 0;
  for (const auto& c : cells) {
    if (c.is_missing()) continue;
    ++present;
    if (c.is_number()) {
      ++full_numbers;
      ++extractable;
      continue;
    }
    if (c.is_bool()) {
      ++booleans;
      continue;
    }
    const auto& s = c.text();
    if (text::parse_number(s)) {
      ++full_numbers;
      ++extractable;
    } else if (text::first_number(s)) {
      ++extractable;
    }
    if (in_lexicon(text::to_lower(text::trim_view(s)), options)) ++booleans;
  }
  if (present == 0) return ColumnKind::Categorical;
  if (full_numbers == present) return ColumnKind::Numeric;
  if (booleans == present) return ColumnKind::Boolean;
  if (static_cast<double>(extractable) >=
      options.mixed_numeric_threshold * static_cast<double>(present)) {
    return ColumnKind::MixedNumeric;
  }
  return ColumnKind::Categorical;
}

std::optional<double> extract_numeric(const Cell& cell) {
  if (cell.is_number()) return cell.number();
  if (cell.is_text()) return text::first_number(cell.text());
  return std::nullopt;
}

namespace {

struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

std::vector<Record> split_records(std::string_view content, const LoadOptions& options) {
  std::vector<Record> records;
  Record current;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  bool quoted = false;
  std::size_t line = 1;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank =
        !quoted && current.fields.size() == 1 && text::trim_view(current.fields[0]).empty();
    if (!blank) records.push_back(std::move(current));
    current = Record{};
    quoted = false;
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (in_quotes) {
      if (c == options.quote) {
        if (i + 1 < content.size() && content[i + 1] == options.quote) {
          field.push_back(c);
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == options.quote && !field_started) {
      in_quotes = true;
      field_started = true;
      quoted = true;
    } else if (c == options.delimiter) {
      end_field();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') ++i;
      end_record();
      ++line;
      current.line = line;
    } else {
      field.push_back(c);
      if (c != ' ' && c != '\t') field_started = true;
    }
  }
  if (in_quotes) throw CsvError("unterminated quoted field starting near line " + std::to_string(current.line));
  if (!field.empty() || !current.fields.empty() || quoted) end_record();
  return records;
}

std::string disambiguate(const std::string& name, std::unordered_map<std::string, int>& seen) {
  int& n = seen[name];
  ++n;
  if (n == 1) return name;
  std::string candidate = name + "#" + std::to_string(n);
  while (seen.count(candidate)) candidate = name + "#" + std::to_string(++n);
  seen[candidate] = 1;
  return candidate;
}

}  // namespace

Table parse_csv(std::string_view content, std::string name, const LoadOptions& options) {
  if (content.size() >= 3 && content.substr(0, 3) == "\xEF\xBB\xBF") content.remove_prefix(3);
  auto records = split_records(content, options);
  if (records.empty()) throw CsvError("empty CSV: no header row");

  const auto& header = records.front().fields;
  const std::size_t width = header.size();
  std::unordered_map<std::string, int> seen;
  std::vector<Column> columns;
  columns.reserve(width);
  for (const auto& h : header) columns.push_back(Column{disambiguate(text::trim(h), seen), {}, {}});

  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != width) {
      throw CsvError("row " + std::to_string(r) + " (line " + std::to_string(rec.line) + ") has " +
                     std::to_string(rec.fields.size()) + " fields, expected " +
                     std::to_string(width));
    }
    for (std::size_t c = 0; c < width; ++c) {
      auto v = text::trim(rec.fields[c]);
      columns[c].cells.push_back(v.empty() ? Cell{} : Cell{std::move(v)});
    }
  }

  for (auto& col : columns) {
    col.kind = infer_column_kind(col.cells, options);
    if (col.kind == ColumnKind::Numeric) {
      for (auto& cell : col.cells) {
        if (cell.is_text()) cell = Cell{*text::parse_number(cell.text())};
      }
    }
  }
  return Table(std::move(name), std::move(columns));
}

Table load_csv(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path.stem().string(), options);
}

namespace {

std::string quote_field(const std::string& s, const LoadOptions& options, bool lone = false) {
  const bool needs = (lone && s.empty()) || s.find(options.delimiter) != std::string::npos ||
                     s.find(options.quote) != std::string::npos ||
                     s.find('\n') != std::string::npos || s.find('\r') != std::string::npos;
  if (!needs) return s;
  std::string out(1, options.quote);
  for (char c : s) {
    if (c == options.quote) out.push_back(c);
    out.push_back(c);
  }
  out.push_back(options.quote);
  return out;
}

}  // namespace

std::string to_csv(const Table& table, const LoadOptions& options) {
  std::string out;
  const auto& cols = table.columns();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (c > 0) out.push_back(options.delimiter);
    out += quote_field(cols[c].name, options);
  }
  out.push_back('\n');
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c > 0) out.push_back(options.delimiter);
      out += quote_field(cols[c].cells[r].to_text(), options, cols.size() == 1);
    }
    out.push_back('\n');
  }
  return out;
}

void write_csv(const Table& table, const std::filesystem::path& path, const LoadOptions& options) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CsvError("cannot write '" + path.string() + "'");
  out << to_csv(table, options);
}

}  // namespace tqa
