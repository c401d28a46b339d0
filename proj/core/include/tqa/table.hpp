#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tqa {

struct Missing {
  friend bool operator==(Missing, Missing) { return true; }
};

/// A single table value: number, text, boolean, or missing. Missing is
/// distinct from the empty string and from zero.
class Cell {
 public:
  using Value = std::variant<Missing, double, std::string, bool>;

  Cell() = default;
  Cell(Missing) {}
  Cell(double v) : value_(v) {}
  Cell(int v) : value_(static_cast<double>(v)) {}
  Cell(std::string v) : value_(std::move(v)) {}
  Cell(const char* v) : value_(std::string(v)) {}
  Cell(bool v) : value_(v) {}

  bool is_missing() const { return std::holds_alternative<Missing>(value_); }
  bool is_number() const { return std::holds_alternative<double>(value_); }
  bool is_text() const { return std::holds_alternative<std::string>(value_); }
  bool is_bool() const { return std::holds_alternative<bool>(value_); }

  double number() const { return std::get<double>(value_); }
  const std::string& text() const { return std::get<std::string>(value_); }
  bool boolean() const { return std::get<bool>(value_); }
  const Value& value() const { return value_; }

  /// Text rendering: numbers via text::render_number, booleans as
  /// "true"/"false", missing as "".
  std::string to_text() const;

  /// Key that distinguishes cells by type and value; used for distinct
  /// counting and de-duplication.
  std::string key() const;

  /// Structural equality (same alternative, same value).
  friend bool operator==(const Cell& a, const Cell& b) = default;

 private:
  Value value_;
};

/// Value equality used by the exact-match table functions: missing only
/// equals missing, numbers compare numerically against numbers or text that
/// parses fully as a number, everything else compares trimmed text
/// case-sensitively.
bool cells_equal(const Cell& cell, const Cell& value);

enum class ColumnKind { Numeric, MixedNumeric, Categorical, Boolean };

std::string_view to_string(ColumnKind kind);
std::optional<ColumnKind> parse_column_kind(std::string_view name);

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::Categorical;
  std::vector<Cell> cells;

  friend bool operator==(const Column&, const Column&) = default;
};

/// Immutable columnar table. Every transforming operation builds a new Table.
class Table {
 public:
  Table() = default;
  /// Throws TableError when the columns have different lengths or duplicate
  /// names.
  Table(std::string name, std::vector<Column> columns);

  const std::string& name() const { return name_; }
  const std::vector<Column>& columns() const { return columns_; }
  std::size_t row_count() const { return row_count_; }
  std::size_t column_count() const { return columns_.size(); }

  const Column* find(std::string_view column) const;
  std::optional<std::size_t> index_of(std::string_view column) const;
  std::vector<std::string> column_names() const;

  /// New table with the given rows (indices may repeat or reorder).
  Table select_rows(const std::vector<std::size_t>& rows) const;

  friend bool operator==(const Table&, const Table&) = default;

 private:
  std::string name_;
  std::vector<Column> columns_;
  std::size_t row_count_ = 0;
};

struct LoadOptions {
  char delimiter = ',';
  char quote = '"';
  /// Case-insensitive boolean lexicon. "0"/"1" are handled separately.
  std::vector<std::string> boolean_lexicon = {"si", "sí", "no", "true", "false", "yes"};
  /// Minimum share of non-missing cells that must carry a number for a
  /// column to be MixedNumeric.
  double mixed_numeric_threshold = 0.5;
};

/// Kind inference over raw cells (see LoadOptions for the knobs). Total and
/// permutation-invariant.
ColumnKind infer_column_kind(const std::vector<Cell>& cells, const LoadOptions& options = {});

/// Number for numeric cells, the first embedded decimal number for text,
/// missing otherwise.
std::optional<double> extract_numeric(const Cell& cell);

/// Parses CSV text. `name` becomes the table name.
Table parse_csv(std::string_view content, std::string name, const LoadOptions& options = {});
Table load_csv(const std::filesystem::path& path, const LoadOptions& options = {});

std::string to_csv(const Table& table, const LoadOptions& options = {});
void write_csv(const Table& table, const std::filesystem::path& path,
               const LoadOptions& options = {});

}  // namespace tqa
