#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tqa/fuzzy.hpp"
#include "tqa/table.hpp"

// Generic table functions exposed to plans as builtins. Every function takes
// the input table by const reference and returns a new value; column
// arguments are resolved through fuzzy::correct_name against the schema.
// Failures raise TableError.
namespace tqa::fns {

enum class End { Head, Tail };
enum class Compare { Le, Lt, Ge, Gt };

struct FnOptions {
  fuzzy::FuzzyConfig fuzzy;
  /// Split precedence for flatten_column_values; the first delimiter present
  /// in a cell is used for that cell.
  std::vector<std::string> flatten_delimiters = {";", ",", "|"};
};

/// Message used when a subset filter matches nothing. The ensemble treats
/// answers rendering to this text as sentinels.
inline constexpr std::string_view kNoMatchingRecords = "No matching records were found";

/// Corrected column name; throws TableError if the table has no columns.
std::string resolve_column(const Table& t, std::string_view column);

Table flatten_column_values(const Table& t, std::string_view column, const FnOptions& opts = {});
Table top_n_non_missing(const Table& t, std::string_view column, long long n, End end);
Table delete_rows_by_column_value(const Table& t, std::string_view column, const Cell& value);
Table sort_alphabetical(const Table& t, std::string_view column);
Table filter_numeric(const Table& t, std::string_view column, Compare cmp, double value);

/// Two rounds: case-insensitive substring containment, then (text columns and
/// non-empty text values only) a fuzzy match against the column's values.
Table filter_contains(const Table& t, std::string_view column, const Cell& value,
                      const FnOptions& opts = {});
/// Complement of the containment round; no fuzzy fallback.
Table filter_not_contains(const Table& t, std::string_view column, const Cell& value);

bool exists_value(const Table& t, std::string_view column, const Cell& value,
                  const FnOptions& opts = {});
std::size_t count_equal(const Table& t, std::string_view column, const Cell& value);
std::size_t count_containing(const Table& t, std::string_view column, const Cell& value,
                             const FnOptions& opts = {});

/// Mode of the non-missing cells; ties go to the first occurrence.
Cell most_frequent(const Table& t, std::string_view column);
/// The n most frequent values by descending count, ties by first occurrence.
std::vector<Cell> most_frequent_n(const Table& t, std::string_view column, long long n);

Cell most_frequent_in_subset(const Table& t, std::string_view target_column,
                             std::string_view subset_column, const Cell& filter_value,
                             const FnOptions& opts = {});
std::vector<Cell> most_frequent_n_in_subset(const Table& t, std::string_view target_column,
                                            std::string_view subset_column,
                                            const Cell& filter_value, long long n,
                                            const FnOptions& opts = {});

}  // namespace tqa::fns
