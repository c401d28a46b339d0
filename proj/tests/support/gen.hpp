#pragma once

#include <random>
#include <string>
#include <vector>

#include "tqa/planlang.hpp"
#include "tqa/table.hpp"

namespace gen {

using Rng = std::mt19937_64;

/// CSV text for a random table: up to `max_rows` rows and `max_cols` columns
/// drawn from numeric, mixed, categorical and boolean value pools, with
/// missing cells.
std::string random_csv(Rng& rng, int max_rows = 20, int max_cols = 5);
tqa::Table random_table(Rng& rng, int max_rows = 20, int max_cols = 5);

/// A value worth querying column `col` with: a stored value, a case or
/// spelling variant, an unrelated pool value, a number or missing.
tqa::Cell query_value(Rng& rng, const tqa::Table& t, std::size_t col);

/// The column name itself or, sometimes, a one-edit misspelling of it.
std::string column_arg(Rng& rng, const tqa::Table& t, std::size_t col);

/// Random text over an alphabet with accents, quotes, backslashes and
/// control characters.
std::string random_text(Rng& rng, std::size_t max_len);

/// A plan that passes validation against `schema` (non-empty).
tqa::plan::Plan random_plan(Rng& rng, const std::vector<std::string>& schema);

int uniform(Rng& rng, int lo, int hi);

}  // namespace gen
