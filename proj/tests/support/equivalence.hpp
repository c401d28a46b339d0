#pragma once

#include <cstdint>
#include <string>

namespace equivalence {

struct Report {
  std::size_t tables = 0;
  std::size_t checks = 0;
  std::size_t mismatches = 0;
  std::string first_mismatch;
};

/// Runs every table function against the naive reference on `tables` random
/// tables and compares results (including which calls fail).
Report tablefns(std::uint64_t seed, std::size_t tables);

/// best_fuzzy_match against exhaustive argmax on `pairs` random inputs.
Report fuzzy(std::uint64_t seed, std::size_t pairs);

}  // namespace equivalence
