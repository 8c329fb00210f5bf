#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "creditnn/panel.hpp"

namespace creditnn {

// Train/test allocation over a windowed sample sequence.
struct SplitPlan {
  enum class Kind { random, leave_one_year_out };
  Kind kind = Kind::random;
  double test_fraction = 0.15;  // random only
  int held_out_year = 0;        // temporal only
  std::uint64_t rng_seed = 0;
};

// Disjoint, covering, non-empty index sets into the sample sequence.
struct SplitResult {
  std::vector<Index> train;  // ascending
  std::vector<Index> test;   // ascending
};

// Seeded unstratified permutation split; the first round(N * test_fraction)
// permuted samples form the test set.
SplitResult random_split(const std::vector<WindowedSample>& samples, double test_fraction,
                         std::uint64_t seed);

// Samples whose target (year, quarter) falls in `year` form the test set;
// window histories may reach into adjacent years.
SplitResult leave_one_year_out(const std::vector<WindowedSample>& samples, int year);

// One leave-one-year-out split per distinct target year, ascending.
std::vector<std::pair<int, SplitResult>> year_sweep(const std::vector<WindowedSample>& samples);

}  // namespace creditnn
