#include "creditnn/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "creditnn/errors.hpp"
#include "creditnn/rng.hpp"

namespace creditnn {

SplitResult random_split(const std::vector<WindowedSample>& samples, double test_fraction,
                         std::uint64_t seed) {
  const Index n = static_cast<Index>(samples.size());
  if (n < 2) throw SplitError("random split needs at least 2 samples, got " + std::to_string(n));
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw SplitError("test_fraction must be in (0,1), got " + std::to_string(test_fraction));
  const Index n_test = static_cast<Index>(std::llround(static_cast<double>(n) * test_fraction));
  if (n_test <= 0 || n_test >= n)
    throw SplitError("degenerate split: " + std::to_string(n_test) + " of " + std::to_string(n) +
                     " samples in test");

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(seed);
  rng.shuffle(order);

  SplitResult result;
  result.test.assign(order.begin(), order.begin() + n_test);
  result.train.assign(order.begin() + n_test, order.end());
  std::sort(result.test.begin(), result.test.end());
  std::sort(result.train.begin(), result.train.end());
  return result;
}

SplitResult leave_one_year_out(const std::vector<WindowedSample>& samples, int year) {
  SplitResult result;
  std::set<int> years;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    years.insert(samples[i].year);
    (samples[i].year == year ? result.test : result.train).push_back(static_cast<Index>(i));
  }
  if (result.test.empty()) {
    std::ostringstream os;
    os << "year " << year << " has no samples; available years:";
    for (int y : years) os << " " << y;
    throw SplitError(os.str());
  }
  if (result.train.empty())
    throw SplitError("holding out year " + std::to_string(year) + " leaves an empty train set");
  return result;
}

std::vector<std::pair<int, SplitResult>> year_sweep(const std::vector<WindowedSample>& samples) {
  std::set<int> years;
  for (const WindowedSample& s : samples) years.insert(s.year);
  std::vector<std::pair<int, SplitResult>> sweep;
  for (int y : years) sweep.emplace_back(y, leave_one_year_out(samples, y));
  return sweep;
}

}  // namespace creditnn
