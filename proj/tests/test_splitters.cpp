#include <doctest.h>

#include <creditnn/errors.hpp>
#include <creditnn/split.hpp>

#include <algorithm>
#include <set>

using namespace creditnn;

namespace {

std::vector<WindowedSample> samples_for_years(const std::vector<int>& years,
                                              int per_year = 4) {
  std::vector<WindowedSample> s;
  for (int y : years)
    for (int q = 1; q <= per_year; ++q) {
      WindowedSample w;
      w.company_id = "C1";
      w.year = y;
      w.quarter = q;
      w.values = Tensor::zeros({1, 1});
      s.push_back(std::move(w));
    }
  return s;
}

void check_partition(const SplitResult& r, std::size_t n) {
  std::set<Index> all(r.train.begin(), r.train.end());
  for (Index i : r.test) {
    CHECK(all.count(i) == 0);
    all.insert(i);
  }
  CHECK(all.size() == n);
  CHECK(*all.begin() == 0);
  CHECK(*all.rbegin() == static_cast<Index>(n - 1));
  CHECK_FALSE(r.train.empty());
  CHECK_FALSE(r.test.empty());
}

}  // namespace

TEST_CASE("random split sizes follow round(N * fraction)") {
  auto s100 = samples_for_years({2010, 2011, 2012, 2013, 2014}, 20);
  REQUIRE(s100.size() == 100);
  SplitResult r = random_split(s100, 0.15, 1);
  CHECK(r.test.size() == 15);
  CHECK(r.train.size() == 85);
  check_partition(r, 100);

  r = random_split(s100, 0.06, 1);
  CHECK(r.test.size() == 6);
  CHECK(r.train.size() == 94);
  check_partition(r, 100);
}

TEST_CASE("random split is deterministic per seed") {
  auto s = samples_for_years({2010, 2011}, 10);
  SplitResult a = random_split(s, 0.25, 42);
  SplitResult b = random_split(s, 0.25, 42);
  CHECK(a.test == b.test);
  CHECK(a.train == b.train);
  SplitResult c = random_split(s, 0.25, 43);
  CHECK(a.test != c.test);
}

TEST_CASE("degenerate random splits are rejected") {
  auto s = samples_for_years({2010}, 5);  // N = 5
  CHECK_THROWS_AS(random_split(s, 0.05, 1), SplitError);  // round(0.25) = 0 test
  CHECK_THROWS_AS(random_split(s, 0.95, 1), SplitError);  // round(4.75) = 5 test
  CHECK_THROWS_AS(random_split(s, 0.0, 1), SplitError);
  CHECK_THROWS_AS(random_split(s, 1.0, 1), SplitError);
  CHECK_THROWS_AS(random_split(samples_for_years({2010}, 1), 0.5, 1), SplitError);
}

TEST_CASE("random split test membership is uniform across seeds") {
  auto s = samples_for_years({2010}, 20);  // N = 20, fraction 0.25
  std::vector<int> hits(20, 0);
  const int trials = 10000;
  for (int seed = 0; seed < trials; ++seed) {
    SplitResult r = random_split(s, 0.25, static_cast<std::uint64_t>(seed));
    for (Index i : r.test) ++hits[static_cast<std::size_t>(i)];
  }
  for (int h : hits) {
    const double freq = static_cast<double>(h) / trials;
    CHECK(freq > 0.23);
    CHECK(freq < 0.27);
  }
}

TEST_CASE("leave-one-year-out isolates the target year") {
  auto s = samples_for_years({2010, 2011, 2012, 2013, 2014, 2015, 2016});
  SplitResult r = leave_one_year_out(s, 2014);
  check_partition(r, s.size());
  std::set<int> train_years, test_years;
  for (Index i : r.train) train_years.insert(s[static_cast<std::size_t>(i)].year);
  for (Index i : r.test) test_years.insert(s[static_cast<std::size_t>(i)].year);
  CHECK(test_years == std::set<int>{2014});
  CHECK(train_years == std::set<int>{2010, 2011, 2012, 2013, 2015, 2016});
}

TEST_CASE("membership is decided by the target year only") {
  // A window-4 sample targeting 2014Q1 has history in 2013 but belongs to 2014.
  std::vector<WindowedSample> s = samples_for_years({2013}, 4);
  WindowedSample w;
  w.company_id = "C1";
  w.year = 2014;
  w.quarter = 1;
  w.values = Tensor::zeros({4, 1});
  s.push_back(std::move(w));
  SplitResult r = leave_one_year_out(s, 2014);
  REQUIRE(r.test.size() == 1);
  CHECK(s[static_cast<std::size_t>(r.test[0])].year == 2014);
}

TEST_CASE("absent or solitary years raise split errors") {
  auto s = samples_for_years({2010, 2011});
  CHECK_THROWS_WITH_AS(leave_one_year_out(s, 1999), doctest::Contains("2010"), SplitError);
  CHECK_THROWS_AS(leave_one_year_out(samples_for_years({2010}), 2010), SplitError);
}

TEST_CASE("year sweep emits one ascending split per distinct year") {
  auto s = samples_for_years({2012, 2010, 2011});
  auto sweep = year_sweep(s);
  REQUIRE(sweep.size() == 3);
  CHECK(sweep[0].first == 2010);
  CHECK(sweep[1].first == 2011);
  CHECK(sweep[2].first == 2012);
  for (const auto& [year, r] : sweep) {
    check_partition(r, s.size());
    for (Index i : r.test) CHECK(s[static_cast<std::size_t>(i)].year == year);
  }

  auto energy = samples_for_years({2010, 2011, 2012, 2013, 2014, 2015, 2016});
  CHECK(year_sweep(energy).size() == 7);
}
