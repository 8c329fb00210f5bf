#include "creditnn/stats.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "creditnn/distributions.hpp"

namespace creditnn {

SampleSummary SampleSummary::of(const std::vector<double>& values) {
  SampleSummary s;
  s.n = static_cast<int>(values.size());
  if (s.n == 0) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / s.n;
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / (s.n - 1));
  }
  return s;
}

TTestResult welch_one_sided(const SampleSummary& a, const SampleSummary& b) {
  if (a.n < 2 || b.n < 2) throw StatError("welch test needs n >= 2 in both samples");
  const double va = a.stddev * a.stddev / a.n;
  const double vb = b.stddev * b.stddev / b.n;
  if (va + vb <= 0.0) throw StatError("welch test degenerate: both variances are zero");
  TTestResult r;
  r.t = (a.mean - b.mean) / std::sqrt(va + vb);
  r.df = (va + vb) * (va + vb) / (va * va / (a.n - 1) + vb * vb / (b.n - 1));
  r.p_one_sided = 1.0 - student_t_cdf(r.t, r.df);
  return r;
}

const AnovaRow& AnovaTable::effect(const std::string& name) const {
  for (const auto& row : rows)
    if (row.name == name) return row;
  throw ConfigError("no ANOVA effect named '" + name + "'");
}

AnovaTable one_way_anova(const std::vector<std::vector<double>>& groups,
                         const std::string& factor_name) {
  const int k = static_cast<int>(groups.size());
  if (k < 2) throw StatError("one-way ANOVA needs at least 2 groups");
  int n = 0;
  double total = 0.0;
  for (const auto& g : groups) {
    if (g.empty()) throw DesignError("one-way ANOVA: empty group");
    n += static_cast<int>(g.size());
    total += std::accumulate(g.begin(), g.end(), 0.0);
  }
  if (n <= k) throw StatError("one-way ANOVA needs more observations than groups");
  const double grand = total / n;

  double ss_between = 0.0;
  double ss_within = 0.0;
  for (const auto& g : groups) {
    const double m = std::accumulate(g.begin(), g.end(), 0.0) / g.size();
    ss_between += g.size() * (m - grand) * (m - grand);
    for (double v : g) ss_within += (v - m) * (v - m);
  }
  if (ss_between + ss_within <= 0.0)
    throw StatError("one-way ANOVA: all observations identical");

  AnovaTable t;
  AnovaRow between{factor_name, ss_between, k - 1, 0.0, 0.0, true};
  AnovaRow within{"residual", ss_within, n - k, 0.0, 0.0, false};
  const double ms_b = ss_between / between.df;
  const double ms_w = ss_within / within.df;
  between.f = ms_w > 0.0 ? ms_b / ms_w : std::numeric_limits<double>::infinity();
  between.p = ms_w > 0.0 ? f_sf(between.f, between.df, within.df) : 0.0;
  t.rows = {between, within};
  t.total_ss = ss_between + ss_within;
  t.total_df = n - 1;
  return t;
}

namespace {

std::vector<std::string> sorted_levels(const std::vector<std::string>& labels) {
  std::set<std::string> s(labels.begin(), labels.end());
  return {s.begin(), s.end()};
}

std::vector<int> level_index(const std::vector<std::string>& labels,
                             const std::vector<std::string>& levels) {
  std::map<std::string, int> idx;
  for (std::size_t i = 0; i < levels.size(); ++i) idx[levels[i]] = static_cast<int>(i);
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = idx.at(labels[i]);
  return out;
}

// Residual sum of squares of a least-squares fit y ~ X.
double fit_rss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
  return (y - X * beta).squaredNorm();
}

// Treatment-coded design matrix: intercept, then dummies for the requested
// terms. a/b are level indices, na/nb the level counts.
Eigen::MatrixXd design(const std::vector<int>& a, const std::vector<int>& b, int na, int nb,
                       bool with_a, bool with_b, bool with_ab) {
  const int n = static_cast<int>(a.size());
  int cols = 1;
  if (with_a) cols += na - 1;
  if (with_b) cols += nb - 1;
  if (with_ab) cols += (na - 1) * (nb - 1);
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, cols);
  for (int i = 0; i < n; ++i) {
    int c = 0;
    X(i, c++) = 1.0;
    if (with_a) {
      if (a[i] > 0) X(i, c + a[i] - 1) = 1.0;
      c += na - 1;
    }
    if (with_b) {
      if (b[i] > 0) X(i, c + b[i] - 1) = 1.0;
      c += nb - 1;
    }
    if (with_ab) {
      if (a[i] > 0 && b[i] > 0) X(i, c + (a[i] - 1) * (nb - 1) + (b[i] - 1)) = 1.0;
      c += (na - 1) * (nb - 1);
    }
  }
  return X;
}

}  // namespace

AnovaTable two_way_anova(const std::vector<double>& response,
                         const std::vector<std::string>& factor_a,
                         const std::vector<std::string>& factor_b,
                         const std::string& name_a, const std::string& name_b) {
  const int n = static_cast<int>(response.size());
  if (factor_a.size() != response.size() || factor_b.size() != response.size())
    throw DesignError("two-way ANOVA: factor length does not match response length");

  const std::vector<std::string> levels_a = sorted_levels(factor_a);
  const std::vector<std::string> levels_b = sorted_levels(factor_b);
  const int na = static_cast<int>(levels_a.size());
  const int nb = static_cast<int>(levels_b.size());
  if (na < 2 || nb < 2) throw DesignError("two-way ANOVA needs >= 2 levels per factor");

  const std::vector<int> ia = level_index(factor_a, levels_a);
  const std::vector<int> ib = level_index(factor_b, levels_b);

  std::vector<std::vector<int>> cell_count(na, std::vector<int>(nb, 0));
  for (int i = 0; i < n; ++i) ++cell_count[ia[i]][ib[i]];
  for (int x = 0; x < na; ++x)
    for (int y = 0; y < nb; ++y)
      if (cell_count[x][y] == 0)
        throw DesignError("two-way ANOVA: empty cell (" + levels_a[x] + ", " + levels_b[y] + ")");

  const int df_a = na - 1;
  const int df_b = nb - 1;
  const int df_ab = (na - 1) * (nb - 1);
  const int df_res = n - na * nb;
  if (df_res <= 0) throw DesignError("two-way ANOVA: no residual degrees of freedom");

  double grand = std::accumulate(response.begin(), response.end(), 0.0) / n;
  double total_ss = 0.0;
  for (double v : response) total_ss += (v - grand) * (v - grand);
  if (total_ss <= 0.0) throw StatError("two-way ANOVA: all observations identical");

  bool balanced = true;
  for (int x = 0; x < na && balanced; ++x)
    for (int y = 0; y < nb && balanced; ++y)
      if (cell_count[x][y] != cell_count[0][0]) balanced = false;

  double ss_a, ss_b, ss_ab, ss_res;
  if (balanced) {
    std::vector<double> mean_a(na, 0.0), mean_b(nb, 0.0);
    std::vector<std::vector<double>> mean_ab(na, std::vector<double>(nb, 0.0));
    std::vector<int> count_a(na, 0), count_b(nb, 0);
    for (int i = 0; i < n; ++i) {
      mean_a[ia[i]] += response[i];
      mean_b[ib[i]] += response[i];
      mean_ab[ia[i]][ib[i]] += response[i];
      ++count_a[ia[i]];
      ++count_b[ib[i]];
    }
    for (int x = 0; x < na; ++x) mean_a[x] /= count_a[x];
    for (int y = 0; y < nb; ++y) mean_b[y] /= count_b[y];
    for (int x = 0; x < na; ++x)
      for (int y = 0; y < nb; ++y) mean_ab[x][y] /= cell_count[x][y];

    ss_a = ss_b = ss_ab = ss_res = 0.0;
    for (int x = 0; x < na; ++x) ss_a += count_a[x] * (mean_a[x] - grand) * (mean_a[x] - grand);
    for (int y = 0; y < nb; ++y) ss_b += count_b[y] * (mean_b[y] - grand) * (mean_b[y] - grand);
    for (int x = 0; x < na; ++x)
      for (int y = 0; y < nb; ++y) {
        const double d = mean_ab[x][y] - mean_a[x] - mean_b[y] + grand;
        ss_ab += cell_count[x][y] * d * d;
      }
    for (int i = 0; i < n; ++i) {
      const double d = response[i] - mean_ab[ia[i]][ib[i]];
      ss_res += d * d;
    }
  } else {
    // Type II: each main effect adjusted for the other, interaction adjusted
    // for both main effects.
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(response.data(), n);
    const double rss_a = fit_rss(design(ia, ib, na, nb, true, false, false), y);
    const double rss_b = fit_rss(design(ia, ib, na, nb, false, true, false), y);
    const double rss_add = fit_rss(design(ia, ib, na, nb, true, true, false), y);
    const double rss_full = fit_rss(design(ia, ib, na, nb, true, true, true), y);
    ss_a = std::max(0.0, rss_b - rss_add);
    ss_b = std::max(0.0, rss_a - rss_add);
    ss_ab = std::max(0.0, rss_add - rss_full);
    ss_res = rss_full;
  }

  const double ms_res = ss_res / df_res;
  auto effect = [&](const std::string& name, double ss, int df) {
    AnovaRow r{name, ss, df, 0.0, 0.0, true};
    if (ms_res > 0.0) {
      r.f = (ss / df) / ms_res;
      r.p = f_sf(r.f, df, df_res);
    } else {
      r.f = std::numeric_limits<double>::infinity();
      r.p = 0.0;
    }
    return r;
  };

  AnovaTable t;
  t.rows = {effect(name_a, ss_a, df_a), effect(name_b, ss_b, df_b),
            effect(name_a + ":" + name_b, ss_ab, df_ab),
            AnovaRow{"residual", ss_res, df_res, 0.0, 0.0, false}};
  t.total_ss = total_ss;
  t.total_df = n - 1;
  return t;
}

TukeyGrouping tukey_hsd(const std::vector<std::vector<double>>& groups,
                        const std::vector<std::string>& level_names, double alpha) {
  if (groups.size() != level_names.size())
    throw ConfigError("tukey_hsd: level name count does not match group count");
  if (alpha <= 0.0 || alpha >= 1.0) throw ConfigError("tukey_hsd: alpha must lie in (0,1)");
  const AnovaTable anova = one_way_anova(groups);
  const int k = static_cast<int>(groups.size());
  const double ms_within = anova.residual().ss / anova.residual().df;
  const int df_within = anova.residual().df;

  std::vector<double> means(k);
  std::vector<int> sizes(k);
  for (int i = 0; i < k; ++i) {
    means[i] = std::accumulate(groups[i].begin(), groups[i].end(), 0.0) / groups[i].size();
    sizes[i] = static_cast<int>(groups[i].size());
  }

  // Rank order: highest mean first; ties keep input order.
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return means[a] > means[b]; });

  TukeyGrouping g;
  g.alpha = alpha;
  g.ms_within = ms_within;
  g.df_within = df_within;
  for (int r = 0; r < k; ++r) {
    g.levels.push_back(level_names[order[r]]);
    g.means.push_back(means[order[r]]);
    g.group_sizes.push_back(sizes[order[r]]);
  }

  // Union-find over rank positions for the non-significant relation.
  std::vector<int> parent(k);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      TukeyComparison c;
      c.level_i = i;
      c.level_j = j;
      c.diff = g.means[i] - g.means[j];
      const double se =
          std::sqrt(0.5 * ms_within * (1.0 / g.group_sizes[i] + 1.0 / g.group_sizes[j]));
      if (se <= 0.0) throw StatError("tukey_hsd: zero within-group variance");
      c.q = std::fabs(c.diff) / se;
      c.p_adj = studentized_range_sf(c.q, k, df_within);
      c.significant = c.p_adj < alpha;
      if (!c.significant) parent[find(i)] = find(j);
      g.comparisons.push_back(c);
    }
  }

  std::map<int, std::vector<int>> components;
  for (int i = 0; i < k; ++i) components[find(i)].push_back(i);
  std::vector<std::vector<int>> comps;
  for (auto& [root, members] : components) {
    std::sort(members.begin(), members.end());
    comps.push_back(members);
  }
  std::sort(comps.begin(), comps.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  g.groups = std::move(comps);
  return g;
}

std::string format_grouping(const TukeyGrouping& g) {
  std::ostringstream os;
  for (std::size_t c = 0; c < g.groups.size(); ++c) {
    if (c) os << " | ";
    const auto& members = g.groups[c];
    if (members.size() > 1) os << "[";
    for (std::size_t m = 0; m < members.size(); ++m) {
      if (m) os << " ";
      os << g.levels[members[m]];
    }
    if (members.size() > 1) os << "]";
  }
  return os.str();
}

std::vector<std::string> rank_table(
    const std::vector<std::pair<std::string, TukeyGrouping>>& per_sector) {
  std::vector<std::string> rows;
  rows.reserve(per_sector.size());
  for (const auto& [sector, grouping] : per_sector)
    rows.push_back(sector + ": " + format_grouping(grouping));
  return rows;
}

}  // namespace creditnn
