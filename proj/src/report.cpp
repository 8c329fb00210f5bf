#include "creditnn/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "creditnn/errors.hpp"
#include "creditnn/ratios.hpp"

namespace creditnn {
namespace {

// item -> "numerator / denominator", in compute_ratios order.
const std::vector<std::pair<std::string, std::string>>& ratio_catalog() {
  static const std::vector<std::pair<std::string, std::string>> defs = {
      {"r01", "debt / ebitda"},
      {"r02", "ffo / total_debt"},
      {"r03", "ebitda / interest"},
      {"r04", "ffo / interest"},
      {"r05", "cfo / debt"},
      {"r06", "ffo / net_profit"},
      {"r07", "nwc / revenue"},
      {"r08", "current_assets / current_liabilities"},
      {"r09", "(ffo + cash) / current_liabilities"},
      {"r10", "ebitda / revenue"},
      {"r11", "cash / total_debt"},
      {"r12", "total_debt / tangible_net_worth"},
      {"r13", "total_debt / revenue"},
      {"r14", "debt / capital"},
      {"r15", "cash / total_assets"},
      {"r16", "total_fixed_capital / total_fixed_assets"},
      {"r17", "equity / total_assets"},
      {"r18", "nwc / total_assets"},
      {"r19", "retained_earnings / total_assets"},
      {"r20", "ebitda / total_assets"}};
  return defs;
}

std::string family_of(const std::string& arch) { return arch.substr(0, arch.find('-')); }

// Published row order: mlp, cnn, lstm, cnn2d; anything else after, by name.
int family_rank(const std::string& family) {
  if (family == "mlp") return 0;
  if (family == "cnn") return 1;
  if (family == "lstm") return 2;
  if (family == "cnn2d") return 3;
  return 4;
}

bool family_before(const std::string& a, const std::string& b) {
  const int ra = family_rank(a), rb = family_rank(b);
  return ra != rb ? ra < rb : a < b;
}

std::string fmt(double v, const char* spec) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string format_pvalue(double p) { return p >= 1e-3 ? fmt(p, "%.4f") : fmt(p, "%.2E"); }

void no_data_row(std::ostringstream& os, int columns) {
  os << "| (no data) |";
  for (int c = 1; c < columns; ++c) os << " |";
  os << "\n";
}

struct Key {
  std::string sector;
  std::string family;
  bool operator<(const Key& o) const {
    if (sector != o.sector) return sector < o.sector;
    if (family != o.family) return family_before(family, o.family);
    return false;
  }
};

struct CellAccum {
  std::vector<double> test;
  std::vector<double> train;
};

std::map<Key, CellAccum> collect(const ResultStore& store, int case_id) {
  std::map<Key, CellAccum> cells;
  for (const ExperimentResult& r : store.rows) {
    if (r.case_id != case_id) continue;
    CellAccum& c = cells[{r.sector, family_of(r.arch)}];
    c.test.push_back(r.test_acc);
    c.train.push_back(r.train_acc);
  }
  return cells;
}

std::vector<std::string> sectors_of(const std::map<Key, CellAccum>& cells) {
  std::set<std::string> s;
  for (const auto& [key, cell] : cells) s.insert(key.sector);
  return {s.begin(), s.end()};
}

std::vector<std::string> families_of(const std::map<Key, CellAccum>& cells) {
  std::set<std::string> s;
  for (const auto& [key, cell] : cells) s.insert(key.family);
  std::vector<std::string> out(s.begin(), s.end());
  std::sort(out.begin(), out.end(), family_before);
  return out;
}

// Cells with rows on both sides of the comparison; one-sided cells dropped.
std::vector<ComparisonCell> both_sided_cells(const ResultStore& store) {
  const std::map<Key, CellAccum> c3 = collect(store, 3);
  const std::map<Key, CellAccum> c4 = collect(store, 4);
  std::vector<ComparisonCell> cells;
  for (const auto& [key, cell] : c3) {
    const auto other = c4.find(key);
    if (other == c4.end()) continue;
    cells.push_back({key.sector, key.family, SampleSummary::of(cell.test),
                     SampleSummary::of(other->second.test)});
  }
  return cells;
}

}  // namespace

std::vector<ComparisonCell> comparison_grid(const ResultStore& store) {
  const std::map<Key, CellAccum> c3 = collect(store, 3);
  const std::map<Key, CellAccum> c4 = collect(store, 4);
  std::set<Key> keys;
  for (const auto& [key, cell] : c3) keys.insert(key);
  for (const auto& [key, cell] : c4) keys.insert(key);
  std::vector<ComparisonCell> cells;
  for (const Key& key : keys) {
    const auto a = c3.find(key);
    const auto b = c4.find(key);
    if (a == c3.end())
      throw DesignError("stats: no case-3 rows for " + key.sector + "/" + key.family);
    if (b == c4.end())
      throw DesignError("stats: no case-4 rows for " + key.sector + "/" + key.family);
    cells.push_back({key.sector, key.family, SampleSummary::of(a->second.test),
                     SampleSummary::of(b->second.test)});
  }
  return cells;
}

std::vector<ComparisonCell> load_comparison_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open summary file " + path);
  std::string line;
  if (!std::getline(in, line) ||
      (line != "sector,arch,case3_mean,case3_std,case3_n,case4_mean,case4_std,case4_n" &&
       line != "sector,arch,case3_mean,case3_std,case3_n,case4_mean,case4_std,case4_n\r"))
    throw ParseError("summary: missing header in " + path);
  std::vector<ComparisonCell> cells;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() != 8)
      throw ParseError("summary line " + std::to_string(line_no) + ": expected 8 fields");
    auto num = [&](const std::string& s, const char* what) {
      try {
        return std::stod(s);
      } catch (const std::exception&) {
        throw ParseError("summary line " + std::to_string(line_no) + ": bad " + what);
      }
    };
    ComparisonCell c;
    c.sector = f[0];
    c.arch = f[1];
    c.case3.mean = num(f[2], "case3_mean");
    c.case3.stddev = num(f[3], "case3_std");
    c.case3.n = static_cast<int>(num(f[4], "case3_n"));
    c.case4.mean = num(f[5], "case4_mean");
    c.case4.stddev = num(f[6], "case4_std");
    c.case4.n = static_cast<int>(num(f[7], "case4_n"));
    cells.push_back(c);
  }
  return cells;
}

std::string render_ttest_grid(const std::vector<ComparisonCell>& cells) {
  if (cells.empty()) throw DesignError("stats: no comparison cells");
  std::set<std::string> sector_set;
  std::set<std::string> family_set;
  std::map<std::pair<std::string, std::string>, const ComparisonCell*> by_key;
  for (const ComparisonCell& c : cells) {
    sector_set.insert(c.sector);
    family_set.insert(c.arch);
    by_key[{c.sector, c.arch}] = &c;
  }
  std::vector<std::string> sectors(sector_set.begin(), sector_set.end());
  std::vector<std::string> families(family_set.begin(), family_set.end());
  std::sort(families.begin(), families.end(), family_before);
  std::ostringstream os;
  os << "| arch |";
  for (const std::string& s : sectors) os << " " << s << " |";
  os << "\n| --- |";
  for (std::size_t i = 0; i < sectors.size(); ++i) os << " --- |";
  os << "\n";
  for (const std::string& fam : families) {
    os << "| " << fam << " |";
    for (const std::string& s : sectors) {
      const auto it = by_key.find({s, fam});
      if (it == by_key.end()) throw DesignError("stats: no comparison cell for " + s + "/" + fam);
      os << " " << format_pvalue(welch_one_sided(it->second->case3, it->second->case4).p_one_sided)
         << " |";
    }
    os << "\n";
  }
  return os.str();
}

std::string render_anova2(const ResultStore& store, int case_id) {
  std::vector<double> response;
  std::vector<std::string> sector_factor;
  std::vector<std::string> arch_factor;
  for (const ExperimentResult& r : store.rows) {
    if (r.case_id != case_id) continue;
    response.push_back(r.test_acc);
    sector_factor.push_back(r.sector);
    arch_factor.push_back(family_of(r.arch));
  }
  if (response.empty())
    throw DesignError("stats: no case-" + std::to_string(case_id) + " rows for the ANOVA");
  const double first = response.front();
  if (std::all_of(response.begin(), response.end(), [&](double v) { return v == first; }))
    throw StatError("stats: constant response has zero variance");
  const AnovaTable t = two_way_anova(response, sector_factor, arch_factor, "sector", "arch");
  std::ostringstream os;
  os << "| effect | sum sq | df | F | p |\n| --- | --- | --- | --- | --- |\n";
  for (const AnovaRow& row : t.rows) {
    os << "| " << row.name << " | " << fmt(row.ss, "%.5f") << " | " << row.df << " | ";
    if (row.has_f)
      os << fmt(row.f, "%.2f") << " | " << format_pvalue(row.p) << " |\n";
    else
      os << "| |\n";
  }
  return os.str();
}

std::string render_tukey_ranks(const ResultStore& store, int case_id) {
  const std::map<Key, CellAccum> cells = collect(store, case_id);
  if (cells.empty())
    throw DesignError("stats: no case-" + std::to_string(case_id) + " rows for the ranking");
  std::vector<std::pair<std::string, TukeyGrouping>> per_sector;
  for (const std::string& sector : sectors_of(cells)) {
    std::vector<std::string> names;
    std::vector<std::vector<double>> groups;
    for (const auto& [key, cell] : cells)
      if (key.sector == sector) {
        names.push_back(key.family);
        groups.push_back(cell.test);
      }
    per_sector.emplace_back(sector, tukey_hsd(groups, names));
  }
  std::ostringstream os;
  os << "| sector | ranking (best first) |\n| --- | --- |\n";
  for (const std::string& row : rank_table(per_sector)) {
    const std::size_t at = row.find(": ");
    std::string ranking = row.substr(at + 2);
    // Rank separators must not read as markdown cell breaks.
    for (std::size_t bar = ranking.find(" | "); bar != std::string::npos;
         bar = ranking.find(" | ", bar))
      ranking.replace(bar, 3, " > ");
    os << "| " << row.substr(0, at) << " | " << ranking << " |\n";
  }
  return os.str();
}

namespace {

void section_ratios(std::ostringstream& os) {
  os << "## Common informative ratios\n\n| ratio | definition |\n| --- | --- |\n";
  for (const auto& [name, definition] : ratio_catalog())
    os << "| " << name << " | " << definition << " |\n";
  os << "\n";
}

void section_hidden_units(std::ostringstream& os, const ResultStore& store) {
  os << "## Hidden-unit search (case 1)\n\n";
  os << "| hidden units | test accuracy | train accuracy |\n| --- | --- | --- |\n";
  const std::map<Key, CellAccum> cells = collect(store, 1);
  if (cells.empty()) {
    no_data_row(os, 3);
  } else {
    // Label mlp-41x3 carries the width between the dash and the 'x'.
    std::map<std::string, CellAccum> by_width;
    for (const ExperimentResult& r : store.rows) {
      if (r.case_id != 1) continue;
      const std::size_t dash = r.arch.find('-');
      const std::size_t x = r.arch.find('x', dash);
      std::string width = dash == std::string::npos
                              ? r.arch
                              : r.arch.substr(dash + 1, x == std::string::npos ? x : x - dash - 1);
      by_width[width].test.push_back(r.test_acc);
      by_width[width].train.push_back(r.train_acc);
    }
    for (const auto& [width, acc] : by_width)
      os << "| " << width << " | " << fmt(SampleSummary::of(acc.test).mean, "%.4f") << " | "
         << fmt(SampleSummary::of(acc.train).mean, "%.4f") << " |\n";
  }
  os << "\n";
}

void section_all_features(std::ostringstream& os, const ResultStore& store) {
  os << "## Random-split accuracy on all features (case 2)\n\n";
  os << "| sector | arch | test mean | test std | train mean | train std |\n"
     << "| --- | --- | --- | --- | --- | --- |\n";
  const std::map<Key, CellAccum> cells = collect(store, 2);
  if (cells.empty()) {
    no_data_row(os, 6);
  } else {
    for (const auto& [key, cell] : cells) {
      const SampleSummary test = SampleSummary::of(cell.test);
      const SampleSummary train = SampleSummary::of(cell.train);
      os << "| " << key.sector << " | " << key.family << " | " << fmt(test.mean, "%.4f") << " | "
         << fmt(test.stddev, "%.4f") << " | " << fmt(train.mean, "%.4f") << " | "
         << fmt(train.stddev, "%.4f") << " |\n";
    }
  }
  os << "\n";
}

void section_ratio_vs_all(std::ostringstream& os, const ResultStore& store) {
  os << "## Selected ratios vs all features (cases 1-2, test set)\n\n";
  os << "| sector | case 1 mean | case 1 std | case 2 mean | case 2 std |\n"
     << "| --- | --- | --- | --- | --- |\n";
  const std::map<Key, CellAccum> c1 = collect(store, 1);
  const std::map<Key, CellAccum> c2 = collect(store, 2);
  bool any = false;
  for (const auto& [key, cell] : c1) {
    if (key.family != "mlp") continue;
    const auto other = c2.find(key);
    if (other == c2.end()) continue;
    const SampleSummary a = SampleSummary::of(cell.test);
    const SampleSummary b = SampleSummary::of(other->second.test);
    os << "| " << key.sector << " | " << fmt(a.mean, "%.4f") << " | " << fmt(a.stddev, "%.4f")
       << " | " << fmt(b.mean, "%.4f") << " | " << fmt(b.stddev, "%.4f") << " |\n";
    any = true;
  }
  if (!any) no_data_row(os, 5);
  os << "\n";
}

void section_yearly(std::ostringstream& os, const ResultStore& store) {
  os << "## Accuracy per held-out year (case 4)\n\n";
  const std::map<Key, CellAccum> cells = collect(store, 4);
  if (cells.empty()) {
    os << "| year |\n| --- |\n";
    no_data_row(os, 1);
    os << "\n";
    return;
  }
  const std::vector<std::string> families = families_of(cells);
  for (const std::string& sector : sectors_of(cells)) {
    // (year, family) -> accuracy; single sweep rows, averaged if repeated.
    std::map<std::string, std::map<std::string, std::vector<double>>> years;
    for (const ExperimentResult& r : store.rows)
      if (r.case_id == 4 && r.sector == sector)
        years[r.allocation][family_of(r.arch)].push_back(r.test_acc);
    os << "### " << sector << "\n\n| year |";
    for (const std::string& fam : families) os << " " << fam << " |";
    os << "\n| --- |";
    for (std::size_t i = 0; i < families.size(); ++i) os << " --- |";
    os << "\n";
    for (const auto& [year, per_family] : years) {
      os << "| " << year << " |";
      for (const std::string& fam : families) {
        const auto it = per_family.find(fam);
        if (it == per_family.end())
          os << " |";
        else
          os << " " << fmt(SampleSummary::of(it->second).mean, "%.4f") << " |";
      }
      os << "\n";
    }
    os << "\n";
  }
}

void section_case34(std::ostringstream& os, const ResultStore& store) {
  os << "## Random vs yearly allocation (cases 3-4, test set)\n\n";
  os << "| sector | arch | case 3 mean (std) | case 4 mean (std) |\n| --- | --- | --- | --- |\n";
  std::vector<ComparisonCell> cells = both_sided_cells(store);
  if (cells.empty()) {
    no_data_row(os, 4);
  } else {
    std::sort(cells.begin(), cells.end(), [](const ComparisonCell& a, const ComparisonCell& b) {
      if (a.sector != b.sector) return a.sector < b.sector;
      return family_before(a.arch, b.arch);
    });
    for (const ComparisonCell& c : cells)
      os << "| " << c.sector << " | " << c.arch << " | "
         << format_mean_std(c.case3.mean, c.case3.stddev) << " | "
         << format_mean_std(c.case4.mean, c.case4.stddev) << " |\n";
  }
  os << "\n";
}

void section_pvalues(std::ostringstream& os, const ResultStore& store) {
  os << "## One-sided Welch p-values (case 3 above case 4)\n\n";
  std::vector<ComparisonCell> cells = both_sided_cells(store);
  std::set<std::string> sectors;
  std::map<std::string, int> family_sides;
  for (const ComparisonCell& c : cells) {
    sectors.insert(c.sector);
    ++family_sides[c.arch];
  }
  // A rectangular grid only: every family present in every sector.
  for (const auto& [family, count] : family_sides)
    if (count != static_cast<int>(sectors.size())) cells.clear();
  if (cells.empty()) {
    os << "| arch |\n| --- |\n";
    no_data_row(os, 1);
  } else {
    os << render_ttest_grid(cells);
  }
  os << "\n";
}

void section_anova(std::ostringstream& os, const ResultStore& store) {
  os << "## Two-way ANOVA (sector x architecture, case 3)\n\n";
  std::string table;
  try {
    table = render_anova2(store, 3);
  } catch (const std::runtime_error&) {
    // Not estimable from these rows; the section reads as empty.
  }
  if (table.empty()) {
    os << "| effect | sum sq | df | F | p |\n| --- | --- | --- | --- | --- |\n";
    no_data_row(os, 5);
  } else {
    os << table;
  }
  os << "\n";
}

void section_ranks(std::ostringstream& os, const ResultStore& store, int case_id) {
  os << "## Architecture ranking (Tukey, case " << case_id << ")\n\n";
  std::string table;
  try {
    table = render_tukey_ranks(store, case_id);
  } catch (const std::runtime_error&) {
    // Degenerate groups (one family, zero variance) read as empty.
  }
  if (table.empty()) {
    os << "| sector | ranking (best first) |\n| --- | --- |\n";
    no_data_row(os, 2);
  } else {
    os << table;
  }
  os << "\n";
}

}  // namespace

std::string render_report(const ResultStore& store) {
  std::ostringstream os;
  os << "# Credit rating bench report\n\n";
  section_ratios(os);
  section_hidden_units(os, store);
  section_all_features(os, store);
  section_ratio_vs_all(os, store);
  section_yearly(os, store);
  section_case34(os, store);
  section_pvalues(os, store);
  section_anova(os, store);
  section_ranks(os, store, 3);
  section_ranks(os, store, 4);
  return os.str();
}

}  // namespace creditnn
