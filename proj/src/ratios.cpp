#include "creditnn/ratios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "creditnn/errors.hpp"

namespace creditnn {

const std::vector<std::string>& accounting_item_names() {
  static const std::vector<std::string> names = {
      "debt",           "total_debt",        "ebitda",
      "ffo",            "interest",          "cfo",
      "net_profit",     "nwc",               "revenue",
      "current_assets", "current_liabilities", "cash",
      "tangible_net_worth", "capital",       "total_assets",
      "total_fixed_capital", "total_fixed_assets", "equity",
      "retained_earnings"};
  return names;
}

const std::vector<std::string>& ratio_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (int i = 1; i <= kNumRatios; ++i) {
      char buf[8];
      std::snprintf(buf, sizeof(buf), "r%02d", i);
      v.emplace_back(buf);
    }
    return v;
  }();
  return names;
}

RatioVector compute_ratios(const AccountingFields& f) {
  RatioVector r;
  r.values = Eigen::VectorXd::Zero(kNumRatios);
  int at = 0;
  auto ratio = [&](double num, double den) {
    r.valid[static_cast<std::size_t>(at)] = den != 0.0;
    r.values[at] = den != 0.0 ? num / den : 0.0;
    ++at;
  };
  ratio(f.debt, f.ebitda);
  ratio(f.ffo, f.total_debt);
  ratio(f.ebitda, f.interest);
  ratio(f.ffo, f.interest);
  ratio(f.cfo, f.debt);
  ratio(f.ffo, f.net_profit);
  ratio(f.nwc, f.revenue);
  ratio(f.current_assets, f.current_liabilities);
  ratio(f.ffo + f.cash, f.current_liabilities);
  ratio(f.ebitda, f.revenue);
  ratio(f.cash, f.total_debt);
  ratio(f.total_debt, f.tangible_net_worth);
  ratio(f.total_debt, f.revenue);
  ratio(f.debt, f.capital);
  ratio(f.cash, f.total_assets);
  ratio(f.total_fixed_capital, f.total_fixed_assets);
  ratio(f.equity, f.total_assets);
  ratio(f.nwc, f.total_assets);
  ratio(f.retained_earnings, f.total_assets);
  ratio(f.ebitda, f.total_assets);
  return r;
}

void FieldMapping::validate() const {
  const std::vector<std::string>& items = accounting_item_names();
  for (const std::string& item : items)
    if (columns.find(item) == columns.end())
      throw ConfigError("field_mapping: accounting item '" + item + "' is not mapped");
  for (const auto& [item, column] : columns) {
    if (std::find(items.begin(), items.end(), item) == items.end())
      throw ConfigError("field_mapping: unknown accounting item '" + item + "'");
    if (column.empty()) throw ConfigError("field_mapping: empty column for item '" + item + "'");
  }
}

FieldMapping default_field_mapping() {
  FieldMapping m;
  const std::vector<std::string>& items = accounting_item_names();
  for (std::size_t i = 0; i < items.size(); ++i) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "f%03zu", i + 1);
    m.columns[items[i]] = buf;
  }
  return m;
}

Panel ratio_panel(const Panel& panel, const FieldMapping& mapping) {
  mapping.validate();
  const std::vector<std::string>& items = accounting_item_names();
  std::vector<Index> column_of(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    const std::string& column = mapping.columns.at(items[i]);
    const auto it = std::find(panel.feature_names.begin(), panel.feature_names.end(), column);
    if (it == panel.feature_names.end())
      throw ConfigError("field_mapping: column '" + column + "' for item '" + items[i] +
                        "' is not in the panel");
    column_of[i] = static_cast<Index>(it - panel.feature_names.begin());
  }

  Panel out;
  out.sector = panel.sector;
  out.feature_names = ratio_names();
  out.records.reserve(panel.records.size());
  for (const PanelRecord& rec : panel.records) {
    auto cell = [&](std::size_t item) {
      const double v = rec.features[column_of[item]];
      return std::isfinite(v) ? v : 0.0;  // unimputed missing reads as zero
    };
    AccountingFields f;
    std::size_t at = 0;
    f.debt = cell(at++);
    f.total_debt = cell(at++);
    f.ebitda = cell(at++);
    f.ffo = cell(at++);
    f.interest = cell(at++);
    f.cfo = cell(at++);
    f.net_profit = cell(at++);
    f.nwc = cell(at++);
    f.revenue = cell(at++);
    f.current_assets = cell(at++);
    f.current_liabilities = cell(at++);
    f.cash = cell(at++);
    f.tangible_net_worth = cell(at++);
    f.capital = cell(at++);
    f.total_assets = cell(at++);
    f.total_fixed_capital = cell(at++);
    f.total_fixed_assets = cell(at++);
    f.equity = cell(at++);
    f.retained_earnings = cell(at++);

    PanelRecord r;
    r.company_id = rec.company_id;
    r.sector = rec.sector;
    r.year = rec.year;
    r.quarter = rec.quarter;
    r.rating = rec.rating;
    r.features = compute_ratios(f).values;
    out.records.push_back(std::move(r));
  }
  return out;
}

}  // namespace creditnn
