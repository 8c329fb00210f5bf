#pragma once

#include <Eigen/Dense>

#include <array>
#include <map>
#include <string>
#include <vector>

#include "creditnn/panel.hpp"

namespace creditnn {

// The raw accounting items every ratio numerator/denominator draws from.
// Currency units, consistent within a panel.
struct AccountingFields {
  double debt = 0.0;
  double total_debt = 0.0;
  double ebitda = 0.0;
  double ffo = 0.0;
  double interest = 0.0;
  double cfo = 0.0;
  double net_profit = 0.0;
  double nwc = 0.0;
  double revenue = 0.0;
  double current_assets = 0.0;
  double current_liabilities = 0.0;
  double cash = 0.0;
  double tangible_net_worth = 0.0;
  double capital = 0.0;
  double total_assets = 0.0;
  double total_fixed_capital = 0.0;
  double total_fixed_assets = 0.0;
  double equity = 0.0;
  double retained_earnings = 0.0;
};

constexpr int kNumRatios = 20;

const std::vector<std::string>& accounting_item_names();  // declaration order above
const std::vector<std::string>& ratio_names();            // r01..r20

// The 20 common informative ratios; a zero denominator yields value 0.0 with
// the validity flag false.
struct RatioVector {
  Eigen::VectorXd values;             // length 20
  std::array<bool, kNumRatios> valid{};
};

RatioVector compute_ratios(const AccountingFields& f);

// Accounting item name -> panel feature column name.
struct FieldMapping {
  std::map<std::string, std::string> columns;

  void validate() const;  // ConfigError naming any missing or unknown item
};

// Items mapped in declaration order to the first 19 manifest columns
// f001..f019 (the synthetic default).
FieldMapping default_field_mapping();

// Derived panel whose 20 features are the ratios; keys, labels, and sector
// are preserved. Missing mapped cells are read as zero.
Panel ratio_panel(const Panel& panel, const FieldMapping& mapping);

}  // namespace creditnn
