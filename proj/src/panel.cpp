#include "creditnn/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <tuple>

#include "creditnn/errors.hpp"

namespace creditnn {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  out.push_back(std::move(field));
  return out;
}

int parse_int(const std::string& s, const std::string& what, std::size_t line_no) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError("line " + std::to_string(line_no) + ": bad " + what + " '" + s + "'");
  return v;
}

double parse_feature(const std::string& s, std::size_t line_no) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError("line " + std::to_string(line_no) + ": bad feature value '" + s + "'");
  return v;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::tuple<const std::string&, int, int> record_key(const PanelRecord& r) {
  return {r.company_id, r.year, r.quarter};
}

}  // namespace

void Panel::sort_records() {
  std::stable_sort(records.begin(), records.end(), [](const PanelRecord& a, const PanelRecord& b) {
    return record_key(a) < record_key(b);
  });
}

void Panel::validate() const {
  const Index f = n_features();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const PanelRecord& r = records[i];
    if (r.features.size() != f)
      throw IntegrityError("panel: record " + r.company_id + " " + std::to_string(r.year) + "Q" +
                           std::to_string(r.quarter) + " has " + std::to_string(r.features.size()) +
                           " features, expected " + std::to_string(f));
    if (r.quarter < 1 || r.quarter > 4)
      throw IntegrityError("panel: record " + r.company_id + " " + std::to_string(r.year) +
                           " has quarter " + std::to_string(r.quarter));
    if (i > 0) {
      const PanelRecord& p = records[i - 1];
      if (record_key(p) == record_key(r))
        throw IntegrityError("panel: duplicate key (" + r.company_id + ", " +
                             std::to_string(r.year) + ", " + std::to_string(r.quarter) + ")");
      if (record_key(r) < record_key(p))
        throw IntegrityError("panel: records not sorted at " + r.company_id);
    }
  }
}

Panel load_panel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open panel file " + path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": missing header");
  std::vector<std::string> header = split_csv_line(line);
  const std::vector<std::string> fixed = {"company_id", "sector", "year", "quarter", "rating"};
  if (header.size() < fixed.size())
    throw ParseError(path + ": header has " + std::to_string(header.size()) + " columns");
  for (std::size_t i = 0; i < fixed.size(); ++i)
    if (header[i] != fixed[i])
      throw ParseError(path + ": header column " + std::to_string(i + 1) + " is '" + header[i] +
                       "', expected '" + fixed[i] + "'");

  Panel panel;
  panel.feature_names.assign(header.begin() + static_cast<std::ptrdiff_t>(fixed.size()),
                             header.end());
  const std::size_t width = header.size();

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != width)
      throw ParseError("line " + std::to_string(line_no) + ": " + std::to_string(fields.size()) +
                       " columns, expected " + std::to_string(width));
    PanelRecord r;
    r.company_id = fields[0];
    r.sector = fields[1];
    r.year = parse_int(fields[2], "year", line_no);
    r.quarter = parse_int(fields[3], "quarter", line_no);
    if (r.quarter < 1 || r.quarter > 4)
      throw ParseError("line " + std::to_string(line_no) + ": quarter " + fields[3] +
                       " out of range 1..4");
    r.rating = fields[4];
    if (r.company_id.empty() || r.rating.empty())
      throw ParseError("line " + std::to_string(line_no) + ": empty company_id or rating");
    r.features.resize(static_cast<Index>(width - fixed.size()));
    for (std::size_t j = fixed.size(); j < width; ++j)
      r.features[static_cast<Index>(j - fixed.size())] = parse_feature(fields[j], line_no);
    panel.records.push_back(std::move(r));
  }
  if (!panel.records.empty()) panel.sector = panel.records.front().sector;
  panel.sort_records();
  panel.validate();  // duplicate keys surface here as integrity errors
  return panel;
}

void save_panel(const std::string& path, const Panel& panel) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write panel file " + path);
  out << "company_id,sector,year,quarter,rating";
  for (const std::string& name : panel.feature_names) out << "," << name;
  out << "\n";
  for (const PanelRecord& r : panel.records) {
    out << r.company_id << "," << r.sector << "," << r.year << "," << r.quarter << ","
        << r.rating;
    for (Index j = 0; j < r.features.size(); ++j) {
      out << ",";
      if (std::isfinite(r.features[j])) out << format_double(r.features[j]);
    }
    out << "\n";
  }
  if (!out) throw IoError("failed writing panel file " + path);
}

ImputeResult impute_zero(const Panel& panel) {
  ImputeResult result;
  result.panel = panel;
  result.missing_per_feature.assign(static_cast<std::size_t>(panel.n_features()), 0);
  for (PanelRecord& r : result.panel.records)
    for (Index j = 0; j < r.features.size(); ++j)
      if (!std::isfinite(r.features[j])) {
        r.features[j] = 0.0;
        ++result.missing_per_feature[static_cast<std::size_t>(j)];
        ++result.missing_cells;
      }
  return result;
}

FeatureScaler FeatureScaler::fit(const Panel& train) {
  std::vector<Index> rows(train.records.size());
  std::iota(rows.begin(), rows.end(), Index{0});
  return fit(train, rows);
}

FeatureScaler FeatureScaler::fit(const Panel& train, const std::vector<Index>& rows) {
  if (rows.empty()) throw DataError("standardize: no rows to fit on");
  const Index f = train.n_features();
  const Index n = static_cast<Index>(rows.size());
  FeatureScaler s;
  s.mean = Eigen::VectorXd::Zero(f);
  s.std_dev = Eigen::VectorXd::Zero(f);
  for (Index i : rows) {
    const Eigen::VectorXd& v = train.records.at(static_cast<std::size_t>(i)).features;
    if (!v.allFinite()) throw DataError("standardize: non-finite feature value; impute first");
    s.mean += v;
  }
  s.mean /= static_cast<double>(n);
  if (n > 1) {
    for (Index i : rows) {
      const Eigen::VectorXd& v = train.records.at(static_cast<std::size_t>(i)).features;
      s.std_dev += (v - s.mean).cwiseAbs2();
    }
    s.std_dev = (s.std_dev / static_cast<double>(n - 1)).cwiseSqrt();
  }
  return s;
}

Panel FeatureScaler::apply(const Panel& panel) const {
  if (panel.n_features() != mean.size())
    throw DimensionError("standardize: panel has " + std::to_string(panel.n_features()) +
                         " features, scaler " + std::to_string(mean.size()));
  Panel out = panel;
  for (PanelRecord& r : out.records)
    for (Index j = 0; j < r.features.size(); ++j)
      r.features[j] = std_dev[j] > 0.0 ? (r.features[j] - mean[j]) / std_dev[j] : 0.0;
  return out;
}

const std::vector<std::string>& sp_rating_ladder() {
  static const std::vector<std::string> ladder = {
      "AAA", "AA+", "AA", "AA-", "A+",   "A",   "A-",   "BBB+", "BBB", "BBB-", "BB+",
      "BB",  "BB-", "B+", "B",   "B-",   "CCC+", "CCC", "CCC-", "CC",  "C",    "D"};
  return ladder;
}

int LabelCodec::index_of(const std::string& symbol) const {
  for (std::size_t i = 0; i < symbols.size(); ++i)
    if (symbols[i] == symbol) return static_cast<int>(i);
  throw LabelError("unknown rating symbol '" + symbol + "'");
}

const std::string& LabelCodec::symbol_of(int index) const {
  if (index < 0 || index >= static_cast<int>(symbols.size()))
    throw LabelError("class index " + std::to_string(index) + " out of range 0.." +
                     std::to_string(symbols.size() - 1));
  return symbols[static_cast<std::size_t>(index)];
}

LabelCodec encode_labels(const Panel& panel) {
  if (panel.records.empty()) throw DataError("encode_labels: empty panel");
  const std::vector<std::string>& ladder = sp_rating_ladder();
  std::vector<char> present(ladder.size(), 0);
  for (const PanelRecord& r : panel.records) {
    const auto it = std::find(ladder.begin(), ladder.end(), r.rating);
    if (it == ladder.end()) throw LabelError("unknown rating symbol '" + r.rating + "'");
    present[static_cast<std::size_t>(it - ladder.begin())] = 1;
  }
  LabelCodec codec;
  for (std::size_t i = 0; i < ladder.size(); ++i)
    if (present[i]) codec.symbols.push_back(ladder[i]);
  return codec;
}

namespace {

bool adjacent_quarters(const PanelRecord& prev, const PanelRecord& next) {
  if (prev.company_id != next.company_id) return false;
  if (prev.year == next.year) return next.quarter == prev.quarter + 1;
  return next.year == prev.year + 1 && prev.quarter == 4 && next.quarter == 1;
}

}  // namespace

std::vector<WindowedSample> make_windows(const Panel& panel, const LabelCodec& codec,
                                         Index window) {
  if (window <= 0) throw ConfigError("make_windows: window must be positive");
  panel.validate();
  const Index f = panel.n_features();
  std::vector<WindowedSample> samples;
  Index run = 0;  // consecutive same-company quarters ending at i
  for (std::size_t i = 0; i < panel.records.size(); ++i) {
    const PanelRecord& r = panel.records[i];
    run = (i > 0 && adjacent_quarters(panel.records[i - 1], r)) ? run + 1 : 1;
    if (run < window) continue;
    WindowedSample s;
    s.company_id = r.company_id;
    s.year = r.year;
    s.quarter = r.quarter;
    s.label = codec.index_of(r.rating);
    s.values = Tensor::zeros({window, f});
    for (Index w = 0; w < window; ++w) {
      const PanelRecord& src = panel.records[i - static_cast<std::size_t>(window - 1 - w)];
      s.values.data.segment(w * f, f) = src.features;
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace creditnn
