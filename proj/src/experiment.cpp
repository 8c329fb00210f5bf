#include "creditnn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include "creditnn/errors.hpp"
#include "creditnn/trainer.hpp"

namespace creditnn {
namespace {

const char* kCsvHeader = "case,sector,arch,allocation,train_acc,test_acc,epochs,seconds";

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_fixed3(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 3);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, std::size_t line_no, const char* what) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError("results line " + std::to_string(line_no) + ": bad " + what + " '" + s + "'");
  return v;
}

long parse_long(const std::string& s, std::size_t line_no, const char* what) {
  long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError("results line " + std::to_string(line_no) + ": bad " + what + " '" + s + "'");
  return v;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

auto row_key(const ExperimentResult& r) {
  return std::tie(r.case_id, r.sector, r.arch, r.allocation);
}

// Re-raise the in-flight exception with run coordinates prefixed, keeping its type.
[[noreturn]] void rethrow_with_context(const std::string& ctx) {
  auto tag = [&ctx](const std::exception& e) { return ctx + ": " + e.what(); };
  try {
    throw;
  } catch (const DimensionError& e) {
    throw DimensionError(tag(e));
  } catch (const ConfigError& e) {
    throw ConfigError(tag(e));
  } catch (const ParseError& e) {
    throw ParseError(tag(e));
  } catch (const IntegrityError& e) {
    throw IntegrityError(tag(e));
  } catch (const LabelError& e) {
    throw LabelError(tag(e));
  } catch (const SplitError& e) {
    throw SplitError(tag(e));
  } catch (const DataError& e) {
    throw DataError(tag(e));
  } catch (const NumericError& e) {
    throw NumericError(tag(e));
  } catch (const StateError& e) {
    throw StateError(tag(e));
  } catch (const EvalError& e) {
    throw EvalError(tag(e));
  } catch (const IoError& e) {
    throw IoError(tag(e));
  } catch (const std::exception& e) {
    throw std::runtime_error(tag(e));
  }
}

std::string roster_str(const std::vector<Arch>& archs) {
  std::string s;
  for (std::size_t i = 0; i < archs.size(); ++i) {
    if (i) s += ", ";
    s += arch_name(archs[i]);
  }
  return s;
}

void require_roster(const CaseSpec& spec, const std::vector<Arch>& want) {
  if (spec.architectures != want)
    throw ConfigError("case " + std::to_string(spec.case_id) + " runs exactly {" +
                      roster_str(want) + "}, got {" + roster_str(spec.architectures) + "}");
}

// Both halves of the split must tile the sample sequence exactly.
void check_partition(const SplitResult& split, std::size_t n, const std::string& ctx) {
  std::vector<char> seen(n, 0);
  auto mark = [&](const std::vector<Index>& idx) {
    for (Index i : idx) {
      if (i < 0 || static_cast<std::size_t>(i) >= n || seen[static_cast<std::size_t>(i)])
        throw IntegrityError(ctx + ": holdout isolation violated: bad or repeated sample index " +
                             std::to_string(i));
      seen[static_cast<std::size_t>(i)] = 1;
    }
  };
  mark(split.train);
  mark(split.test);
  for (std::size_t i = 0; i < n; ++i)
    if (!seen[i])
      throw IntegrityError(ctx + ": holdout isolation violated: sample " + std::to_string(i) +
                           " in neither half");
}

// Panel rows covered by the training windows; the only rows the scaler may see.
std::vector<Index> train_window_rows(const Panel& panel, const std::vector<WindowedSample>& samples,
                                     const std::vector<Index>& train, Index window) {
  std::map<std::tuple<std::string, int, int>, Index> target_row;
  for (std::size_t i = 0; i < panel.records.size(); ++i) {
    const PanelRecord& r = panel.records[i];
    target_row[{r.company_id, r.year, r.quarter}] = static_cast<Index>(i);
  }
  std::vector<char> keep(panel.records.size(), 0);
  for (Index si : train) {
    const WindowedSample& s = samples[static_cast<std::size_t>(si)];
    auto it = target_row.find({s.company_id, s.year, s.quarter});
    if (it == target_row.end())
      throw IntegrityError("windowed sample has no panel record for " + s.company_id);
    for (Index r = it->second - window + 1; r <= it->second; ++r) {
      if (r < 0 || panel.records[static_cast<std::size_t>(r)].company_id != s.company_id)
        throw IntegrityError("window for " + s.company_id + " reaches outside the company block");
      keep[static_cast<std::size_t>(r)] = 1;
    }
  }
  std::vector<Index> rows;
  for (std::size_t i = 0; i < keep.size(); ++i)
    if (keep[i]) rows.push_back(static_cast<Index>(i));
  return rows;
}

// Stacks the selected samples into the architecture's input layout. Every
// window is stored row-major (quarter, feature), which is byte-identical to
// each architecture's expected slice, so only the shape differs.
Dataset materialize(const ModelSpec& spec, const std::vector<WindowedSample>& samples,
                    const std::vector<Index>& rows) {
  if (rows.empty()) throw DataError("empty sample selection");
  const Index per = spec.window * spec.input_features;
  Tensor batch = Tensor::zeros(input_shape(spec, static_cast<Index>(rows.size())));
  Dataset ds;
  ds.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const WindowedSample& s = samples[static_cast<std::size_t>(rows[i])];
    batch.data.segment(static_cast<Index>(i) * per, per) = s.values.data;
    ds.labels.push_back(s.label);
  }
  ds.inputs = std::move(batch);
  return ds;
}

struct Allocation {
  std::string label;
  SplitResult split;
  std::uint64_t run_seed;
};

std::string replicate_label(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "r%02d", i);
  return buf;
}

}  // namespace

std::string feature_mode_name(FeatureMode m) {
  return m == FeatureMode::ratios20 ? "ratios20" : "all_features";
}

FeatureMode feature_mode_from_name(const std::string& name) {
  if (name == "ratios20") return FeatureMode::ratios20;
  if (name == "all_features") return FeatureMode::all_features;
  throw ConfigError("unknown feature mode '" + name + "'");
}

void CaseSpec::validate() const {
  if (case_id < 1 || case_id > 4)
    throw ConfigError("case_id must be 1..4, got " + std::to_string(case_id));
  if (sector.empty()) throw ConfigError("sector must be non-empty");
  train.validate();
  if (features != (case_id == 1 ? FeatureMode::ratios20 : FeatureMode::all_features))
    throw ConfigError("case " + std::to_string(case_id) + " uses " +
                      feature_mode_name(case_id == 1 ? FeatureMode::ratios20
                                                     : FeatureMode::all_features));
  const SplitPlan::Kind want_kind =
      case_id == 4 ? SplitPlan::Kind::leave_one_year_out : SplitPlan::Kind::random;
  if (split.kind != want_kind)
    throw ConfigError("case " + std::to_string(case_id) +
                      (case_id == 4 ? " sweeps held-out years" : " uses random splits"));
  switch (case_id) {
    case 1:
      require_roster(*this, {Arch::mlp});
      mapping.validate();
      break;
    case 2:
      require_roster(*this, {Arch::mlp, Arch::cnn});
      break;
    default:
      require_roster(*this, all_architectures());
      break;
  }
  if (case_id != 4) {
    if (replicates < 1)
      throw ConfigError("replicates must be >= 1, got " + std::to_string(replicates));
    if (!(split.test_fraction > 0.0) || !(split.test_fraction < 1.0))
      throw ConfigError("test_fraction must lie in (0,1)");
  }
}

CaseSpec case_spec(int case_id, const std::string& sector) {
  CaseSpec s;
  s.case_id = case_id;
  s.sector = sector;
  switch (case_id) {
    case 1:
      s.features = FeatureMode::ratios20;
      s.architectures = {Arch::mlp};
      s.mapping = default_field_mapping();
      break;
    case 2:
      s.architectures = {Arch::mlp, Arch::cnn};
      break;
    case 3:
      s.architectures = all_architectures();
      break;
    case 4:
      s.architectures = all_architectures();
      s.split.kind = SplitPlan::Kind::leave_one_year_out;
      break;
    default:
      throw ConfigError("case_id must be 1..4, got " + std::to_string(case_id));
  }
  return s;
}

void ResultStore::append(const ResultStore& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

void ResultStore::sort() {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ExperimentResult& a, const ExperimentResult& b) {
                     return row_key(a) < row_key(b);
                   });
}

void ResultStore::save_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write results file " + path);
  out << kCsvHeader << "\n";
  for (const ExperimentResult& r : rows) {
    out << r.case_id << "," << r.sector << "," << r.arch << "," << r.allocation << ","
        << format_double(r.train_acc) << "," << format_double(r.test_acc) << "," << r.epochs << ","
        << format_fixed3(r.seconds) << "\n";
  }
  if (!out) throw IoError("write failed for results file " + path);
}

ResultStore ResultStore::load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open results file " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("results file " + path + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader)
    throw ParseError("results file " + path + ": bad header '" + line + "'");
  ResultStore store;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> f = split_fields(line);
    if (f.size() != 8)
      throw ParseError("results line " + std::to_string(line_no) + ": expected 8 fields, got " +
                       std::to_string(f.size()));
    ExperimentResult r;
    r.case_id = static_cast<int>(parse_long(f[0], line_no, "case"));
    r.sector = f[1];
    r.arch = f[2];
    r.allocation = f[3];
    r.train_acc = parse_double(f[4], line_no, "train_acc");
    r.test_acc = parse_double(f[5], line_no, "test_acc");
    r.epochs = static_cast<Index>(parse_long(f[6], line_no, "epochs"));
    r.seconds = parse_double(f[7], line_no, "seconds");
    store.rows.push_back(std::move(r));
  }
  return store;
}

double evaluate(Network& model, const Dataset& data) {
  if (data.size() == 0) throw EvalError("empty evaluation set");
  return accuracy(predict(model, data.inputs), data.labels);
}

ResultStore run_case(const CaseSpec& spec, const Panel& panel) {
  return run_case(spec, panel, RunOptions{});
}

ResultStore run_case(const CaseSpec& spec, const Panel& panel, const RunOptions& options) {
  spec.validate();
  if (panel.records.empty()) throw DataError("run_case: empty panel");

  const Panel work = spec.features == FeatureMode::ratios20 ? ratio_panel(panel, spec.mapping)
                                                            : impute_zero(panel).panel;
  const LabelCodec codec = encode_labels(work);

  ResultStore store;
  for (Arch arch : spec.architectures) {
    if (options.only_arch && *options.only_arch != arch) continue;
    ModelSpec mspec = make_spec(arch, static_cast<Index>(work.n_features()),
                                static_cast<Index>(codec.size()));
    mspec.train = spec.train;
    const std::string arch_label = describe(mspec);

    std::vector<WindowedSample> samples;
    try {
      samples = make_windows(work, codec, mspec.window);
      if (samples.empty())
        throw DataError("no samples fit a window of " + std::to_string(mspec.window));
    } catch (...) {
      rethrow_with_context("case " + std::to_string(spec.case_id) + "/" + spec.sector + "/" +
                           arch_label);
    }

    std::vector<Allocation> allocations;
    if (spec.case_id == 4) {
      std::vector<std::pair<int, SplitResult>> sweep;
      try {
        sweep = year_sweep(samples);
      } catch (...) {
        rethrow_with_context("case 4/" + spec.sector + "/" + arch_label);
      }
      for (std::size_t k = 0; k < sweep.size(); ++k)
        allocations.push_back({std::to_string(sweep[k].first), std::move(sweep[k].second),
                               spec.seed + static_cast<std::uint64_t>(k)});
    } else {
      for (int i = 0; i < spec.replicates; ++i) {
        const std::uint64_t run_seed = spec.seed + static_cast<std::uint64_t>(i);
        const std::uint64_t split_seed = spec.fix_split ? spec.seed : run_seed;
        try {
          allocations.push_back({replicate_label(i),
                                 random_split(samples, spec.split.test_fraction, split_seed),
                                 run_seed});
        } catch (...) {
          rethrow_with_context("case " + std::to_string(spec.case_id) + "/" + spec.sector + "/" +
                               arch_label + "/" + replicate_label(i));
        }
      }
    }

    std::vector<ExperimentResult> results(allocations.size());
    std::vector<std::exception_ptr> failures(allocations.size());
    std::atomic<bool> stop{false};
    std::mutex hook_mutex;

    auto run_one = [&](std::size_t k) {
      const Allocation& alloc = allocations[k];
      const std::string ctx = "case " + std::to_string(spec.case_id) + "/" + spec.sector + "/" +
                              arch_label + "/" + alloc.label;
      try {
        try {
          check_partition(alloc.split, samples.size(), ctx);

          const std::vector<WindowedSample>* active = &samples;
          std::vector<WindowedSample> scaled_samples;
          if (spec.standardize) {
            const std::vector<Index> fit_rows =
                train_window_rows(work, samples, alloc.split.train, mspec.window);
            const FeatureScaler scaler = FeatureScaler::fit(work, fit_rows);
            scaled_samples = make_windows(scaler.apply(work), codec, mspec.window);
            if (scaled_samples.size() != samples.size())
              throw IntegrityError("standardization changed the sample count");
            active = &scaled_samples;
          }

          Dataset train_ds = materialize(mspec, *active, alloc.split.train);
          Dataset test_ds = materialize(mspec, *active, alloc.split.test);

          TrainConfig cfg = spec.train;
          cfg.rng_seed = alloc.run_seed;

          const auto t0 = std::chrono::steady_clock::now();
          TrainOutcome out = train(mspec, train_ds, cfg);
          const auto t1 = std::chrono::steady_clock::now();

          ExperimentResult r;
          r.case_id = spec.case_id;
          r.sector = spec.sector;
          r.arch = arch_label;
          r.allocation = alloc.label;
          r.train_acc = evaluate(out.model, train_ds);
          r.test_acc = evaluate(out.model, test_ds);
          r.epochs = out.history.epochs_run;
          r.seconds = options.timing ? std::chrono::duration<double>(t1 - t0).count() : 0.0;
          if (options.on_result) {
            std::lock_guard<std::mutex> lock(hook_mutex);
            options.on_result(r);
          }
          results[k] = std::move(r);
        } catch (...) {
          rethrow_with_context(ctx);
        }
      } catch (...) {
        failures[k] = std::current_exception();
        stop.store(true);
      }
    };

    const int jobs = std::max(1, options.jobs);
    if (jobs == 1 || allocations.size() <= 1) {
      for (std::size_t k = 0; k < allocations.size() && !stop.load(); ++k) run_one(k);
    } else {
      std::atomic<std::size_t> next{0};
      const std::size_t n_workers =
          std::min<std::size_t>(static_cast<std::size_t>(jobs), allocations.size());
      std::vector<std::thread> workers;
      workers.reserve(n_workers);
      for (std::size_t w = 0; w < n_workers; ++w)
        workers.emplace_back([&] {
          for (std::size_t k = next.fetch_add(1); k < allocations.size(); k = next.fetch_add(1)) {
            if (stop.load()) break;
            run_one(k);
          }
        });
      for (std::thread& t : workers) t.join();
    }
    for (std::size_t k = 0; k < allocations.size(); ++k)
      if (failures[k]) std::rethrow_exception(failures[k]);
    for (ExperimentResult& r : results) store.append(std::move(r));
  }
  store.sort();
  return store;
}

std::vector<SummaryRow> summarize(const ResultStore& store) {
  ResultStore sorted = store;
  sorted.sort();
  std::vector<SummaryRow> out;
  std::size_t i = 0;
  while (i < sorted.rows.size()) {
    std::size_t j = i;
    const ExperimentResult& head = sorted.rows[i];
    double test_sum = 0.0, train_sum = 0.0;
    while (j < sorted.rows.size() && sorted.rows[j].case_id == head.case_id &&
           sorted.rows[j].sector == head.sector && sorted.rows[j].arch == head.arch) {
      test_sum += sorted.rows[j].test_acc;
      train_sum += sorted.rows[j].train_acc;
      ++j;
    }
    const double n = static_cast<double>(j - i);
    SummaryRow row;
    row.case_id = head.case_id;
    row.sector = head.sector;
    row.arch = head.arch;
    row.n = static_cast<int>(j - i);
    row.test_mean = test_sum / n;
    row.train_mean = train_sum / n;
    if (row.n > 1) {
      double test_ss = 0.0, train_ss = 0.0;
      for (std::size_t k = i; k < j; ++k) {
        const double dt = sorted.rows[k].test_acc - row.test_mean;
        const double dr = sorted.rows[k].train_acc - row.train_mean;
        test_ss += dt * dt;
        train_ss += dr * dr;
      }
      row.test_std = std::sqrt(test_ss / (n - 1.0));
      row.train_std = std::sqrt(train_ss / (n - 1.0));
    }
    out.push_back(std::move(row));
    i = j;
  }
  return out;
}

std::string format_mean_std(double mean, double stddev) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f(%.4f)", mean, stddev);
  return buf;
}

}  // namespace creditnn
