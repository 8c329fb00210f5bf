#include "creditnn/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>

#include <CLI11.hpp>

#include "creditnn/config.hpp"
#include "creditnn/errors.hpp"
#include "creditnn/experiment.hpp"
#include "creditnn/report.hpp"
#include "creditnn/synth.hpp"

namespace creditnn {
namespace {

std::string default_out_dir() {
  const char* env = std::getenv("CREDITNN_OUT");
  return env && *env ? env : "out";
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

BenchConfig load_required_config(const std::string& path) {
  if (path.empty()) throw ConfigError("--config is required");
  return load_config(path);
}

std::string resolve_panel_path(const std::string& flag, const BenchConfig& cfg) {
  if (!flag.empty()) return flag;
  if (!cfg.panel_path.empty()) return cfg.panel_path;
  throw ConfigError("config: panel path required (panel key or --panel)");
}

struct SynthArgs {
  std::string config;
  std::string out = default_out_dir();
  std::int64_t seed = -1;
};

int cmd_synth(const SynthArgs& args) {
  BenchConfig cfg = load_required_config(args.config);
  if (!cfg.synth) throw ConfigError("config: synth section required for the synth command");
  if (args.seed >= 0) cfg.synth->rng_seed = static_cast<std::uint64_t>(args.seed);
  const SynthOutput out = generate(*cfg.synth);

  // The config's panel path, when given, is where `run` will look.
  std::filesystem::path panel_file = cfg.panel_path.empty()
                                         ? std::filesystem::path(args.out) /
                                               (cfg.synth->sector + ".csv")
                                         : std::filesystem::path(cfg.panel_path);
  if (panel_file.has_parent_path()) ensure_dir(panel_file.parent_path().string());
  const std::string panel_path = panel_file.string();
  save_panel(panel_path, out.panel);

  const std::string latent_path =
      (panel_file.parent_path() / (panel_file.stem().string() + "_latent.csv")).string();
  {
    std::ofstream file(latent_path, std::ios::binary);
    if (!file) throw IoError("cannot open " + latent_path + " for writing");
    file << "company_id,year,quarter,latent\n";
    for (std::size_t i = 0; i < out.panel.records.size(); ++i) {
      const PanelRecord& r = out.panel.records[i];
      file << r.company_id << "," << r.year << "," << r.quarter << ","
           << shortest(out.latent[i]) << "\n";
    }
  }

  std::map<std::string, long> histogram;
  long missing = 0;
  for (const PanelRecord& r : out.panel.records) {
    ++histogram[r.rating];
    for (Index f = 0; f < r.features.size(); ++f)
      if (std::isnan(r.features[f])) ++missing;
  }
  const LabelCodec codec = encode_labels(out.panel);

  std::printf("panel: %s\n", panel_path.c_str());
  std::printf("latent: %s\n", latent_path.c_str());
  std::printf("records: %td\n", out.panel.n_records());
  std::printf("classes:");
  for (const std::string& symbol : codec.symbols)
    std::printf(" %s:%ld", symbol.c_str(), histogram[symbol]);
  std::printf("\n");
  std::printf("missing: %ld\n", missing);
  return 0;
}

struct RatiosArgs {
  std::string config;
  std::string panel;
  std::string out = default_out_dir();
};

int cmd_ratios(const RatiosArgs& args) {
  const BenchConfig cfg = load_required_config(args.config);
  const Panel panel = load_panel(resolve_panel_path(args.panel, cfg));
  const Panel derived = ratio_panel(panel, cfg.mapping);

  ensure_dir(args.out);
  const std::string name = derived.sector.empty() ? "panel" : derived.sector;
  const std::string path = join(args.out, name + "_ratios.csv");
  save_panel(path, derived);

  std::printf("ratios: %s\n", path.c_str());
  std::printf("records: %td\n", derived.n_records());
  std::printf("features: %td\n", derived.n_features());
  return 0;
}

struct RunArgs {
  std::string config;
  std::string panel;
  std::string out = default_out_dir();
  std::int64_t seed = -1;
  int case_id = 0;
  std::string sector;
  std::string arch;
  int jobs = 1;
  bool timing = false;
};

int cmd_run(const RunArgs& args) {
  const BenchConfig cfg = load_required_config(args.config);
  if (!cfg.experiment) throw ConfigError("config: case section required for the run command");
  CaseSpec spec = *cfg.experiment;

  if (args.case_id != 0 || !args.sector.empty()) {
    CaseSpec fresh = case_spec(args.case_id != 0 ? args.case_id : spec.case_id,
                               !args.sector.empty() ? args.sector : spec.sector);
    fresh.train = spec.train;
    fresh.seed = spec.seed;
    fresh.replicates = spec.replicates;
    fresh.fix_split = spec.fix_split;
    fresh.standardize = spec.standardize;
    fresh.mapping = spec.mapping;
    spec = fresh;
  }
  if (args.seed >= 0) spec.seed = static_cast<std::uint64_t>(args.seed);
  spec.validate();

  RunOptions options;
  options.timing = args.timing;
  options.jobs = args.jobs;
  if (!args.arch.empty()) options.only_arch = arch_from_name(args.arch);
  options.on_result = [&](const ExperimentResult& r) {
    std::printf("case %d/%s/%s/%s: test %.4f train %.4f epochs %td\n", r.case_id,
                r.sector.c_str(), r.arch.c_str(), r.allocation.c_str(), r.test_acc, r.train_acc,
                r.epochs);
    std::fflush(stdout);
  };

  const Panel panel = load_panel(resolve_panel_path(args.panel, cfg));
  const ResultStore store = run_case(spec, panel, options);

  ensure_dir(args.out);
  const std::string path = join(args.out, "results_case" + std::to_string(spec.case_id) + "_" +
                                              spec.sector + ".csv");
  store.save_csv(path);
  std::printf("results: %s (%zu rows)\n", path.c_str(), store.rows.size());
  return 0;
}

struct StatsArgs {
  std::string mode;
  std::string results;
  std::string summary;
  int case_id = 3;
};

int cmd_stats(const StatsArgs& args) {
  if (args.mode == "ttest") {
    std::vector<ComparisonCell> cells;
    if (!args.summary.empty())
      cells = load_comparison_grid(args.summary);
    else if (!args.results.empty())
      cells = comparison_grid(ResultStore::load_csv(args.results));
    else
      throw ConfigError("stats: ttest needs --results or --summary");
    std::fputs(render_ttest_grid(cells).c_str(), stdout);
    return 0;
  }
  if (args.results.empty()) throw ConfigError("stats: --results is required");
  const ResultStore store = ResultStore::load_csv(args.results);
  if (args.mode == "anova2")
    std::fputs(render_anova2(store, args.case_id).c_str(), stdout);
  else
    std::fputs(render_tukey_ranks(store, args.case_id).c_str(), stdout);
  return 0;
}

struct ReportArgs {
  std::string results;
  std::string out = default_out_dir();
};

int cmd_report(const ReportArgs& args) {
  if (args.results.empty()) throw ConfigError("report: --results is required");
  const ResultStore store = ResultStore::load_csv(args.results);
  ensure_dir(args.out);
  const std::string path = join(args.out, "report.md");
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path + " for writing");
  file << render_report(store);
  file.close();
  std::printf("report: %s\n", path.c_str());
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"credit rating neural-network bench"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic panel");
  synth->add_option("--config", synth_args.config, "config file with a synth section")->required();
  synth->add_option("--out", synth_args.out, "output directory ($CREDITNN_OUT or ./out)");
  synth->add_option("--seed", synth_args.seed, "override synth.rng_seed");

  RatiosArgs ratios_args;
  CLI::App* ratios = app.add_subcommand("ratios", "derive the 20-ratio panel");
  ratios->add_option("--config", ratios_args.config, "config file")->required();
  ratios->add_option("--panel", ratios_args.panel, "panel CSV (defaults to config panel)");
  ratios->add_option("--out", ratios_args.out, "output directory ($CREDITNN_OUT or ./out)");

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "execute one experimental case");
  run->add_option("--config", run_args.config, "config file with a case section")->required();
  run->add_option("--panel", run_args.panel, "panel CSV (defaults to config panel)");
  run->add_option("--out", run_args.out, "output directory ($CREDITNN_OUT or ./out)");
  run->add_option("--seed", run_args.seed, "override case.seed");
  run->add_option("--case", run_args.case_id, "override case.case_id")
      ->check(CLI::Range(1, 4));
  run->add_option("--sector", run_args.sector, "override case.sector");
  run->add_option("--arch", run_args.arch, "run one architecture only")
      ->check(CLI::IsMember({"mlp", "cnn", "cnn2d", "lstm"}));
  run->add_option("--jobs", run_args.jobs, "parallel allocations")->check(CLI::PositiveNumber);
  run->add_flag("--timing", run_args.timing, "record wall-clock seconds per run");

  StatsArgs stats_args;
  CLI::App* stats = app.add_subcommand("stats", "statistical comparison tables");
  stats->add_option("--mode", stats_args.mode, "ttest, anova2, or tukey")
      ->required()
      ->check(CLI::IsMember({"ttest", "anova2", "tukey"}));
  stats->add_option("--results", stats_args.results, "results CSV from `run`");
  stats->add_option("--summary", stats_args.summary,
                    "published-summary CSV (ttest mode): sector,arch,case3_mean,...");
  stats->add_option("--case", stats_args.case_id, "case id for anova2/tukey")
      ->check(CLI::Range(1, 4));

  ReportArgs report_args;
  CLI::App* report = app.add_subcommand("report", "render the markdown report");
  report->add_option("--results", report_args.results, "results CSV from `run`")->required();
  report->add_option("--out", report_args.out, "output directory ($CREDITNN_OUT or ./out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (synth->parsed()) return cmd_synth(synth_args);
    if (ratios->parsed()) return cmd_ratios(ratios_args);
    if (run->parsed()) return cmd_run(run_args);
    if (stats->parsed()) return cmd_stats(stats_args);
    return cmd_report(report_args);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace creditnn
