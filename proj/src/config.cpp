#include "creditnn/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "creditnn/errors.hpp"

namespace creditnn {
namespace {

using nlohmann::json;

void require_known_keys(const json& obj, const std::string& section,
                        const std::set<std::string>& known) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key()))
      throw ConfigError("config: unknown key " + section + "." + it.key());
}

const json& field(const json& obj, const std::string& section, const std::string& key) {
  return obj.at(key);  // caller checked contains()
}

double as_double(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError("config: " + where + " must be a number");
  return v.get<double>();
}

long long as_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError("config: " + where + " must be an integer");
  return v.get<long long>();
}

bool as_bool(const json& v, const std::string& where) {
  if (!v.is_boolean()) throw ConfigError("config: " + where + " must be true or false");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError("config: " + where + " must be a string");
  return v.get<std::string>();
}

SynthConfig parse_synth(const json& obj) {
  require_known_keys(obj, "synth",
                     {"preset", "sector", "n_companies", "year_start", "year_end", "n_features",
                      "n_classes", "ar_coefficient", "year_shock_sd", "idiosyncratic_sd",
                      "feature_noise_sd", "informative_fraction", "missing_rate", "rng_seed"});
  SynthConfig cfg;
  if (obj.contains("preset")) {
    const std::string name = as_string(obj["preset"], "synth.preset");
    bool found = false;
    for (const SynthConfig& p : paper_regime_presets())
      if (p.sector == name) {
        cfg = p;
        found = true;
      }
    if (!found) throw ConfigError("config: synth.preset '" + name + "' is not a known sector");
  }
  if (obj.contains("sector")) cfg.sector = as_string(obj["sector"], "synth.sector");
  if (obj.contains("n_companies"))
    cfg.n_companies = static_cast<Index>(as_int(obj["n_companies"], "synth.n_companies"));
  if (obj.contains("year_start"))
    cfg.year_start = static_cast<int>(as_int(obj["year_start"], "synth.year_start"));
  if (obj.contains("year_end"))
    cfg.year_end = static_cast<int>(as_int(obj["year_end"], "synth.year_end"));
  if (obj.contains("n_features"))
    cfg.n_features = static_cast<Index>(as_int(obj["n_features"], "synth.n_features"));
  if (obj.contains("n_classes"))
    cfg.n_classes = static_cast<Index>(as_int(obj["n_classes"], "synth.n_classes"));
  if (obj.contains("ar_coefficient"))
    cfg.ar_coefficient = as_double(obj["ar_coefficient"], "synth.ar_coefficient");
  if (obj.contains("year_shock_sd"))
    cfg.year_shock_sd = as_double(obj["year_shock_sd"], "synth.year_shock_sd");
  if (obj.contains("idiosyncratic_sd"))
    cfg.idiosyncratic_sd = as_double(obj["idiosyncratic_sd"], "synth.idiosyncratic_sd");
  if (obj.contains("feature_noise_sd"))
    cfg.feature_noise_sd = as_double(obj["feature_noise_sd"], "synth.feature_noise_sd");
  if (obj.contains("informative_fraction"))
    cfg.informative_fraction = as_double(obj["informative_fraction"], "synth.informative_fraction");
  if (obj.contains("missing_rate"))
    cfg.missing_rate = as_double(obj["missing_rate"], "synth.missing_rate");
  if (obj.contains("rng_seed"))
    cfg.rng_seed = static_cast<std::uint64_t>(as_int(obj["rng_seed"], "synth.rng_seed"));
  cfg.validate();
  return cfg;
}

CaseSpec parse_case(const json& obj) {
  require_known_keys(obj, "case",
                     {"case_id", "sector", "replicates", "seed", "fix_split", "standardize",
                      "test_fraction"});
  if (!obj.contains("case_id")) throw ConfigError("config: case.case_id is required");
  if (!obj.contains("sector")) throw ConfigError("config: case.sector is required");
  CaseSpec spec = case_spec(static_cast<int>(as_int(obj["case_id"], "case.case_id")),
                            as_string(obj["sector"], "case.sector"));
  if (obj.contains("replicates"))
    spec.replicates = static_cast<int>(as_int(obj["replicates"], "case.replicates"));
  if (obj.contains("seed"))
    spec.seed = static_cast<std::uint64_t>(as_int(obj["seed"], "case.seed"));
  if (obj.contains("fix_split")) spec.fix_split = as_bool(obj["fix_split"], "case.fix_split");
  if (obj.contains("standardize"))
    spec.standardize = as_bool(obj["standardize"], "case.standardize");
  if (obj.contains("test_fraction"))
    spec.split.test_fraction = as_double(obj["test_fraction"], "case.test_fraction");
  return spec;
}

void parse_train(const json& obj, TrainConfig& train) {
  require_known_keys(obj, "train",
                     {"learning_rate", "max_epochs", "batch_size", "dropout_rate",
                      "early_stop_patience", "early_stop_fraction"});
  if (obj.contains("learning_rate"))
    train.learning_rate = as_double(obj["learning_rate"], "train.learning_rate");
  if (obj.contains("max_epochs"))
    train.max_epochs = static_cast<Index>(as_int(obj["max_epochs"], "train.max_epochs"));
  if (obj.contains("batch_size"))
    train.batch_size = static_cast<Index>(as_int(obj["batch_size"], "train.batch_size"));
  if (obj.contains("dropout_rate"))
    train.dropout_rate = as_double(obj["dropout_rate"], "train.dropout_rate");
  if (obj.contains("early_stop_patience"))
    train.early_stop_patience =
        static_cast<Index>(as_int(obj["early_stop_patience"], "train.early_stop_patience"));
  if (obj.contains("early_stop_fraction"))
    train.early_stop_fraction = as_double(obj["early_stop_fraction"], "train.early_stop_fraction");
}

FieldMapping parse_mapping(const json& obj) {
  FieldMapping mapping;
  for (auto it = obj.begin(); it != obj.end(); ++it)
    mapping.columns[it.key()] = as_string(it.value(), "field_mapping." + it.key());
  mapping.validate();
  return mapping;
}

}  // namespace

BenchConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("config: top level must be an object");
  require_known_keys(root, "config", {"synth", "case", "train", "field_mapping", "panel"});

  BenchConfig cfg;
  if (root.contains("synth")) {
    if (!root["synth"].is_object()) throw ConfigError("config: synth must be an object");
    cfg.synth = parse_synth(root["synth"]);
  }
  if (root.contains("panel")) cfg.panel_path = as_string(root["panel"], "panel");
  if (root.contains("field_mapping")) {
    if (!root["field_mapping"].is_object())
      throw ConfigError("config: field_mapping must be an object");
    cfg.mapping = parse_mapping(root["field_mapping"]);
  }
  if (root.contains("case")) {
    if (!root["case"].is_object()) throw ConfigError("config: case must be an object");
    cfg.experiment = parse_case(root["case"]);
    if (root.contains("train")) {
      if (!root["train"].is_object()) throw ConfigError("config: train must be an object");
      parse_train(root["train"], cfg.experiment->train);
    }
    cfg.experiment->mapping = cfg.mapping;
    cfg.experiment->validate();
  } else if (root.contains("train")) {
    throw ConfigError("config: train requires a case section");
  }
  return cfg;
}

BenchConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  try {
    return parse_config(os.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace creditnn
