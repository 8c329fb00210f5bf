#pragma once

#include <optional>
#include <string>

#include "creditnn/experiment.hpp"
#include "creditnn/synth.hpp"

namespace creditnn {

// One experiment's structured config file. Sections are optional; unknown
// keys are rejected with the offending section.field named.
//
//   { "synth": { "preset": "energy", "n_features": 50, ... },
//     "panel": "out/energy.csv",
//     "case":  { "case_id": 3, "sector": "energy", "replicates": 15, ... },
//     "train": { "learning_rate": 0.05, "max_epochs": 200, ... },
//     "field_mapping": { "debt": "f001", ... } }
struct BenchConfig {
  std::optional<SynthConfig> synth;
  std::optional<CaseSpec> experiment;  // "case" + "train" + "field_mapping"
  std::string panel_path;              // "panel"
  FieldMapping mapping = default_field_mapping();  // "field_mapping"
};

// Parses and validates; ParseError for malformed text, ConfigError for
// unknown keys, wrong types, or invalid values.
BenchConfig parse_config(const std::string& text);
BenchConfig load_config(const std::string& path);  // IoError when unreadable

}  // namespace creditnn
