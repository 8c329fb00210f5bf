#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "creditnn/panel.hpp"

namespace creditnn {

// Synthetic sector panel: AR(1) latent credit quality per company plus a
// sector-year shock shared by every company in the panel.
struct SynthConfig {
  std::string sector = "synthetic";
  Index n_companies = 0;
  int year_start = 0;
  int year_end = 0;  // inclusive
  Index n_features = 332;
  Index n_classes = 8;
  double ar_coefficient = 0.9;      // rho in [0,1)
  double year_shock_sd = 0.0;
  double idiosyncratic_sd = 1.0;
  double feature_noise_sd = 1.0;
  double informative_fraction = 0.25;
  double missing_rate = 0.0;
  std::uint64_t rng_seed = 0;

  Index n_years() const { return static_cast<Index>(year_end - year_start + 1); }
  Index n_records() const { return n_companies * n_years() * 4; }
  void validate() const;  // ConfigError naming the bad field
};

struct SynthOutput {
  Panel panel;
  std::vector<double> latent;       // per record, aligned with panel.records
  std::map<int, double> year_shock;
};

// s_{c,t} = rho * s_{c,t-1} + shock_{year(t)} + eps_{c,t}; ratings by
// equal-frequency binning of the latent over the whole panel (highest latent
// -> best rating); an informative_fraction of columns carry linear loadings
// of the latent plus noise, the rest are pure noise. Deterministic per seed.
SynthOutput generate(const SynthConfig& config);

// company_id,year,quarter,latent,rating rows for diagnostics.
void save_latents(const std::string& path, const SynthOutput& output);

// energy(30 companies, 2010-2016), financial(66, 2000-2016),
// healthcare(59, 2000-2016), 332 features each.
std::vector<SynthConfig> paper_regime_presets();

}  // namespace creditnn
