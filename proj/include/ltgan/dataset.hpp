#pragma once

// Conventional data-generation workflow: pair sampling, impulsive search,
// transfer initialization with restarts, oracle labelling, feature
// extraction. Plus CSV/JSON persistence of the resulting dataset.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ltgan/catalog.hpp"
#include "ltgan/features.hpp"
#include "ltgan/oracle.hpp"
#include "ltgan/scaler.hpp"

namespace ltgan::pipeline {

inline constexpr std::string_view kOracleVersion = "analytic-lambert-v1";

struct PipelineConfig {
  PairFilter filter;
  SpacecraftModel spacecraft;
  OracleParams oracle;
  ImpulsiveGrid grid;
  double t_ref = 0.0;  // epoch at which the pair filter compares longitudes
  int n_restart = 5;
  std::size_t target_feasible = 100;
  std::size_t target_infeasible = 100;
  std::size_t max_attempts = 1'000'000;
  // Worker threads for candidate evaluation. Results merge in attempt order so
  // the dataset does not depend on this value.
  unsigned threads = 1;
};

nlohmann::json to_json(const PipelineConfig& config);
// Missing keys keep their defaults.
PipelineConfig pipeline_config_from_json(const nlohmann::json& doc);

struct DatasetRow {
  FeatureVector features;
  bool feasible = false;
  std::string from_id;
  std::string to_id;
  double t0 = 0.0;
  double dt_impls = 0.0;
};

struct Provenance {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string oracle_version{kOracleVersion};
  std::size_t n_attempted = 0;
  std::size_t n_feasible = 0;
  double convergence_rate = 0.0;
  nlohmann::json config;
};

struct Dataset {
  std::vector<DatasetRow> rows;
  std::optional<ScalingSpec> scaling;
  Provenance provenance;

  std::vector<FeatureVector> feasible_features() const;
  std::vector<FeatureVector> all_features() const;
  std::size_t count(bool feasible) const;
  // FNV-1a over the CSV body; stored in the ScalingSpec so consumers can check
  // they were fitted on the same data.
  std::string fingerprint() const;
};

// Evaluates one attempt: best of n_restart (m_i, dt_lt) draws for a sampled
// pair. A pair whose impulsive search fails or whose TOF window is empty is
// resampled.
struct AttemptResult {
  TransferCandidate candidate;
  FeasibilityReport report;
  FeatureVector features;
};
AttemptResult run_attempt(const Catalog& catalog, const PipelineConfig& config, Rng& rng,
                          astro::GravParam mu = {});

// Runs attempts until both target counts are met. The scaler is fitted on the
// feasible rows. Throws TargetUnreachable if max_attempts is exhausted.
Dataset generate_dataset(const Catalog& catalog, const PipelineConfig& config,
                         std::uint64_t seed, astro::GravParam mu = {});

std::string format_dataset_csv(const Dataset& dataset);
std::vector<DatasetRow> parse_dataset_csv(const std::string& text);
nlohmann::json dataset_metadata(const Dataset& dataset);

// Writes <dir>/dataset.csv and <dir>/dataset.meta.json.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

std::string format_features_csv(std::span<const FeatureVector> rows);
std::vector<FeatureVector> parse_features_csv(const std::string& text);

}  // namespace ltgan::pipeline
