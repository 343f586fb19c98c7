#pragma once

// Budgeted grid search over GAN hyperparameters. Trials run in
// deterministic grid order with per-trial seeds; only Healthy trials are
// ranked.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ltgan/eval.hpp"
#include "ltgan/gan.hpp"

namespace ltgan::search {

using gan::GanConfig;

// Inclusive arithmetic range lo, lo + step, ... <= hi (with rounding slack).
std::vector<double> arange(double lo, double hi, double step);

struct AxisSpec {
  std::vector<int> layers;
  std::vector<int> neurons;
  std::vector<double> dropout;
  std::vector<double> learning_rate;
};

struct GridSpec {
  AxisSpec gen;
  AxisSpec dis;
  GanConfig base;  // everything not swept
  std::size_t budget = 12;
  int epoch_cap = 200;
  int n_samples = 1000;  // oracle-evaluated samples per trial

  // Full ranges: layers [5, 30] / [4, 10] step 2, neurons [100, 300] /
  // [200, 400] step 50, dropout [0, 0.8] step 0.1, learning rate
  // [1e-5, 3e-4] step 5e-5.
  static GridSpec full_ranges();
  std::size_t size() const;
  // Trial i in row-major order over (gen L, n, drop, lr, dis L, n, drop, lr).
  GanConfig trial_config(std::size_t index, std::uint64_t master_seed) const;
  void validate() const;
};

nlohmann::json to_json(const GridSpec& spec);
GridSpec grid_spec_from_json(const nlohmann::json& doc);

struct TrialResult {
  std::size_t trial = 0;
  GanConfig config;
  gan::Outcome outcome = gan::Outcome::Completed;
  gan::Verdict verdict = gan::Verdict::Healthy;
  double oracle_rate = 0.0;
  double classifier_rate = 0.0;
  double s_gen = 0.0;  // mean over the final (up to 10) epochs
  double s_dis = 0.0;
  double mean_coverage = 0.0;
  int epochs_run = 0;
};

struct SearchResult {
  std::vector<TrialResult> trials;  // grid order
  std::vector<std::size_t> ranked;  // indices into trials, Healthy only
  std::string diagnostics;          // set when nothing is ranked
};

struct SearchContext {
  Eigen::MatrixXd real_scaled;  // 22 x N feasible rows
  pipeline::ScalingSpec scaling;
  const classifier::Classifier* classifier = nullptr;
  eval::EvalOptions eval;
};

using TrialCallback = std::function<void(const TrialResult&)>;

// Runs min(budget, size) trials; trial i trains with seed mix_seed(seed, i).
SearchResult run_grid(const GridSpec& grid, const SearchContext& context, std::uint64_t seed,
                      const TrialCallback& on_trial = {});

// trial,params...,verdict,oracle_rate,s_gen,s_dis plus a rank column.
std::string format_trials_csv(const SearchResult& result);

}  // namespace ltgan::search
