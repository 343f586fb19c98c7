#pragma once

// Evaluation of generated feature vectors: oracle convergence rate,
// physical-consistency residual, and distribution diagnostics against the
// real feasible set.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "ltgan/classifier.hpp"
#include "ltgan/dataset.hpp"
#include "ltgan/features.hpp"
#include "ltgan/stats.hpp"

namespace ltgan::eval {

using pipeline::FeatureVector;
using pipeline::kFeatureDim;

struct ConvergenceReport {
  std::size_t n_samples = 0;
  std::size_t n_feasible = 0;
  double oracle_rate = 0.0;
  std::optional<double> classifier_rate;
  double baseline_rate = 0.0;
  double lift = 0.0;  // oracle_rate / baseline_rate, 0 when no baseline
  double mean_residual = 0.0;
  double max_residual = 0.0;
  std::size_t n_clamped_mass = 0;
  std::size_t n_clamped_tof = 0;
  std::size_t n_invalid_elements = 0;
  std::size_t n_lambert_failures = 0;
  std::size_t n_propellant = 0;
  std::size_t n_thrust = 0;
  std::vector<bool> feasible;  // per sample
};

nlohmann::json to_json(const ConvergenceReport& report);

// Largest |stored - recomputed| over the redundant columns, in scaled units.
double consistency_residual(const FeatureVector& fv, const pipeline::ScalingSpec& scaling,
                            astro::GravParam mu = {});

struct EvalOptions {
  pipeline::SpacecraftModel spacecraft;
  pipeline::OracleParams oracle;
  double baseline_rate = 0.0;
  unsigned threads = 1;
};

// Feasibility uses only (m_i, dt_lt, mee1, mee2). m_i is clamped to the
// spacecraft mass range and dt_lt to [1, kMaxTofDays]; invalid elements and
// Lambert failures count as infeasible. When clf is given, the classifier
// rate on the scaled samples is reported too.
ConvergenceReport evaluate_generated(std::span<const FeatureVector> samples,
                                     const pipeline::ScalingSpec& scaling, const EvalOptions& options,
                                     const classifier::Classifier* clf = nullptr,
                                     astro::GravParam mu = {});

struct FeatureDistribution {
  std::string name;
  stats::BoxStats box;
  double hist_lo = 0.0, hist_hi = 0.0;  // reference range
  std::vector<std::size_t> histogram;
  double ks = 0.0;
  double coverage = 0.0;  // share of reference-occupied bins hit by samples
};

struct DistributionReport {
  std::size_t n_samples = 0;
  std::size_t n_reference = 0;
  std::array<FeatureDistribution, kFeatureDim> features;
  std::array<stats::BoxStats, kFeatureDim> reference_box;
};

nlohmann::json to_json(const DistributionReport& report);

// Unscaled samples and reference; histograms use 20 bins over the reference
// range.
DistributionReport distribution_report(std::span<const FeatureVector> samples,
                                       std::span<const FeatureVector> reference,
                                       std::size_t n_bins = 20);

// Min/Max/Mean/Median rows over the eight overview columns
// (dt_lt, m_i, dp, df, dg, dh, dk, dL).
std::string format_overview_csv(const DistributionReport& report);
// One row per feature: box-plot statistics for samples and reference.
std::string format_box_csv(const DistributionReport& report);
std::string format_histogram_csv(const DistributionReport& report);
// Scaled overview columns, one row per sample, for scatter-matrix plots.
std::string format_scatter_csv(std::span<const FeatureVector> samples,
                               const pipeline::ScalingSpec& scaling);

struct FeatureGap {
  std::string name;
  double median_gap_a = 0.0;
  double median_gap_b = 0.0;
  double coverage_a = 0.0;
  double coverage_b = 0.0;
};

struct Comparison {
  std::vector<FeatureGap> features;  // overview columns
  double mean_gap_a = 0.0, mean_gap_b = 0.0;
  double mean_coverage_a = 0.0, mean_coverage_b = 0.0;
  // "a", "b" or "tie": lower mean median gap and higher coverage.
  std::string closer;
};

nlohmann::json to_json(const Comparison& comparison);

// Both reports must share the same reference. Median gaps are normalised by
// the reference interquartile range so features are comparable.
Comparison compare_runs(const DistributionReport& a, const DistributionReport& b);

}  // namespace ltgan::eval
