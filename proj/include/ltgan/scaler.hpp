#pragma once

// Per-feature min-max scaling to [-1, 1]. Values outside the fitted range
// map outside [-1, 1]; nothing is clamped so the map stays invertible.

#include <array>
#include <span>
#include <string>

#include <Eigen/Core>

#include "json.hpp"
#include "ltgan/features.hpp"

namespace ltgan::pipeline {

struct ScalingSpec {
  std::array<double, kFeatureDim> min{};
  std::array<double, kFeatureDim> max{};
  std::string ordering{kFeatureOrdering};
  std::string fingerprint;

  double scale(std::size_t i, double x) const { return 2.0 * (x - min[i]) / (max[i] - min[i]) - 1.0; }
  double unscale(std::size_t i, double s) const { return min[i] + 0.5 * (s + 1.0) * (max[i] - min[i]); }
  // Half-width of feature i; converts raw differences to scaled units.
  double half_range(std::size_t i) const { return 0.5 * (max[i] - min[i]); }

  bool operator==(const ScalingSpec&) const = default;
};

// Throws DegenerateFeature naming the first constant column.
ScalingSpec fit_scaler(std::span<const FeatureVector> rows, std::string fingerprint = {});

FeatureVector apply_scaler(const ScalingSpec& spec, const FeatureVector& fv);
FeatureVector invert_scaler(const ScalingSpec& spec, const FeatureVector& scaled);

// Column-major batch layout: one sample per column.
Eigen::MatrixXd scaled_matrix(const ScalingSpec& spec, std::span<const FeatureVector> rows);
std::vector<FeatureVector> unscaled_rows(const ScalingSpec& spec, const Eigen::MatrixXd& scaled);

nlohmann::json to_json(const ScalingSpec& spec);
ScalingSpec scaling_from_json(const nlohmann::json& doc);

}  // namespace ltgan::pipeline
