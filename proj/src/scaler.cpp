#include "ltgan/scaler.hpp"

#include <cmath>
#include <limits>

#include "ltgan/error.hpp"

namespace ltgan::pipeline {

ScalingSpec fit_scaler(std::span<const FeatureVector> rows, std::string fingerprint) {
  if (rows.empty()) throw Error(Errc::InvalidArgument, "cannot fit a scaler on no rows");
  ScalingSpec spec;
  spec.fingerprint = std::move(fingerprint);
  spec.min.fill(std::numeric_limits<double>::infinity());
  spec.max.fill(-std::numeric_limits<double>::infinity());
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < kFeatureDim; ++i) {
      spec.min[i] = std::min(spec.min[i], row[i]);
      spec.max[i] = std::max(spec.max[i], row[i]);
    }
  }
  for (std::size_t i = 0; i < kFeatureDim; ++i) {
    if (!(spec.max[i] > spec.min[i]) || !std::isfinite(spec.max[i] - spec.min[i])) {
      throw Error(Errc::DegenerateFeature,
                  "feature " + std::string(feature_names()[i]) + " has no spread");
    }
  }
  return spec;
}

FeatureVector apply_scaler(const ScalingSpec& spec, const FeatureVector& fv) {
  FeatureVector out;
  for (std::size_t i = 0; i < kFeatureDim; ++i) out[i] = spec.scale(i, fv[i]);
  return out;
}

FeatureVector invert_scaler(const ScalingSpec& spec, const FeatureVector& scaled) {
  FeatureVector out;
  for (std::size_t i = 0; i < kFeatureDim; ++i) out[i] = spec.unscale(i, scaled[i]);
  return out;
}

Eigen::MatrixXd scaled_matrix(const ScalingSpec& spec, std::span<const FeatureVector> rows) {
  Eigen::MatrixXd out(kFeatureDim, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t c = 0; c < rows.size(); ++c) {
    for (std::size_t i = 0; i < kFeatureDim; ++i) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = spec.scale(i, rows[c][i]);
    }
  }
  return out;
}

std::vector<FeatureVector> unscaled_rows(const ScalingSpec& spec, const Eigen::MatrixXd& scaled) {
  if (scaled.rows() != static_cast<Eigen::Index>(kFeatureDim)) {
    throw Error(Errc::DimensionMismatch, "expected 22 feature rows");
  }
  std::vector<FeatureVector> out(static_cast<std::size_t>(scaled.cols()));
  for (Eigen::Index c = 0; c < scaled.cols(); ++c) {
    for (std::size_t i = 0; i < kFeatureDim; ++i) {
      out[static_cast<std::size_t>(c)][i] = spec.unscale(i, scaled(static_cast<Eigen::Index>(i), c));
    }
  }
  return out;
}

nlohmann::json to_json(const ScalingSpec& spec) {
  nlohmann::json features = nlohmann::json::array();
  for (std::size_t i = 0; i < kFeatureDim; ++i) {
    features.push_back({{"name", feature_names()[i]}, {"min", spec.min[i]}, {"max", spec.max[i]}});
  }
  return {{"ordering", spec.ordering}, {"fingerprint", spec.fingerprint}, {"features", features}};
}

ScalingSpec scaling_from_json(const nlohmann::json& doc) {
  ScalingSpec spec;
  spec.ordering = doc.at("ordering").get<std::string>();
  spec.fingerprint = doc.at("fingerprint").get<std::string>();
  if (spec.ordering != kFeatureOrdering) {
    throw Error(Errc::ParseError, "scaling spec uses feature ordering '" + spec.ordering + "'");
  }
  const auto& features = doc.at("features");
  if (features.size() != kFeatureDim) {
    throw Error(Errc::ParseError, "scaling spec must list 22 features");
  }
  for (std::size_t i = 0; i < kFeatureDim; ++i) {
    spec.min[i] = features[i].at("min").get<double>();
    spec.max[i] = features[i].at("max").get<double>();
    if (!(spec.max[i] > spec.min[i])) {
      throw Error(Errc::DegenerateFeature, "feature " + std::string(feature_names()[i]) +
                                               " has max <= min");
    }
  }
  return spec;
}

}  // namespace ltgan::pipeline
