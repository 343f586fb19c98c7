#pragma once

// Feed-forward feasibility classifier trained on oracle-labelled, scaled
// feature vectors. Used as the fast validation probe during GAN training.

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"
#include "ltgan/nn.hpp"

namespace ltgan::classifier {

using Real = float;
using Net = nn::DenseNet<Real>;

struct ClassifierConfig {
  nn::NetworkConfig net = default_network();
  double threshold = 0.5;  // p >= threshold counts as feasible
  int epochs = 60;
  int batch_size = 128;
  double train_fraction = 0.8;

  static nn::NetworkConfig default_network();
  void validate() const;
};

nlohmann::json to_json(const ClassifierConfig& config);
ClassifierConfig classifier_config_from_json(const nlohmann::json& doc);

struct Metrics {
  std::size_t n = 0;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

nlohmann::json to_json(const Metrics& metrics);

class Classifier {
 public:
  Classifier() = default;
  Classifier(Net net, double threshold);

  // Probabilities for a 22 x N scaled batch.
  Eigen::VectorXd predict_proba(const Eigen::MatrixXd& scaled) const;
  // p >= tau per column.
  std::vector<bool> predict_feasible(const Eigen::MatrixXd& scaled, double tau) const;
  std::vector<bool> predict_feasible(const Eigen::MatrixXd& scaled) const {
    return predict_feasible(scaled, threshold_);
  }
  // Fraction of columns predicted feasible at the stored threshold.
  double feasible_fraction(const Eigen::MatrixXd& scaled) const;

  const Net& net() const { return net_; }
  double threshold() const { return threshold_; }

  nlohmann::json to_json(std::uint64_t seed = 0) const;
  static Classifier from_json(const nlohmann::json& doc);
  void save(const std::filesystem::path& path, std::uint64_t seed = 0) const;
  static Classifier load(const std::filesystem::path& path);

 private:
  Net net_;
  double threshold_ = 0.5;
};

Metrics evaluate(const Classifier& model, const Eigen::MatrixXd& scaled,
                 const std::vector<bool>& labels);

struct TrainResult {
  Classifier model;
  Metrics train_metrics;
  Metrics held_out;
  std::vector<double> loss_history;  // mean BCE per epoch
  std::size_t n_balanced = 0;        // rows kept after undersampling
};

// Undersamples the majority class to balance labels, splits 80/20 stratified
// per class, and trains with BCE and Adam. Throws SingleClass when either
// label is absent.
TrainResult train_classifier(const Eigen::MatrixXd& scaled, const std::vector<bool>& labels,
                             const ClassifierConfig& config, std::uint64_t seed);

}  // namespace ltgan::classifier
