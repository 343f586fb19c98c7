#pragma once

// Adversarial trainer: generator and discriminator construction, the
// minibatch training loop, batch scores, per-epoch validation with the
// feasibility classifier, and collapse/divergence detection.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"
#include "ltgan/classifier.hpp"
#include "ltgan/features.hpp"
#include "ltgan/nn.hpp"
#include "ltgan/scaler.hpp"

namespace ltgan::gan {

using pipeline::FeatureVector;
using pipeline::kFeatureDim;
using pipeline::feature_names;

using Real = float;
using Net = nn::DenseNet<Real>;
using Matrix = Eigen::MatrixXf;

enum class Verdict { Healthy, ModeCollapse, Diverged };
std::string_view to_string(Verdict verdict);

struct Thresholds {
  double coverage = 0.6;          // mean coverage below this is collapse
  double divergence_floor = 0.2;  // validation accuracy below this diverges
  int warmup_epochs = 20;         // no verdict acts before this many epochs
  int patience = 5;               // consecutive collapse validations to stop
  int n_bins = 20;
  // Health telemetry only; never used to stop training.
  double s_gen_lo = 0.3, s_gen_hi = 0.4;
  double s_dis_lo = 0.6, s_dis_hi = 0.7;
};

struct GanConfig {
  nn::NetworkConfig gen;
  nn::NetworkConfig dis;
  int noise_dim = 64;
  int batch_size = 128;
  int n_epochs = 200;
  double flip_factor = 0.05;  // fraction of real labels flipped per batch
  double adam_beta1 = 0.5;    // shared by both optimizers
  Thresholds thresholds;
  int n_val = 1000;  // generated samples per validation
  std::uint64_t seed = 0;

  // Best observed configuration: deep thin generator, shallow wide
  // discriminator.
  static GanConfig best_observed();
  // Destabilized variant known to collapse.
  static GanConfig collapse_prone();
  // Shallow configuration that trains on desk-scale datasets.
  static GanConfig desk();

  void validate() const;
};

nlohmann::json to_json(const GanConfig& config);
GanConfig gan_config_from_json(const nlohmann::json& doc);

// i.i.d. standard normal M x N matrix.
Matrix sample_noise(int m, int n, Rng& rng);

struct Scores {
  double s_gen = 0.0;
  double s_dis = 0.0;
};

// s_gen = mean(y_gen); s_dis = (mean(y_real) + 1 - s_gen) / 2.
template <typename A, typename B>
Scores compute_scores(const Eigen::DenseBase<A>& y_real, const Eigen::DenseBase<B>& y_gen) {
  if (y_real.size() == 0 || y_real.size() != y_gen.size()) {
    throw Error(Errc::DimensionMismatch, "score batches must be non-empty and equal length");
  }
  Scores s;
  s.s_gen = static_cast<double>(y_gen.template cast<double>().mean());
  s.s_dis = 0.5 * static_cast<double>(y_real.template cast<double>().mean()) + 0.5 * (1.0 - s.s_gen);
  return s;
}

// Iterations between validations: floor(N_train / N_b).
std::size_t validation_cadence(std::size_t n_train, std::size_t n_b);

struct StepMetrics {
  std::uint64_t iter = 0;
  int epoch = 0;
  double gen_loss = 0.0;
  double dis_loss = 0.0;
  double s_gen = 0.0;
  double s_dis = 0.0;
  std::optional<double> val_acc;  // set on validation iterations
};

class Gan {
 public:
  Gan(const GanConfig& config);

  // One discriminator step on real (label 1, partly flipped) and generated
  // (label 0) samples, then one non-saturating generator step through the
  // frozen discriminator. Throws Diverged on a non-finite loss.
  StepMetrics train_step(const Matrix& real_batch);

  struct DisStep {
    double loss = 0.0;
    Scores scores;
  };
  // The two halves of train_step. Each updates only its own network.
  DisStep discriminator_step(const Matrix& real_batch);
  double generator_step(Eigen::Index n);

  // Eval-mode generator output for n fresh noise columns (scaled space).
  Matrix generate(int n, Rng& rng) const;

  const Net& generator() const { return gen_; }
  const Net& discriminator() const { return dis_; }
  Net& mutable_generator() { return gen_; }
  const GanConfig& config() const { return config_; }
  std::uint64_t iterations() const { return iter_; }
  Rng& rng() { return rng_; }

 private:
  GanConfig config_;
  Net gen_;
  Net dis_;
  nn::Adam<Real> gen_opt_;
  nn::Adam<Real> dis_opt_;
  Rng rng_;
  std::uint64_t iter_ = 0;
};

// Classifier-estimated feasible fraction of n_val generated samples.
double validate_epoch(const Net& generator, const classifier::Classifier& clf, int n_val,
                      Rng& rng);

// Per-feature reference statistics of the real (scaled) feasible set.
struct RealStats {
  std::array<double, kFeatureDim> lo{};
  std::array<double, kFeatureDim> hi{};
  std::array<std::vector<double>, kFeatureDim> sorted;

  static RealStats from_scaled(const Eigen::MatrixXd& scaled);
};

struct CollapseReport {
  std::array<double, kFeatureDim> coverage{};
  std::array<double, kFeatureDim> ks{};
  double mean_coverage = 0.0;
  double validation_accuracy = 0.0;
  std::size_t n_samples = 0;
  Verdict verdict = Verdict::Healthy;
};

nlohmann::json to_json(const CollapseReport& report);

// Coverage per feature is the fraction of real-occupied bins (equal-width
// over the real range) that hold at least one generated sample. Divergence
// is only declared when after_warmup is set.
CollapseReport detect_collapse(const Eigen::MatrixXd& generated, const RealStats& real,
                               const Thresholds& thresholds, double validation_accuracy,
                               bool after_warmup = true);

struct EpochSummary {
  int epoch = 0;
  double gen_loss = 0.0;
  double dis_loss = 0.0;
  double s_gen = 0.0;
  double s_dis = 0.0;
  double val_acc = 0.0;
  double mean_coverage = 0.0;
  Verdict verdict = Verdict::Healthy;
};

enum class Outcome { Completed, Collapsed, Diverged };
std::string_view to_string(Outcome outcome);

struct TrainResult {
  Outcome outcome = Outcome::Completed;
  Net generator;      // best Healthy checkpoint, else the final generator
  Net discriminator;  // final discriminator
  std::optional<int> best_epoch;
  double best_val_acc = 0.0;
  std::vector<StepMetrics> history;
  std::vector<EpochSummary> epochs;
  CollapseReport last_report;
};

using EpochCallback = std::function<void(const EpochSummary&)>;

// Runs shuffled minibatch epochs on the scaled feasible set (22 x N_train),
// validating once per epoch. Stops early on divergence after warm-up or on a
// collapse verdict that persists for `patience` validations; the outcome is
// reported rather than thrown.
TrainResult train(const GanConfig& config, const Eigen::MatrixXd& real_scaled,
                  const classifier::Classifier& clf, const EpochCallback& on_epoch = {});

// Noise -> generator -> inverse scaling.
std::vector<FeatureVector> sample_transfers(const Net& generator, int n,
                                            const pipeline::ScalingSpec& scaling, Rng& rng);

std::string format_history_csv(const std::vector<StepMetrics>& history);
std::string format_epochs_csv(const std::vector<EpochSummary>& epochs);

}  // namespace ltgan::gan
