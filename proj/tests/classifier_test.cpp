#include "ltgan/classifier.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include "ltgan/rng.hpp"

namespace ltgan::classifier {
namespace {

struct Fixture {
  Eigen::MatrixXd x;
  std::vector<bool> y;
};

// Uniform points in [-1, 1]^22 labelled by x0 + x1 > 0 with a margin of
// `gap` around the plane, optionally with labels drawn independently of the
// features.
Fixture make_fixture(std::size_t n, std::uint64_t seed, bool shuffled_labels = false, double gap = 0.1) {
  Rng rng(seed);
  Fixture f;
  f.x.resize(22, static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    do {
      for (Eigen::Index i = 0; i < 22; ++i) f.x(i, static_cast<Eigen::Index>(j)) = rng.uniform(-1.0, 1.0);
    } while (std::abs(f.x(0, static_cast<Eigen::Index>(j)) + f.x(1, static_cast<Eigen::Index>(j))) < gap);
    const bool label = f.x(0, static_cast<Eigen::Index>(j)) + f.x(1, static_cast<Eigen::Index>(j)) > 0.0;
    f.y.push_back(shuffled_labels ? rng.bernoulli(0.5) : label);
  }
  return f;
}

ClassifierConfig quick_config() {
  ClassifierConfig c;
  c.epochs = 30;
  c.net.n_neurons = 32;
  c.net.n_layers = 2;
  return c;
}

Classifier constant_classifier(float bias) {
  Net::Layer layer;
  layer.weights = Eigen::MatrixXf::Zero(1, 22);
  layer.bias = Eigen::VectorXf::Constant(1, bias);
  layer.activation = nn::Activation::Sigmoid;
  return Classifier(Net({layer}), 0.5);
}

TEST(TrainClassifier, SeparableFixtureIsLearned) {
  const auto f = make_fixture(3000, 1);
  const auto result = train_classifier(f.x, f.y, quick_config(), 7);
  EXPECT_GE(result.held_out.accuracy, 0.99);
  EXPECT_GT(result.held_out.n, 0u);
  EXPECT_LT(result.loss_history.back(), result.loss_history.front());
}

TEST(TrainClassifier, ShuffledLabelsGiveChance) {
  const auto f = make_fixture(4000, 2, true);
  const auto result = train_classifier(f.x, f.y, quick_config(), 8);
  EXPECT_NEAR(result.held_out.accuracy, 0.5, 0.05);
}

TEST(TrainClassifier, DeterministicAtFixedSeed) {
  const auto f = make_fixture(600, 3);
  const auto a = train_classifier(f.x, f.y, quick_config(), 9);
  const auto b = train_classifier(f.x, f.y, quick_config(), 9);
  EXPECT_EQ(a.model.to_json().dump(), b.model.to_json().dump());
  EXPECT_EQ(a.loss_history, b.loss_history);
}

TEST(TrainClassifier, UndersamplesMajorityAndSplitsEightyTwenty) {
  auto f = make_fixture(1000, 4);
  std::size_t pos = 0;
  for (bool v : f.y) pos += v;
  const auto result = train_classifier(f.x, f.y, quick_config(), 10);
  const std::size_t minority = std::min(pos, f.y.size() - pos);
  EXPECT_EQ(result.n_balanced, 2 * minority);
  EXPECT_EQ(result.train_metrics.n, 2 * static_cast<std::size_t>(0.8 * static_cast<double>(minority)));
  EXPECT_EQ(result.train_metrics.n + result.held_out.n, result.n_balanced);
  EXPECT_EQ(result.held_out.tp + result.held_out.fn, result.held_out.n / 2);
}

TEST(TrainClassifier, SingleClassRejected) {
  const auto f = make_fixture(50, 5);
  const std::vector<bool> ones(50, true);
  try {
    train_classifier(f.x, ones, quick_config(), 1);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::SingleClass);
  }
}

TEST(TrainClassifier, HeldOutReportMatchesFreshData) {
  const auto f = make_fixture(3000, 6);
  const auto result = train_classifier(f.x, f.y, quick_config(), 11);
  const auto fresh = make_fixture(3000, 60);
  EXPECT_NEAR(evaluate(result.model, fresh.x, fresh.y).accuracy, result.held_out.accuracy, 0.02);
}

TEST(PredictFeasible, BoundaryCountsAsFeasible) {
  const auto clf = constant_classifier(0.0f);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(22, 3);
  EXPECT_EQ(clf.predict_proba(x)(0), 0.5);
  for (bool b : clf.predict_feasible(x, 0.5)) EXPECT_TRUE(b);
  for (bool b : clf.predict_feasible(x, 0.50001)) EXPECT_FALSE(b);
}

TEST(PredictFeasible, ThresholdMonotone) {
  const auto f = make_fixture(2000, 7);
  const auto result = train_classifier(f.x, f.y, quick_config(), 12);
  std::size_t previous = f.y.size() + 1;
  for (double tau = 0.05; tau < 1.0; tau += 0.05) {
    const auto flags = result.model.predict_feasible(f.x, tau);
    const auto count = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
    EXPECT_LE(count, previous);
    previous = count;
  }
}

TEST(Metrics, HandCounts) {
  const auto clf = constant_classifier(5.0f);  // always feasible
  const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(22, 4);
  const auto m = evaluate(clf, x, {true, true, false, true});
  EXPECT_EQ(m.tp, 3u);
  EXPECT_EQ(m.fp, 1u);
  EXPECT_EQ(m.accuracy, 0.75);
  EXPECT_EQ(m.precision, 0.75);
  EXPECT_EQ(m.recall, 1.0);
}

TEST(Classifier, SaveLoadRoundTrip) {
  const auto f = make_fixture(400, 8);
  const auto result = train_classifier(f.x, f.y, quick_config(), 13);
  const auto path = std::filesystem::temp_directory_path() / "ltgan_classifier_test.json";
  result.model.save(path, 13);
  const auto back = Classifier::load(path);
  EXPECT_EQ(back.predict_proba(f.x), result.model.predict_proba(f.x));
  EXPECT_EQ(back.threshold(), result.model.threshold());
  std::filesystem::remove(path);
}

TEST(ClassifierConfig, ValidationAndJson) {
  ClassifierConfig c;
  EXPECT_NO_THROW(c.validate());
  const auto back = classifier_config_from_json(to_json(c));
  EXPECT_EQ(back.net, c.net);
  EXPECT_EQ(back.epochs, c.epochs);
  c.threshold = 1.0;
  EXPECT_THROW(c.validate(), Error);
}

}  // namespace
}  // namespace ltgan::classifier
