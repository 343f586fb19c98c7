#include "ltgan/search.hpp"

#include <gtest/gtest.h>

#include <set>

namespace ltgan::search {
namespace {

GanConfig tiny_base() {
  GanConfig c = GanConfig::desk();
  c.noise_dim = 8;
  c.gen.input_dim = 8;
  c.batch_size = 16;
  c.n_epochs = 2;
  c.n_val = 500;
  c.thresholds.warmup_epochs = 0;
  return c;
}

GridSpec tiny_grid() {
  GridSpec g;
  g.gen = {{2}, {8, 16}, {0.0}, {2e-4}};
  g.dis = {{2}, {16}, {0.0, 0.2}, {2e-4}};
  g.base = tiny_base();
  g.budget = 3;
  g.epoch_cap = 2;
  g.n_samples = 50;
  return g;
}

classifier::Classifier constant_classifier(float bias) {
  classifier::Net::Layer layer;
  layer.weights = Eigen::MatrixXf::Zero(1, 22);
  layer.bias = Eigen::VectorXf::Constant(1, bias);
  layer.activation = nn::Activation::Sigmoid;
  return classifier::Classifier(classifier::Net({layer}), 0.5);
}

struct Context {
  classifier::Classifier clf;
  SearchContext ctx;
};

Context make_context(float clf_bias) {
  Context c{constant_classifier(clf_bias), {}};
  Rng rng(1);
  c.ctx.real_scaled.resize(22, 64);
  for (Eigen::Index i = 0; i < c.ctx.real_scaled.size(); ++i) c.ctx.real_scaled.data()[i] = rng.uniform(-1, 1);
  // Ranges around realistic orbits so reconstructed elements are valid.
  for (std::size_t i = 0; i < 22; ++i) {
    c.ctx.scaling.min[i] = -0.1;
    c.ctx.scaling.max[i] = 0.1;
  }
  c.ctx.scaling.min[0] = 1000;
  c.ctx.scaling.max[0] = 3000;
  c.ctx.scaling.min[1] = 100;
  c.ctx.scaling.max[1] = 1400;
  c.ctx.scaling.min[2] = c.ctx.scaling.min[8] = 0.8;
  c.ctx.scaling.max[2] = c.ctx.scaling.max[8] = 1.2;
  c.ctx.scaling.min[7] = c.ctx.scaling.min[13] = 0.0;
  c.ctx.scaling.max[7] = c.ctx.scaling.max[13] = 6.28;
  c.ctx.classifier = &c.clf;
  return c;
}

TEST(Arange, InclusiveSteps) {
  EXPECT_EQ(arange(0.0, 0.8, 0.1).size(), 9u);
  const auto lr = arange(1e-5, 3e-4, 5e-5);
  EXPECT_EQ(lr.size(), 6u);
  EXPECT_NEAR(lr.back(), 2.6e-4, 1e-15);
  EXPECT_THROW(arange(1.0, 0.0, 0.1), Error);
}

TEST(GridSpec, FullRangesHonourSeparateDepthAxes) {
  const auto g = GridSpec::full_ranges();
  EXPECT_EQ(g.gen.layers.front(), 5);
  EXPECT_EQ(g.gen.layers.back(), 29);
  EXPECT_EQ(g.gen.layers[1] - g.gen.layers[0], 2);
  EXPECT_EQ(g.dis.layers, (std::vector<int>{4, 6, 8, 10}));
  EXPECT_EQ(g.gen.neurons, (std::vector<int>{100, 150, 200, 250, 300}));
  EXPECT_EQ(g.dis.neurons, (std::vector<int>{200, 250, 300, 350, 400}));
  EXPECT_EQ(g.size(), 13u * 5 * 9 * 6 * 4 * 5 * 9 * 6);
  EXPECT_EQ(g.budget, 12u);
  EXPECT_LE(g.epoch_cap, 200);
}

TEST(GridSpec, TrialOrderAndSeeds) {
  const auto g = tiny_grid();
  EXPECT_EQ(g.size(), 4u);
  const auto t0 = g.trial_config(0, 5), t1 = g.trial_config(1, 5), t2 = g.trial_config(2, 5);
  EXPECT_EQ(t0.dis.dropout_rate, 0.0);
  EXPECT_EQ(t1.dis.dropout_rate, 0.2);
  EXPECT_EQ(t1.gen.n_neurons, 8);
  EXPECT_EQ(t2.gen.n_neurons, 16);
  std::set<std::uint64_t> seeds;
  for (std::size_t i = 0; i < g.size(); ++i) seeds.insert(g.trial_config(i, 5).seed);
  EXPECT_EQ(seeds.size(), g.size());
  EXPECT_EQ(g.trial_config(3, 5).seed, mix_seed(5, 3));
  EXPECT_THROW(g.trial_config(4, 5), Error);
}

TEST(GridSpec, JsonRoundTrip) {
  const auto g = tiny_grid();
  const auto back = grid_spec_from_json(to_json(g));
  EXPECT_EQ(back.gen.neurons, g.gen.neurons);
  EXPECT_EQ(back.dis.dropout, g.dis.dropout);
  EXPECT_EQ(back.budget, g.budget);
  EXPECT_EQ(back.base.gen, g.base.gen);
}

TEST(RunGrid, SinglePointGridEqualsPlainTrain) {
  auto g = tiny_grid();
  g.gen.neurons = {8};
  g.dis.dropout = {0.0};
  auto c = make_context(3.0f);
  const auto result = run_grid(g, c.ctx, 11);
  ASSERT_EQ(result.trials.size(), 1u);
  const auto plain = gan::train(g.trial_config(0, 11), c.ctx.real_scaled, c.clf);
  EXPECT_EQ(result.trials[0].epochs_run, static_cast<int>(plain.epochs.size()));
  EXPECT_DOUBLE_EQ(result.trials[0].s_gen,
                   0.5 * (plain.epochs[0].s_gen + plain.epochs[1].s_gen));
}

TEST(RunGrid, BudgetLimitsTrialsAndRerunIsIdentical) {
  auto c = make_context(3.0f);
  const auto a = run_grid(tiny_grid(), c.ctx, 12);
  const auto b = run_grid(tiny_grid(), c.ctx, 12);
  EXPECT_EQ(a.trials.size(), 3u);
  EXPECT_EQ(format_trials_csv(a), format_trials_csv(b));
  for (std::size_t r = 1; r < a.ranked.size(); ++r) {
    EXPECT_GE(a.trials[a.ranked[r - 1]].oracle_rate, a.trials[a.ranked[r]].oracle_rate);
  }
}

TEST(RunGrid, NonHealthyTrialsAreNeverRanked) {
  auto c = make_context(-10.0f);  // classifier rejects everything: divergence
  auto g = tiny_grid();
  g.base.n_epochs = 3;
  g.epoch_cap = 3;
  g.base.thresholds.warmup_epochs = 1;
  const auto result = run_grid(g, c.ctx, 13);
  EXPECT_TRUE(result.ranked.empty());
  EXPECT_FALSE(result.diagnostics.empty());
  for (const auto& t : result.trials) EXPECT_EQ(t.verdict, gan::Verdict::Diverged);
  const auto csv = format_trials_csv(result);
  EXPECT_NE(csv.find("Diverged"), std::string::npos);
  EXPECT_EQ(csv.substr(0, 6), "trial,");
}

}  // namespace
}  // namespace ltgan::search
