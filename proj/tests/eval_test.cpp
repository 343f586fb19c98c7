#include "ltgan/eval.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "ltgan/stats.hpp"

namespace ltgan::eval {
namespace {

using pipeline::PipelineConfig;

TEST(Quantile, LinearInterpolation) {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  EXPECT_EQ(stats::quantile_sorted(v, 0.0), 1.0);
  EXPECT_EQ(stats::quantile_sorted(v, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(stats::quantile_sorted(v, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(stats::quantile_sorted(v, 0.5), 2.5);
  const std::vector<double> odd = {0.1, 0.7, 3.3, 9.9, 10.5};
  EXPECT_EQ(stats::quantile_sorted(odd, 0.5), 3.3);
}

TEST(KsStatistic, KnownValues) {
  const std::vector<double> a = {1, 2, 3, 4};
  const std::vector<double> b = {5, 6, 7};
  const std::vector<double> c = {1.5, 2.5, 3.5, 4.5};
  EXPECT_EQ(stats::ks_statistic(a, a), 0.0);
  EXPECT_EQ(stats::ks_statistic(a, b), 1.0);
  EXPECT_DOUBLE_EQ(stats::ks_statistic(a, c), 0.25);
  const std::vector<double> ties = {1, 1, 2};
  const std::vector<double> one = {1};
  EXPECT_DOUBLE_EQ(stats::ks_statistic(ties, one), 1.0 / 3.0);
}

TEST(Histogram, EdgesAndRange) {
  const std::vector<double> v = {0.0, 0.1, 0.5, 0.99, 1.0, 1.5, -0.1};
  const auto h = stats::histogram(v, 0.0, 1.0, 4);
  EXPECT_EQ(h, (std::vector<std::size_t>{2, 0, 1, 2}));
}

TEST(BoxStats, WhiskersOutliersAndDegenerate) {
  const auto b = stats::box_stats({1, 2, 3, 4, 5, 6, 7, 8, 100});
  EXPECT_EQ(b.median, 5.0);
  EXPECT_EQ(b.q1, 3.0);
  EXPECT_EQ(b.q3, 7.0);
  EXPECT_EQ(b.whisker_lo, 1.0);
  EXPECT_EQ(b.whisker_hi, 8.0);
  EXPECT_EQ(b.outliers, 1u);
  EXPECT_FALSE(b.degenerate);
  EXPECT_LE(b.q1, b.median);
  EXPECT_TRUE(stats::box_stats({2, 2, 2}).degenerate);
  EXPECT_THROW(stats::box_stats({}), Error);
}

class EvalWithData : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    PipelineConfig c;
    c.grid = {0, 200, 50, 60, 500, 40};
    c.target_feasible = 40;
    c.target_infeasible = 20;
    c.oracle.kappa = 0.8;
    c.oracle.eta_duty = 1.0;
    config_ = new PipelineConfig(c);
    dataset_ = new pipeline::Dataset(pipeline::generate_dataset(pipeline::synth_catalog(200, {}, 3), c, 17));
  }
  static void TearDownTestSuite() {
    delete dataset_;
    delete config_;
  }
  static EvalOptions options() {
    EvalOptions o;
    o.spacecraft = config_->spacecraft;
    o.oracle = config_->oracle;
    o.baseline_rate = dataset_->provenance.convergence_rate;
    return o;
  }
  static PipelineConfig* config_;
  static pipeline::Dataset* dataset_;
};

PipelineConfig* EvalWithData::config_ = nullptr;
pipeline::Dataset* EvalWithData::dataset_ = nullptr;

TEST_F(EvalWithData, PipelineFeasibleRowsAreFixedPoint) {
  const auto feasible = dataset_->feasible_features();
  const auto rep = evaluate_generated(feasible, *dataset_->scaling, options());
  EXPECT_EQ(rep.oracle_rate, 1.0);
  EXPECT_EQ(rep.n_feasible, feasible.size());
  EXPECT_LT(rep.max_residual, 1e-10);
  EXPECT_EQ(rep.n_clamped_mass + rep.n_clamped_tof + rep.n_invalid_elements, 0u);
  EXPECT_DOUBLE_EQ(rep.lift, 1.0 / dataset_->provenance.convergence_rate);
}

TEST_F(EvalWithData, InfeasibleRowsStayInfeasible) {
  std::vector<FeatureVector> infeasible;
  for (const auto& r : dataset_->rows) {
    if (!r.feasible) infeasible.push_back(r.features);
  }
  const auto rep = evaluate_generated(infeasible, *dataset_->scaling, options());
  EXPECT_EQ(rep.n_feasible, 0u);
  EXPECT_EQ(rep.n_propellant + rep.n_thrust + rep.n_lambert_failures, infeasible.size());
}

TEST_F(EvalWithData, ThreadCountDoesNotChangeResult) {
  const auto rows = dataset_->all_features();
  auto opt = options();
  const auto a = evaluate_generated(rows, *dataset_->scaling, opt);
  opt.threads = 3;
  const auto b = evaluate_generated(rows, *dataset_->scaling, opt);
  EXPECT_EQ(a.feasible, b.feasible);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
}

TEST_F(EvalWithData, UniformCubeSamplesAreMostlyInfeasible) {
  Rng rng(5);
  const auto& spec = *dataset_->scaling;
  std::vector<FeatureVector> samples(2000);
  for (auto& fv : samples) {
    for (std::size_t i = 0; i < kFeatureDim; ++i) fv[i] = spec.unscale(i, rng.uniform(-1.0, 1.0));
  }
  const auto rep = evaluate_generated(samples, spec, options());
  EXPECT_LT(rep.oracle_rate, 0.5);
  EXPECT_EQ(rep.n_feasible + rep.n_propellant + rep.n_thrust + rep.n_lambert_failures + rep.n_invalid_elements,
            rep.n_samples);
  EXPECT_GT(rep.mean_residual, 0.1);
}

TEST_F(EvalWithData, ClampingIsCountedAndApplied) {
  const auto feasible = dataset_->feasible_features();
  std::vector<FeatureVector> samples = {feasible[0], feasible[1], feasible[2]};
  samples[0][pipeline::col::kMi] = 5000.0;
  samples[1][pipeline::col::kDtLt] = -5.0;
  samples[2][pipeline::col::kMee1 + 1] = 0.9;  // f^2 + g^2 >= 1 below
  samples[2][pipeline::col::kMee1 + 2] = 0.9;
  const auto rep = evaluate_generated(samples, *dataset_->scaling, options());
  EXPECT_EQ(rep.n_clamped_mass, 1u);
  EXPECT_EQ(rep.n_clamped_tof, 1u);
  EXPECT_EQ(rep.n_invalid_elements, 1u);
  EXPECT_FALSE(rep.feasible[2]);
  const auto direct = pipeline::assess_transfer(samples[0].mee1(), samples[0].mee2(), 3000.0,
                                                samples[0].dt_lt(), config_->spacecraft, config_->oracle);
  EXPECT_EQ(rep.feasible[0], direct.feasible);
}

TEST_F(EvalWithData, ResidualMeasuresRedundantColumns) {
  auto fv = dataset_->feasible_features()[0];
  const auto& spec = *dataset_->scaling;
  EXPECT_LT(consistency_residual(fv, spec), 1e-12);
  const std::size_t c = pipeline::col::kDE;
  fv[c] += 0.5 * spec.half_range(c);
  EXPECT_NEAR(consistency_residual(fv, spec), 0.5, 1e-9);
}

TEST_F(EvalWithData, DistributionAgainstItself) {
  const auto feasible = dataset_->feasible_features();
  const auto rep = distribution_report(feasible, feasible);
  for (std::size_t c = 0; c < kFeatureDim; ++c) {
    EXPECT_EQ(rep.features[c].ks, 0.0);
    EXPECT_EQ(rep.features[c].coverage, 1.0);
    EXPECT_EQ(rep.features[c].box.median, rep.reference_box[c].median);
    EXPECT_EQ(rep.features[c].box.q1, rep.reference_box[c].q1);
    EXPECT_LE(rep.features[c].box.q1, rep.features[c].box.median);
    EXPECT_LE(rep.features[c].box.median, rep.features[c].box.q3);
  }
  const auto cmp = compare_runs(rep, rep);
  EXPECT_EQ(cmp.mean_gap_a, 0.0);
  EXPECT_EQ(cmp.closer, "tie");
}

TEST_F(EvalWithData, ConstantFeatureIsDegenerate) {
  auto samples = dataset_->feasible_features();
  for (auto& fv : samples) fv[pipeline::col::kMi] = 1500.0;
  const auto rep = distribution_report(samples, dataset_->feasible_features());
  EXPECT_TRUE(rep.features[pipeline::col::kMi].box.degenerate);
  EXPECT_FALSE(rep.reference_box[pipeline::col::kMi].degenerate);
}

TEST_F(EvalWithData, OverviewCsvMatchesTableSchema) {
  const auto feasible = dataset_->feasible_features();
  const auto csv = format_overview_csv(distribution_report(feasible, feasible));
  const auto first_newline = csv.find('\n');
  EXPECT_EQ(csv.substr(0, first_newline), "stat,dt_lt,m_i,dp,df,dg,dh,dk,dL");
  std::vector<std::string> labels;
  std::size_t pos = first_newline + 1;
  while (pos < csv.size()) {
    const auto end = csv.find('\n', pos);
    const auto line = csv.substr(pos, end - pos);
    labels.push_back(line.substr(0, line.find(',')));
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 8);
    pos = end + 1;
  }
  EXPECT_EQ(labels, (std::vector<std::string>{"min", "max", "mean", "median"}));
}

TEST_F(EvalWithData, LowerQuartileSubsetIsFartherThanResample) {
  const auto ref = dataset_->feasible_features();
  Rng rng(9);
  std::vector<FeatureVector> resample, subset;
  for (std::size_t i = 0; i < 400; ++i) resample.push_back(ref[rng.index(ref.size())]);
  // Rows in the lowest quartile of m_i and dt_lt.
  auto mi = stats::box_stats([&] {
    std::vector<double> v;
    for (const auto& fv : ref) v.push_back(fv.m_i());
    return v;
  }());
  for (const auto& fv : ref) {
    if (fv.m_i() <= mi.q1) subset.push_back(fv);
  }
  ASSERT_FALSE(subset.empty());
  const auto a = distribution_report(resample, ref);
  const auto b = distribution_report(subset, ref);
  const auto cmp = compare_runs(a, b);
  EXPECT_LT(cmp.mean_gap_a, cmp.mean_gap_b);
  EXPECT_GT(cmp.mean_coverage_a, cmp.mean_coverage_b);
  EXPECT_EQ(cmp.closer, "a");
}

TEST_F(EvalWithData, ExportsHaveExpectedShape) {
  const auto feasible = dataset_->feasible_features();
  const auto rep = distribution_report(feasible, feasible);
  const auto box = format_box_csv(rep);
  EXPECT_EQ(std::count(box.begin(), box.end(), '\n'), 1 + 2 * static_cast<long>(kFeatureDim));
  const auto hist = format_histogram_csv(rep);
  EXPECT_EQ(std::count(hist.begin(), hist.end(), '\n'), 1 + 20 * static_cast<long>(kFeatureDim));
  const auto scatter = format_scatter_csv(feasible, *dataset_->scaling);
  EXPECT_EQ(scatter.substr(0, scatter.find('\n')), "dt_lt,m_i,dp,df,dg,dh,dk,dL");
  EXPECT_EQ(static_cast<std::size_t>(std::count(scatter.begin(), scatter.end(), '\n')), feasible.size() + 1);
  EXPECT_EQ(to_json(rep).at("features").size(), kFeatureDim);
}

}  // namespace
}  // namespace ltgan::eval
