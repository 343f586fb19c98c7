#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "ltgan/dataset.hpp"
#include "ltgan/error.hpp"
#include "ltgan/io.hpp"

namespace ltgan::pipeline {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Asteroid body(std::string id, double a, double e, double i_deg, double raan_deg, double argp_deg,
              double nu_deg) {
  return {std::move(id),
          astro::ClassicalElements::make(a, e, i_deg * kDeg, raan_deg * kDeg, argp_deg * kDeg,
                                         nu_deg * kDeg),
          0.0};
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& err) {
    return err.code();
  }
  ADD_FAILURE() << "expected an Error";
  return Errc::Io;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ltgan_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

TEST(SynthCatalog, DeterministicForSeed) {
  const auto a = synth_catalog(2, {}, 42);
  const auto b = synth_catalog(2, {}, 42);
  EXPECT_EQ(format_catalog(a), format_catalog(b));
  EXPECT_NE(format_catalog(a), format_catalog(synth_catalog(2, {}, 43)));
}

TEST(SynthCatalog, DefaultRangesRespected) {
  const auto cat = synth_catalog(500, {}, 7);
  ASSERT_EQ(cat.size(), 500u);
  std::set<std::string> ids;
  for (const auto& b : cat.bodies()) {
    ids.insert(b.id);
    EXPECT_GE(b.elements.a, 0.7);
    EXPECT_LE(b.elements.a, 1.8);
    EXPECT_GE(b.elements.e, 0.0);
    EXPECT_LE(b.elements.e, 0.6);
    EXPECT_GE(b.elements.i, 0.0);
    EXPECT_LE(b.elements.i, 10.0 * kDeg);
  }
  EXPECT_EQ(ids.size(), 500u);
}

TEST(SynthCatalog, RejectsBadInput) {
  ElementRanges bad;
  bad.a = {2.0, 1.0};
  EXPECT_EQ(code_of([&] { synth_catalog(10, bad, 1); }), Errc::InvalidArgument);
  EXPECT_EQ(code_of([] { synth_catalog(1, {}, 1); }), Errc::InvalidArgument);
}

TEST(LoadCatalog, HeaderOnlyIsEmpty) {
  EXPECT_EQ(code_of([] { parse_catalog("id,a_au,e,i_deg,raan_deg,argp_deg,nu_deg,epoch_day\n"); }),
            Errc::EmptyCatalog);
}

TEST(LoadCatalog, RejectsHyperbolicRowNamingField) {
  try {
    parse_catalog(
        "id,a_au,e,i_deg,raan_deg,argp_deg,nu_deg,epoch_day\n"
        "A,1.0,0.1,1,0,0,0,0\n"
        "B,1.0,1.2,1,0,0,0,0\n");
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::InvalidElements);
    const std::string what = err.what();
    EXPECT_NE(what.find("line 3"), std::string::npos) << what;
    EXPECT_NE(what.find("e = "), std::string::npos) << what;
  }
}

TEST(LoadCatalog, ParseErrorCarriesLineNumber) {
  try {
    parse_catalog(
        "id,a_au,e,i_deg,raan_deg,argp_deg,nu_deg,epoch_day\n"
        "A,1.0,0.1,1,0,0,zero,0\n");
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::ParseError);
    EXPECT_NE(std::string(err.what()).find("line 2"), std::string::npos);
    EXPECT_NE(std::string(err.what()).find("nu_deg"), std::string::npos);
  }
}

TEST(LoadCatalog, SaveLoadRoundTrip) {
  const auto cat = synth_catalog(50, {}, 3);
  const auto dir = temp_dir("catalog");
  save_catalog(cat, dir / "catalog.csv");
  const auto back = load_catalog(dir / "catalog.csv");
  ASSERT_EQ(back.size(), cat.size());
  for (std::size_t k = 0; k < cat.size(); ++k) {
    EXPECT_EQ(back[k].id, cat[k].id);
    EXPECT_NEAR(back[k].elements.a, cat[k].elements.a, 0.0);
    EXPECT_NEAR(back[k].elements.i, cat[k].elements.i, 1e-15);
    EXPECT_NEAR(back[k].elements.nu, cat[k].elements.nu, 1e-14);
  }
  EXPECT_EQ(format_catalog(back), format_catalog(cat));
}

TEST(SamplePair, AcceptsPairInsideThresholds) {
  Catalog cat({body("A", 1.0, 0.1, 1.0, 0, 0, 0), body("B", 1.25, 0.1, 3.0, 0, 0, 20)});
  Rng rng(1);
  const auto [a, b] = sample_pair(cat, {}, 0.0, rng);
  EXPECT_NE(a, b);
}

TEST(SamplePair, RejectsSemiMajorAxisGap) {
  Catalog cat({body("A", 1.0, 0.1, 1.0, 0, 0, 0), body("B", 1.35, 0.1, 1.0, 0, 0, 5)});
  Rng rng(1);
  EXPECT_EQ(code_of([&] { sample_pair(cat, {}, 0.0, rng, {}, 500); }), Errc::NoFeasiblePair);
}

TEST(SamplePair, ReturnedPairsAlwaysPassFilter) {
  const auto cat = synth_catalog(200, {}, 5);
  const PairFilter filter;
  Rng rng(9);
  for (int n = 0; n < 300; ++n) {
    const auto [a, b] = sample_pair(cat, filter, 0.0, rng);
    ASSERT_LE(std::abs(a->elements.a - b->elements.a), filter.max_da);
    ASSERT_LE(std::abs(a->elements.i - b->elements.i), filter.max_di);
    ASSERT_LE(std::abs(astro::wrap_pi(true_longitude(*a, 0.0) - true_longitude(*b, 0.0))),
              filter.max_dL);
  }
}

TEST(ImpulsiveGridSearch, SameOrbitSamePhaseIsFree) {
  const auto a = body("A", 1.2, 0.1, 2.0, 10, 20, 30);
  auto b = a;
  b.id = "B";
  ImpulsiveGrid grid{0, 100, 20, 50, 150, 10};
  const auto res = impulsive_grid_search(a, b, grid);
  EXPECT_LT(res.dv_min, 1e-8);
}

TEST(ImpulsiveGridSearch, CoplanarCircularMatchesHohmann) {
  const astro::GravParam mu;
  const double r1 = 1.0, r2 = 1.1;
  const double v1 = std::sqrt(mu.mu / r1), v2 = std::sqrt(mu.mu / r2);
  const double at = 0.5 * (r1 + r2);
  const double hohmann = (std::abs(std::sqrt(mu.mu * (2 / r1 - 1 / at)) - v1) +
                          std::abs(v2 - std::sqrt(mu.mu * (2 / r2 - 1 / at)))) *
                         astro::kAuPerDayToKmPerSec;
  const double t_h = std::numbers::pi * std::sqrt(at * at * at / mu.mu);
  // Phase the target so a half-ellipse leaving at t0 = 100 d arrives on it.
  const double n1 = std::sqrt(mu.mu / (r1 * r1 * r1));
  const double n2 = std::sqrt(mu.mu / (r2 * r2 * r2));
  const double depart_angle = n1 * 100.0;
  const double nu2 = depart_angle + std::numbers::pi - n2 * (100.0 + t_h);
  const Asteroid inner{"in", astro::ClassicalElements::make(r1, 0, 0, 0, 0, 0), 0.0};
  const Asteroid outer{"out", astro::ClassicalElements::make(r2, 0, 0, 0, 0, nu2), 0.0};
  const auto res = impulsive_grid_search(inner, outer, ImpulsiveGrid{0, 200, 5, 150, 250, 2}, mu);
  EXPECT_GE(res.dv_min, hohmann * (1 - 1e-9));
  EXPECT_LT(std::abs(res.dv_min - hohmann) / hohmann, 0.05)
      << res.dv_min << " vs " << hohmann << " at t0=" << res.t0_best;
}

TEST(ImpulsiveGridSearch, ArgminMatchesBruteForce) {
  const auto a = body("A", 1.0, 0.05, 1.0, 0, 10, 0);
  const auto b = body("B", 1.2, 0.12, 2.0, 30, 50, 40);
  const ImpulsiveGrid grid{0, 60, 30, 100, 300, 50};
  const auto res = impulsive_grid_search(a, b, grid);
  double best = INFINITY, best_t0 = 0, best_tof = 0;
  for (double t0 : {0.0, 30.0, 60.0}) {
    for (double tof : {100.0, 150.0, 200.0, 250.0, 300.0}) {
      const auto s1 = astro::propagate(a.elements, 0, t0);
      const auto s2 = astro::propagate(b.elements, 0, t0 + tof);
      try {
        const auto sol = astro::lambert(s1.r, s2.r, tof);
        const double dv = ((sol.v1 - s1.v).norm() + (s2.v - sol.v2).norm()) * 1731.4568368055554;
        if (dv < best) best = dv, best_t0 = t0, best_tof = tof;
      } catch (const Error&) {
      }
    }
  }
  EXPECT_NEAR(res.dv_min, best, 1e-9);
  EXPECT_EQ(res.t0_best, best_t0);
  EXPECT_EQ(res.dt_impls, best_tof);
}

TEST(TofWindow, BoundFormula) {
  EXPECT_DOUBLE_EQ(tof_window(400).lo, 480);
  EXPECT_DOUBLE_EQ(tof_window(400).hi, 800);
  EXPECT_DOUBLE_EQ(tof_window(700).lo, 840);
  EXPECT_DOUBLE_EQ(tof_window(700).hi, 1400);
  EXPECT_DOUBLE_EQ(tof_window(1000).hi, 1460);
  EXPECT_EQ(code_of([] { tof_window(1300); }), Errc::EmptyTofWindow);
}

TEST(InitTransfer, DrawsInsideWindows) {
  const auto a = body("A", 1.0, 0.1, 1, 0, 0, 0);
  const auto b = body("B", 1.1, 0.1, 1, 0, 0, 10);
  const SpacecraftModel sc;
  Rng rng(4);
  for (int n = 0; n < 1000; ++n) {
    const auto cand = init_transfer(a, b, 20.0, 400.0, sc, rng);
    ASSERT_GE(cand.dt_lt, 480.0);
    ASSERT_LE(cand.dt_lt, 800.0);
    ASSERT_GE(cand.m_i, 1000.0);
    ASSERT_LE(cand.m_i, 3000.0);
    EXPECT_EQ(cand.t0, 20.0);
  }
}

TEST(Spacecraft, ExhaustVelocityConsistent) {
  SpacecraftModel sc;
  EXPECT_NO_THROW(sc.validate());
  EXPECT_NEAR(sc.isp * sc.g0 / 1000.0, 41.09, 0.01);
  sc.v_e = 30.0;
  EXPECT_THROW(sc.validate(), Error);
}

TEST(FeasibilityOracle, CapsFromSpacecraftConstants) {
  const SpacecraftModel sc;
  const OracleParams unit_duty{1.15, 1.0};
  const astro::Mee m{1.1, 0.05, 0.02, 0.01, 0.0, 1.0};
  const auto r3000 = assess_transfer(m, m, 3000.0, 365.0, sc, unit_duty);
  EXPECT_NEAR(r3000.dv_propellant_cap, 41.09 * std::log(3.0), 1e-12);
  EXPECT_NEAR(r3000.dv_propellant_cap, 45.14, 0.01);
  const auto r2000 = assess_transfer(m, m, 2000.0, 365.0, sc, unit_duty);
  EXPECT_NEAR(r2000.dv_thrust_cap, 0.236 / 1500.0 * 365.0 * 86400.0 / 1000.0, 1e-12);
  EXPECT_NEAR(r2000.dv_thrust_cap, 4.96, 0.005);
}

TEST(FeasibilityOracle, SameOrbitSamePhaseIsFeasible) {
  const SpacecraftModel sc;
  const astro::Mee m{1.2, 0.05, 0.02, 0.01, 0.0, 1.0};
  const auto r = assess_transfer(m, m, 1500.0, 100.0, sc, {});
  EXPECT_TRUE(r.feasible);
  EXPECT_EQ(r.reject_reason, RejectReason::None);
  EXPECT_LT(r.dv_required, 1e-9);
  EXPECT_NEAR(r.m_final_est, 1500.0, 1e-6);
}

TEST(FeasibilityOracle, ReportInvariantAndMonotonicity) {
  const auto cat = synth_catalog(100, {}, 2);
  const SpacecraftModel sc;
  const OracleParams params;
  Rng rng(8);
  for (int n = 0; n < 200; ++n) {
    const auto [a, b] = sample_pair(cat, {}, 0.0, rng);
    const auto m1 = astro::classical_to_mee(a->elements);
    const auto m2 = astro::classical_to_mee(b->elements);
    const double m_i = rng.uniform(1000, 2900), dt = rng.uniform(100, 1300);
    const auto r = assess_transfer(m1, m2, m_i, dt, sc, params);
    const bool rule = r.m_final_est >= sc.m_dry && params.kappa * r.dv_required <= r.dv_thrust_cap;
    ASSERT_EQ(r.feasible, rule);
    ASSERT_EQ(r.feasible, r.reject_reason == RejectReason::None);

    const auto heavier = assess_transfer(m1, m2, m_i + 100.0, dt, sc, params);
    if (r.reject_reason != RejectReason::Propellant && r.reject_reason != RejectReason::LambertFailure) {
      EXPECT_NE(heavier.reject_reason, RejectReason::Propellant);
    }
    // Thrust cap grows with time of flight at fixed mass.
    const auto longer = assess_transfer(m1, m2, m_i, dt + 50.0, sc, params);
    if (longer.reject_reason != RejectReason::LambertFailure) {
      EXPECT_GT(longer.dv_thrust_cap, r.dv_thrust_cap);
    }
    // Identical inputs give identical reports.
    const auto again = assess_transfer(m1, m2, m_i, dt, sc, params);
    EXPECT_EQ(again.dv_required, r.dv_required);
    EXPECT_EQ(again.feasible, r.feasible);
  }
}

TEST(ExtractFeatures, IdenticalBodiesHaveZeroDeltas) {
  Catalog cat({body("A", 1.1, 0.2, 3, 40, 50, 60), body("B", 1.1, 0.2, 3, 40, 50, 60)});
  const TransferCandidate cand{"A", "B", 120.0, 2000.0, 300.0, 200.0};
  const auto fv = extract_features(cand, cat);
  for (std::size_t c : kDerivedColumns) EXPECT_EQ(fv[c], 0.0) << feature_names()[c];
  EXPECT_EQ(fv.m_i(), 2000.0);
  EXPECT_EQ(fv.dt_lt(), 300.0);
}

TEST(ExtractFeatures, DerivedColumnsAreConsistent) {
  const auto cat = synth_catalog(100, {}, 12);
  Rng rng(2);
  double min_dl = 0, max_dl = 0;
  for (int n = 0; n < 2000; ++n) {
    const auto& a = cat[rng.index(cat.size())];
    const auto& b = cat[rng.index(cat.size())];
    const TransferCandidate cand{a.id, b.id, rng.uniform(0, 730), 1500.0, 500.0, 300.0};
    const auto fv = extract_features(cand, cat);
    const auto m1 = fv.mee1(), m2 = fv.mee2();
    EXPECT_EQ(fv[col::kDMee + 0], m1.p - m2.p);
    EXPECT_EQ(fv[col::kDMee + 5], m1.L - m2.L);
    EXPECT_NEAR(fv[col::kDE], astro::orbital_energy(m1) - astro::orbital_energy(m2), 1e-12);
    EXPECT_NEAR(fv[col::kDH], astro::angular_momentum(m1) - astro::angular_momentum(m2), 1e-12);
    min_dl = std::min(min_dl, fv[col::kDMee + 5]);
    max_dl = std::max(max_dl, fv[col::kDMee + 5]);
  }
  EXPECT_LT(min_dl, -6.0);
  EXPECT_GT(max_dl, 6.0);
  EXPECT_GT(min_dl, -astro::kTwoPi);
  EXPECT_LT(max_dl, astro::kTwoPi);
}

TEST(Scaler, MidpointAndEnds) {
  ScalingSpec spec;
  spec.min.fill(-2.0);
  spec.max.fill(4.0);
  EXPECT_EQ(spec.scale(0, 1.0), 0.0);
  EXPECT_EQ(spec.scale(3, -2.0), -1.0);
  EXPECT_EQ(spec.scale(5, 4.0), 1.0);
  EXPECT_EQ(spec.scale(5, 7.0), 2.0);  // no clamping
}

TEST(Scaler, RoundTripIdentity) {
  Rng rng(6);
  std::vector<FeatureVector> rows(200);
  for (auto& r : rows) {
    for (std::size_t i = 0; i < kFeatureDim; ++i) r[i] = rng.uniform(-100, 100) * (i + 1);
  }
  const auto spec = fit_scaler(rows);
  for (const auto& r : rows) {
    const auto s = apply_scaler(spec, r);
    const auto back = invert_scaler(spec, s);
    for (std::size_t i = 0; i < kFeatureDim; ++i) {
      ASSERT_GE(s[i], -1.0 - 1e-15);
      ASSERT_LE(s[i], 1.0 + 1e-15);
      ASSERT_NEAR(back[i], r[i], 1e-12 * std::max(1.0, std::abs(r[i])));
    }
  }
  EXPECT_EQ(scaling_from_json(to_json(spec)), spec);
}

TEST(Scaler, ConstantFeatureNamed) {
  std::vector<FeatureVector> rows(3);
  for (int k = 0; k < 3; ++k) {
    for (std::size_t i = 0; i < kFeatureDim; ++i) rows[k][i] = k + i;
    rows[k][col::kDE] = 0.5;
  }
  try {
    fit_scaler(rows);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::DegenerateFeature);
    EXPECT_NE(std::string(err.what()).find("dE"), std::string::npos);
  }
}

PipelineConfig small_config() {
  PipelineConfig c;
  c.grid = {0, 200, 50, 60, 500, 40};
  c.target_feasible = 6;
  c.target_infeasible = 10;
  c.oracle.kappa = 0.8;
  c.oracle.eta_duty = 1.0;
  return c;
}

TEST(GenerateDataset, DeterministicAndAccounted) {
  const auto cat = synth_catalog(120, {}, 1);
  const auto config = small_config();
  const auto a = generate_dataset(cat, config, 99);
  const auto b = generate_dataset(cat, config, 99);
  EXPECT_EQ(format_dataset_csv(a), format_dataset_csv(b));
  EXPECT_EQ(dataset_metadata(a).dump(), dataset_metadata(b).dump());
  EXPECT_EQ(a.count(true), 6u);
  EXPECT_EQ(a.count(false), 10u);
  const auto& p = a.provenance;
  EXPECT_EQ(p.convergence_rate, static_cast<double>(p.n_feasible) / p.n_attempted);
  EXPECT_GE(p.n_attempted, 16u);

  auto threaded = config;
  threaded.threads = 3;
  EXPECT_EQ(format_dataset_csv(generate_dataset(cat, threaded, 99)), format_dataset_csv(a));
}

TEST(GenerateDataset, RowsAreConsistentAndLabelledByOracle) {
  const auto cat = synth_catalog(120, {}, 1);
  const auto config = small_config();
  const auto ds = generate_dataset(cat, config, 5);
  for (const auto& row : ds.rows) {
    const auto& fv = row.features;
    const auto deltas = derived_deltas(fv.mee1(), fv.mee2());
    for (std::size_t j = 0; j < deltas.size(); ++j) {
      EXPECT_NEAR(fv[kDerivedColumns[j]], deltas[j], 1e-12);
    }
    const auto report = assess_transfer(fv.mee1(), fv.mee2(), fv.m_i(), fv.dt_lt(),
                                        config.spacecraft, config.oracle);
    EXPECT_EQ(report.feasible, row.feasible);
    const auto window = tof_window(row.dt_impls);
    EXPECT_GE(fv.dt_lt(), window.lo);
    EXPECT_LE(fv.dt_lt(), window.hi);
  }
}

TEST(GenerateDataset, SaveLoadPreservesRowsAndScaling) {
  const auto cat = synth_catalog(120, {}, 1);
  const auto ds = generate_dataset(cat, small_config(), 11);
  const auto dir = temp_dir("dataset");
  save_dataset(ds, dir);
  const auto back = load_dataset(dir);
  EXPECT_EQ(format_dataset_csv(back), format_dataset_csv(ds));
  ASSERT_TRUE(back.scaling.has_value());
  EXPECT_EQ(*back.scaling, *ds.scaling);
  EXPECT_EQ(back.scaling->fingerprint, ds.fingerprint());
  EXPECT_EQ(back.provenance.convergence_rate, ds.provenance.convergence_rate);
}

TEST(GenerateDataset, UnreachableTargetReported) {
  const auto cat = synth_catalog(120, {}, 1);
  auto config = small_config();
  config.max_attempts = 3;
  config.target_infeasible = 50;
  EXPECT_EQ(code_of([&] { generate_dataset(cat, config, 1); }), Errc::TargetUnreachable);
}

TEST(PipelineConfig, JsonRoundTrip) {
  auto c = small_config();
  c.filter.max_di = 2.5 * kDeg;
  const auto back = pipeline_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back).dump(), to_json(c).dump());
}

}  // namespace
}  // namespace ltgan::pipeline
