#include "ltgan/eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "ltgan/error.hpp"
#include "ltgan/io.hpp"

namespace ltgan::eval {

namespace col = pipeline::col;

nlohmann::json to_json(const ConvergenceReport& r) {
  nlohmann::json doc = {{"n_samples", r.n_samples},
                        {"n_feasible", r.n_feasible},
                        {"oracle_rate", r.oracle_rate},
                        {"baseline_rate", r.baseline_rate},
                        {"lift", r.lift},
                        {"mean_residual", r.mean_residual},
                        {"max_residual", r.max_residual},
                        {"n_clamped_mass", r.n_clamped_mass},
                        {"n_clamped_tof", r.n_clamped_tof},
                        {"n_invalid_elements", r.n_invalid_elements},
                        {"n_lambert_failures", r.n_lambert_failures},
                        {"n_rejected_propellant", r.n_propellant},
                        {"n_rejected_thrust", r.n_thrust}};
  doc["classifier_rate"] = r.classifier_rate ? nlohmann::json(*r.classifier_rate) : nlohmann::json();
  return doc;
}

double consistency_residual(const FeatureVector& fv, const pipeline::ScalingSpec& scaling,
                            astro::GravParam mu) {
  const auto m1 = fv.mee1(), m2 = fv.mee2();
  try {
    astro::validate(m1);
    astro::validate(m2);
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
  const auto derived = pipeline::derived_deltas(m1, m2, mu);
  double worst = 0.0;
  for (std::size_t j = 0; j < derived.size(); ++j) {
    const std::size_t c = pipeline::kDerivedColumns[j];
    worst = std::max(worst, std::abs(fv[c] - derived[j]) / scaling.half_range(c));
  }
  return worst;
}

namespace {

struct SampleOutcome {
  bool feasible = false;
  bool clamped_mass = false;
  bool clamped_tof = false;
  bool invalid = false;
  pipeline::RejectReason reason = pipeline::RejectReason::None;
  double residual = 0.0;
};

SampleOutcome evaluate_one(const FeatureVector& fv, const pipeline::ScalingSpec& scaling,
                           const EvalOptions& opt, astro::GravParam mu) {
  SampleOutcome out;
  out.residual = consistency_residual(fv, scaling, mu);
  const auto& range = opt.spacecraft.m0_range;
  double m_i = fv.m_i(), dt = fv.dt_lt();
  if (!std::isfinite(m_i) || !std::isfinite(dt)) {
    out.invalid = true;
    return out;
  }
  out.clamped_mass = m_i < range.lo || m_i > range.hi;
  out.clamped_tof = dt < 1.0 || dt > pipeline::kMaxTofDays;
  m_i = std::clamp(m_i, range.lo, range.hi);
  dt = std::clamp(dt, 1.0, pipeline::kMaxTofDays);
  try {
    astro::validate(fv.mee1());
    astro::validate(fv.mee2());
    const auto rep = pipeline::assess_transfer(fv.mee1(), fv.mee2(), m_i, dt, opt.spacecraft, opt.oracle, mu);
    out.feasible = rep.feasible;
    out.reason = rep.reject_reason;
  } catch (const Error& err) {
    if (err.code() != Errc::InvalidElements) throw;
    out.invalid = true;
  }
  return out;
}

}  // namespace

ConvergenceReport evaluate_generated(std::span<const FeatureVector> samples,
                                     const pipeline::ScalingSpec& scaling, const EvalOptions& options,
                                     const classifier::Classifier* clf, astro::GravParam mu) {
  std::vector<SampleOutcome> outcomes(samples.size());
  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(samples.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < samples.size(); i += threads) {
          outcomes[i] = evaluate_one(samples[i], scaling, options, mu);
        }
      });
    }
  }
  ConvergenceReport r;
  r.n_samples = samples.size();
  r.baseline_rate = options.baseline_rate;
  double residual_sum = 0.0;
  std::size_t residual_n = 0;
  for (const auto& o : outcomes) {
    r.feasible.push_back(o.feasible);
    r.n_feasible += o.feasible;
    r.n_clamped_mass += o.clamped_mass;
    r.n_clamped_tof += o.clamped_tof;
    r.n_invalid_elements += o.invalid;
    r.n_lambert_failures += o.reason == pipeline::RejectReason::LambertFailure;
    r.n_propellant += o.reason == pipeline::RejectReason::Propellant;
    r.n_thrust += o.reason == pipeline::RejectReason::ThrustDuration;
    if (std::isfinite(o.residual)) {
      residual_sum += o.residual;
      ++residual_n;
      r.max_residual = std::max(r.max_residual, o.residual);
    }
  }
  if (r.n_samples > 0) r.oracle_rate = static_cast<double>(r.n_feasible) / static_cast<double>(r.n_samples);
  if (residual_n > 0) r.mean_residual = residual_sum / static_cast<double>(residual_n);
  if (r.baseline_rate > 0.0) r.lift = r.oracle_rate / r.baseline_rate;
  if (clf && !samples.empty()) {
    r.classifier_rate = clf->feasible_fraction(pipeline::scaled_matrix(scaling, samples));
  }
  return r;
}

namespace {

std::vector<double> column(std::span<const FeatureVector> rows, std::size_t c) {
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& r : rows) v.push_back(r[c]);
  return v;
}

nlohmann::json box_json(const stats::BoxStats& b) {
  return {{"min", b.min},       {"max", b.max},         {"mean", b.mean},
          {"median", b.median}, {"q1", b.q1},           {"q3", b.q3},
          {"whisker_lo", b.whisker_lo}, {"whisker_hi", b.whisker_hi},
          {"outliers", b.outliers},     {"degenerate", b.degenerate}};
}

}  // namespace

DistributionReport distribution_report(std::span<const FeatureVector> samples,
                                       std::span<const FeatureVector> reference, std::size_t n_bins) {
  if (samples.empty() || reference.empty()) {
    throw Error(Errc::InvalidArgument, "distribution report needs non-empty samples and reference");
  }
  DistributionReport rep;
  rep.n_samples = samples.size();
  rep.n_reference = reference.size();
  for (std::size_t c = 0; c < kFeatureDim; ++c) {
    auto gen = column(samples, c);
    auto ref = column(reference, c);
    std::sort(gen.begin(), gen.end());
    std::sort(ref.begin(), ref.end());
    auto& f = rep.features[c];
    f.name = std::string(pipeline::feature_names()[c]);
    f.box = stats::box_stats(gen);
    rep.reference_box[c] = stats::box_stats(ref);
    f.hist_lo = ref.front();
    f.hist_hi = ref.back();
    f.histogram = stats::histogram(gen, f.hist_lo, f.hist_hi, n_bins);
    const auto ref_hist = stats::histogram(ref, f.hist_lo, f.hist_hi, n_bins);
    std::size_t occupied = 0, hit = 0;
    for (std::size_t b = 0; b < n_bins; ++b) {
      if (ref_hist[b] == 0) continue;
      ++occupied;
      hit += f.histogram[b] > 0;
    }
    f.coverage = occupied ? static_cast<double>(hit) / static_cast<double>(occupied) : 0.0;
    f.ks = stats::ks_statistic(gen, ref);
  }
  return rep;
}

nlohmann::json to_json(const DistributionReport& rep) {
  nlohmann::json features = nlohmann::json::object();
  for (std::size_t c = 0; c < kFeatureDim; ++c) {
    const auto& f = rep.features[c];
    features[f.name] = {{"samples", box_json(f.box)},
                        {"reference", box_json(rep.reference_box[c])},
                        {"ks", f.ks},
                        {"coverage", f.coverage},
                        {"hist_range", {f.hist_lo, f.hist_hi}},
                        {"histogram", f.histogram}};
  }
  return {{"n_samples", rep.n_samples}, {"n_reference", rep.n_reference}, {"features", std::move(features)}};
}

std::string format_overview_csv(const DistributionReport& rep) {
  std::ostringstream out;
  out << "stat";
  for (auto c : pipeline::kOverviewColumns) out << ',' << rep.features[c].name;
  out << '\n';
  const std::array<std::pair<const char*, double stats::BoxStats::*>, 4> rows = {
      {{"min", &stats::BoxStats::min},
       {"max", &stats::BoxStats::max},
       {"mean", &stats::BoxStats::mean},
       {"median", &stats::BoxStats::median}}};
  for (const auto& [label, member] : rows) {
    out << label;
    for (auto c : pipeline::kOverviewColumns) out << ',' << io::format_double(rep.features[c].box.*member);
    out << '\n';
  }
  return out.str();
}

std::string format_box_csv(const DistributionReport& rep) {
  std::ostringstream out;
  out << "feature,set,min,max,mean,median,q1,q3,whisker_lo,whisker_hi,outliers,degenerate\n";
  for (std::size_t c = 0; c < kFeatureDim; ++c) {
    const auto emit = [&](const char* set, const stats::BoxStats& b) {
      out << rep.features[c].name << ',' << set << ',' << io::format_double(b.min) << ','
          << io::format_double(b.max) << ',' << io::format_double(b.mean) << ','
          << io::format_double(b.median) << ',' << io::format_double(b.q1) << ','
          << io::format_double(b.q3) << ',' << io::format_double(b.whisker_lo) << ','
          << io::format_double(b.whisker_hi) << ',' << b.outliers << ',' << (b.degenerate ? 1 : 0)
          << '\n';
    };
    emit("generated", rep.features[c].box);
    emit("reference", rep.reference_box[c]);
  }
  return out.str();
}

std::string format_histogram_csv(const DistributionReport& rep) {
  std::ostringstream out;
  out << "feature,bin,lo,hi,count\n";
  for (const auto& f : rep.features) {
    const double width = (f.hist_hi - f.hist_lo) / static_cast<double>(f.histogram.size());
    for (std::size_t b = 0; b < f.histogram.size(); ++b) {
      out << f.name << ',' << b << ',' << io::format_double(f.hist_lo + width * static_cast<double>(b))
          << ',' << io::format_double(f.hist_lo + width * static_cast<double>(b + 1)) << ','
          << f.histogram[b] << '\n';
    }
  }
  return out.str();
}

std::string format_scatter_csv(std::span<const FeatureVector> samples,
                               const pipeline::ScalingSpec& scaling) {
  std::ostringstream out;
  for (std::size_t k = 0; k < pipeline::kOverviewColumns.size(); ++k) {
    out << (k ? "," : "") << pipeline::feature_names()[pipeline::kOverviewColumns[k]];
  }
  out << '\n';
  for (const auto& fv : samples) {
    for (std::size_t k = 0; k < pipeline::kOverviewColumns.size(); ++k) {
      const auto c = pipeline::kOverviewColumns[k];
      out << (k ? "," : "") << io::format_double(scaling.scale(c, fv[c]));
    }
    out << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const Comparison& cmp) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& g : cmp.features) {
    features.push_back({{"feature", g.name},
                        {"median_gap_a", g.median_gap_a},
                        {"median_gap_b", g.median_gap_b},
                        {"coverage_a", g.coverage_a},
                        {"coverage_b", g.coverage_b}});
  }
  return {{"features", std::move(features)},
          {"mean_normalized_gap_a", cmp.mean_gap_a},
          {"mean_normalized_gap_b", cmp.mean_gap_b},
          {"mean_coverage_a", cmp.mean_coverage_a},
          {"mean_coverage_b", cmp.mean_coverage_b},
          {"closer", cmp.closer}};
}

Comparison compare_runs(const DistributionReport& a, const DistributionReport& b) {
  for (std::size_t c = 0; c < kFeatureDim; ++c) {
    if (!(a.reference_box[c].median == b.reference_box[c].median &&
          a.reference_box[c].q1 == b.reference_box[c].q1 && a.reference_box[c].q3 == b.reference_box[c].q3)) {
      throw Error(Errc::InvalidArgument, "compared reports use different references");
    }
  }
  Comparison cmp;
  for (auto c : pipeline::kOverviewColumns) {
    const auto& ref = a.reference_box[c];
    FeatureGap g;
    g.name = a.features[c].name;
    g.median_gap_a = std::abs(a.features[c].box.median - ref.median);
    g.median_gap_b = std::abs(b.features[c].box.median - ref.median);
    g.coverage_a = a.features[c].coverage;
    g.coverage_b = b.features[c].coverage;
    const double iqr = ref.q3 - ref.q1 > 0.0 ? ref.q3 - ref.q1 : 1.0;
    cmp.mean_gap_a += g.median_gap_a / iqr;
    cmp.mean_gap_b += g.median_gap_b / iqr;
    cmp.mean_coverage_a += g.coverage_a;
    cmp.mean_coverage_b += g.coverage_b;
    cmp.features.push_back(std::move(g));
  }
  const double n = static_cast<double>(cmp.features.size());
  cmp.mean_gap_a /= n;
  cmp.mean_gap_b /= n;
  cmp.mean_coverage_a /= n;
  cmp.mean_coverage_b /= n;
  if (cmp.mean_gap_a == cmp.mean_gap_b && cmp.mean_coverage_a == cmp.mean_coverage_b) {
    cmp.closer = "tie";
  } else if (cmp.mean_gap_a <= cmp.mean_gap_b && cmp.mean_coverage_a >= cmp.mean_coverage_b) {
    cmp.closer = "a";
  } else if (cmp.mean_gap_b <= cmp.mean_gap_a && cmp.mean_coverage_b >= cmp.mean_coverage_a) {
    cmp.closer = "b";
  } else {
    cmp.closer = "mixed";
  }
  return cmp;
}

}  // namespace ltgan::eval
