#include "ltgan/dataset.hpp"

#include <algorithm>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "ltgan/error.hpp"
#include "ltgan/io.hpp"

namespace ltgan::pipeline {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr int kMaxResamples = 1000;

template <typename T>
void read_opt(const nlohmann::json& doc, const char* key, T& out) {
  if (doc.contains(key)) out = doc.at(key).get<T>();
}

std::string row_key(const TransferCandidate& c) {
  return c.from_id + '|' + c.to_id + '|' + io::format_double(c.t0) + '|' +
         io::format_double(c.m_i) + '|' + io::format_double(c.dt_lt);
}

std::string features_header() {
  std::string out;
  for (std::size_t i = 0; i < kFeatureDim; ++i) {
    if (i) out += ',';
    out += feature_names()[i];
  }
  return out;
}

void append_features(std::string& out, const FeatureVector& fv) {
  for (std::size_t i = 0; i < kFeatureDim; ++i) {
    if (i) out += ',';
    out += io::format_double(fv[i]);
  }
}

FeatureVector parse_feature_fields(const std::vector<std::string>& fields, int line_no) {
  FeatureVector fv;
  for (std::size_t i = 0; i < kFeatureDim; ++i) {
    try {
      fv[i] = io::parse_double(fields[i]);
    } catch (const Error&) {
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": column " +
                                        std::string(feature_names()[i]) + " is not a number");
    }
  }
  return fv;
}

}  // namespace

nlohmann::json to_json(const PipelineConfig& c) {
  return {
      {"filter",
       {{"max_da_au", c.filter.max_da},
        {"max_di_deg", c.filter.max_di / kDeg},
        {"max_dL_deg", c.filter.max_dL / kDeg}}},
      {"spacecraft",
       {{"m_dry_kg", c.spacecraft.m_dry},
        {"m0_min_kg", c.spacecraft.m0_range.lo},
        {"m0_max_kg", c.spacecraft.m0_range.hi},
        {"thrust_max_n", c.spacecraft.thrust_max},
        {"isp_s", c.spacecraft.isp},
        {"g0", c.spacecraft.g0},
        {"v_e_kms", c.spacecraft.v_e}}},
      {"oracle", {{"kappa", c.oracle.kappa}, {"eta_duty", c.oracle.eta_duty}}},
      {"grid",
       {{"t0_lo", c.grid.t0_lo},
        {"t0_hi", c.grid.t0_hi},
        {"t0_step", c.grid.t0_step},
        {"tof_lo", c.grid.tof_lo},
        {"tof_hi", c.grid.tof_hi},
        {"tof_step", c.grid.tof_step}}},
      {"t_ref", c.t_ref},
      {"n_restart", c.n_restart},
      {"target_feasible", c.target_feasible},
      {"target_infeasible", c.target_infeasible},
      {"max_attempts", c.max_attempts},
  };
}

PipelineConfig pipeline_config_from_json(const nlohmann::json& doc) {
  PipelineConfig c;
  if (doc.contains("filter")) {
    const auto& f = doc.at("filter");
    read_opt(f, "max_da_au", c.filter.max_da);
    if (f.contains("max_di_deg")) c.filter.max_di = f.at("max_di_deg").get<double>() * kDeg;
    if (f.contains("max_dL_deg")) c.filter.max_dL = f.at("max_dL_deg").get<double>() * kDeg;
  }
  if (doc.contains("spacecraft")) {
    const auto& s = doc.at("spacecraft");
    read_opt(s, "m_dry_kg", c.spacecraft.m_dry);
    read_opt(s, "m0_min_kg", c.spacecraft.m0_range.lo);
    read_opt(s, "m0_max_kg", c.spacecraft.m0_range.hi);
    read_opt(s, "thrust_max_n", c.spacecraft.thrust_max);
    read_opt(s, "isp_s", c.spacecraft.isp);
    read_opt(s, "g0", c.spacecraft.g0);
    read_opt(s, "v_e_kms", c.spacecraft.v_e);
  }
  if (doc.contains("oracle")) {
    read_opt(doc.at("oracle"), "kappa", c.oracle.kappa);
    read_opt(doc.at("oracle"), "eta_duty", c.oracle.eta_duty);
  }
  if (doc.contains("grid")) {
    const auto& g = doc.at("grid");
    read_opt(g, "t0_lo", c.grid.t0_lo);
    read_opt(g, "t0_hi", c.grid.t0_hi);
    read_opt(g, "t0_step", c.grid.t0_step);
    read_opt(g, "tof_lo", c.grid.tof_lo);
    read_opt(g, "tof_hi", c.grid.tof_hi);
    read_opt(g, "tof_step", c.grid.tof_step);
  }
  read_opt(doc, "t_ref", c.t_ref);
  read_opt(doc, "n_restart", c.n_restart);
  read_opt(doc, "target_feasible", c.target_feasible);
  read_opt(doc, "target_infeasible", c.target_infeasible);
  read_opt(doc, "max_attempts", c.max_attempts);
  read_opt(doc, "threads", c.threads);
  return c;
}

std::vector<FeatureVector> Dataset::feasible_features() const {
  std::vector<FeatureVector> out;
  for (const auto& row : rows) {
    if (row.feasible) out.push_back(row.features);
  }
  return out;
}

std::vector<FeatureVector> Dataset::all_features() const {
  std::vector<FeatureVector> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row.features);
  return out;
}

std::size_t Dataset::count(bool feasible) const {
  return static_cast<std::size_t>(std::count_if(
      rows.begin(), rows.end(), [feasible](const DatasetRow& r) { return r.feasible == feasible; }));
}

std::string Dataset::fingerprint() const { return io::hex64(io::fnv1a(format_dataset_csv(*this))); }

AttemptResult run_attempt(const Catalog& catalog, const PipelineConfig& config, Rng& rng,
                          astro::GravParam mu) {
  for (int resample = 0; resample < kMaxResamples; ++resample) {
    const auto [from, to] = sample_pair(catalog, config.filter, config.t_ref, rng, mu);
    ImpulsiveResult impulsive;
    try {
      impulsive = impulsive_grid_search(*from, *to, config.grid, mu);
      tof_window(impulsive.dt_impls);
    } catch (const Error& err) {
      if (err.code() == Errc::AllLambertFailed || err.code() == Errc::EmptyTofWindow) continue;
      throw;
    }

    // Restarts: independent (m_i, dt_lt) draws; a feasible draw always beats
    // an infeasible one, ties broken by the larger final mass.
    std::optional<AttemptResult> best;
    for (int r = 0; r < std::max(1, config.n_restart); ++r) {
      auto cand = init_transfer(*from, *to, impulsive.t0_best, impulsive.dt_impls,
                                config.spacecraft, rng);
      auto report = feasibility_oracle(cand, catalog, config.spacecraft, config.oracle, mu);
      const bool better =
          !best || (report.feasible && !best->report.feasible) ||
          (report.feasible == best->report.feasible &&
           report.m_final_est > best->report.m_final_est);
      if (better) best = AttemptResult{std::move(cand), report, {}};
    }
    best->features = extract_features(best->candidate, catalog, mu);
    return *std::move(best);
  }
  throw Error(Errc::TargetUnreachable, "pair resampling limit reached");
}

Dataset generate_dataset(const Catalog& catalog, const PipelineConfig& config, std::uint64_t seed,
                         astro::GravParam mu) {
  config.spacecraft.validate();
  if (config.target_feasible + config.target_infeasible == 0) {
    throw Error(Errc::InvalidArgument, "dataset targets are both zero");
  }
  Dataset dataset;
  dataset.provenance.seed = seed;
  dataset.provenance.config = to_json(config);
  dataset.provenance.config_hash = io::hex64(io::fnv1a(dataset.provenance.config.dump()));

  const unsigned threads = std::max(1u, config.threads);
  const std::size_t chunk = threads == 1 ? 1 : 16 * static_cast<std::size_t>(threads);
  std::unordered_set<std::string> seen;
  std::size_t n_feasible_rows = 0, n_infeasible_rows = 0;
  std::size_t attempted = 0, feasible = 0;

  auto done = [&] {
    return n_feasible_rows >= config.target_feasible &&
           n_infeasible_rows >= config.target_infeasible;
  };

  std::vector<std::optional<AttemptResult>> results(chunk);
  std::vector<std::exception_ptr> errors(chunk);
  for (std::size_t base = 0; !done(); base += chunk) {
    if (base >= config.max_attempts) {
      throw Error(Errc::TargetUnreachable,
                  "targets not reached within " + std::to_string(config.max_attempts) +
                      " attempts (" + std::to_string(n_feasible_rows) + " feasible, " +
                      std::to_string(n_infeasible_rows) + " infeasible)");
    }
    const std::size_t n = std::min(chunk, config.max_attempts - base);
    auto work = [&](std::size_t worker) {
      for (std::size_t k = worker; k < n; k += threads) {
        try {
          Rng rng(mix_seed(seed, base + k));
          results[k] = run_attempt(catalog, config, rng, mu);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      }
    };
    if (threads == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    }
    for (std::size_t k = 0; k < n && !done(); ++k) {
      if (errors[k]) std::rethrow_exception(errors[k]);
      auto& result = *results[k];
      ++attempted;
      if (result.report.feasible) ++feasible;
      auto& counter = result.report.feasible ? n_feasible_rows : n_infeasible_rows;
      const auto target =
          result.report.feasible ? config.target_feasible : config.target_infeasible;
      if (counter >= target) continue;
      if (!seen.insert(row_key(result.candidate)).second) continue;
      ++counter;
      dataset.rows.push_back({result.features, result.report.feasible, result.candidate.from_id,
                              result.candidate.to_id, result.candidate.t0,
                              result.candidate.dt_impls});
    }
    for (std::size_t k = 0; k < n; ++k) {
      results[k].reset();
      errors[k] = nullptr;
    }
  }

  dataset.provenance.n_attempted = attempted;
  dataset.provenance.n_feasible = feasible;
  dataset.provenance.convergence_rate =
      attempted ? static_cast<double>(feasible) / static_cast<double>(attempted) : 0.0;
  const auto feasible_rows = dataset.feasible_features();
  if (feasible_rows.size() >= 2) {
    dataset.scaling = fit_scaler(feasible_rows, dataset.fingerprint());
  }
  return dataset;
}

std::string format_dataset_csv(const Dataset& dataset) {
  std::string out = features_header() + ",label,from_id,to_id,t0,dt_impls\n";
  for (const auto& row : dataset.rows) {
    append_features(out, row.features);
    out += row.feasible ? ",1," : ",0,";
    out += row.from_id + ',' + row.to_id + ',' + io::format_double(row.t0) + ',' +
           io::format_double(row.dt_impls) + '\n';
  }
  return out;
}

std::vector<DatasetRow> parse_dataset_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::ParseError, "dataset file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != features_header() + ",label,from_id,to_id,t0,dt_impls") {
    throw Error(Errc::ParseError, "line 1: unexpected dataset header");
  }
  std::vector<DatasetRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = io::split_csv_line(line);
    if (fields.size() != kFeatureDim + 5) {
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(kFeatureDim + 5) + " fields");
    }
    DatasetRow row;
    row.features = parse_feature_fields(fields, line_no);
    const auto& label = fields[kFeatureDim];
    if (label != "0" && label != "1") {
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": label must be 0 or 1");
    }
    row.feasible = label == "1";
    row.from_id = fields[kFeatureDim + 1];
    row.to_id = fields[kFeatureDim + 2];
    row.t0 = io::parse_double(fields[kFeatureDim + 3]);
    row.dt_impls = io::parse_double(fields[kFeatureDim + 4]);
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json dataset_metadata(const Dataset& dataset) {
  const auto& p = dataset.provenance;
  nlohmann::json doc = {
      {"seed", p.seed},
      {"config_hash", p.config_hash},
      {"oracle_version", p.oracle_version},
      {"config", p.config},
      {"n_attempted", p.n_attempted},
      {"n_feasible", p.n_feasible},
      {"convergence_rate", p.convergence_rate},
      {"rows", dataset.rows.size()},
      {"rows_feasible", dataset.count(true)},
      {"rows_infeasible", dataset.count(false)},
      {"fingerprint", dataset.fingerprint()},
  };
  doc["scaling"] = dataset.scaling ? to_json(*dataset.scaling) : nlohmann::json(nullptr);
  return doc;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  io::write_file(dir / "dataset.csv", format_dataset_csv(dataset));
  io::write_file(dir / "dataset.meta.json", dataset_metadata(dataset).dump(2) + "\n");
}

Dataset load_dataset(const std::filesystem::path& dir) {
  Dataset dataset;
  dataset.rows = parse_dataset_csv(io::read_file(dir / "dataset.csv"));
  const auto meta_path = dir / "dataset.meta.json";
  if (std::filesystem::exists(meta_path)) {
    const auto doc = nlohmann::json::parse(io::read_file(meta_path));
    auto& p = dataset.provenance;
    p.seed = doc.value("seed", std::uint64_t{0});
    p.config_hash = doc.value("config_hash", std::string{});
    p.oracle_version = doc.value("oracle_version", std::string{kOracleVersion});
    p.config = doc.value("config", nlohmann::json::object());
    p.n_attempted = doc.value("n_attempted", std::size_t{0});
    p.n_feasible = doc.value("n_feasible", std::size_t{0});
    p.convergence_rate = doc.value("convergence_rate", 0.0);
    if (doc.contains("scaling") && !doc.at("scaling").is_null()) {
      dataset.scaling = scaling_from_json(doc.at("scaling"));
    }
  }
  return dataset;
}

std::string format_features_csv(std::span<const FeatureVector> rows) {
  std::string out = features_header() + '\n';
  for (const auto& row : rows) {
    append_features(out, row);
    out += '\n';
  }
  return out;
}

std::vector<FeatureVector> parse_features_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::ParseError, "feature file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind(features_header(), 0) != 0) {
    throw Error(Errc::ParseError, "line 1: unexpected feature header");
  }
  std::vector<FeatureVector> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = io::split_csv_line(line);
    if (fields.size() < kFeatureDim) {
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": too few fields");
    }
    rows.push_back(parse_feature_fields(fields, line_no));
  }
  return rows;
}

}  // namespace ltgan::pipeline
