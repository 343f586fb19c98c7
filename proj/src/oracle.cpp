#include "ltgan/oracle.hpp"

#include <cmath>
#include <limits>

#include "ltgan/error.hpp"

namespace ltgan::pipeline {

namespace {

std::size_t grid_count(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) {
    throw Error(Errc::InvalidArgument, "impulsive grid axis is empty");
  }
  return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

}  // namespace

void SpacecraftModel::validate() const {
  if (!(m_dry > 0.0)) throw Error(Errc::InvalidArgument, "m_dry must be positive");
  if (!(m0_range.lo >= m_dry) || !(m0_range.hi >= m0_range.lo)) {
    throw Error(Errc::InvalidArgument, "m0_range must satisfy m_dry <= lo <= hi");
  }
  if (!(thrust_max > 0.0)) throw Error(Errc::InvalidArgument, "thrust_max must be positive");
  if (std::abs(isp * g0 / 1000.0 - v_e) >= 0.01) {
    throw Error(Errc::InvalidArgument, "v_e inconsistent with isp * g0");
  }
}

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::None: return "None";
    case RejectReason::Propellant: return "Propellant";
    case RejectReason::ThrustDuration: return "ThrustDuration";
    case RejectReason::LambertFailure: return "LambertFailure";
  }
  return "Unknown";
}

double rendezvous_dv(const astro::StateVector& dep, const astro::StateVector& arr,
                     const astro::LambertSolution& sol) {
  return ((sol.v1 - dep.v).norm() + (arr.v - sol.v2).norm()) * astro::kAuPerDayToKmPerSec;
}

ImpulsiveResult impulsive_grid_search(const Asteroid& from, const Asteroid& to,
                                      const ImpulsiveGrid& grid, astro::GravParam mu) {
  const auto n_t0 = grid_count(grid.t0_lo, grid.t0_hi, grid.t0_step);
  const auto n_tof = grid_count(grid.tof_lo, grid.tof_hi, grid.tof_step);
  if (!(grid.tof_lo > 0.0)) throw Error(Errc::InvalidArgument, "tof grid must be positive");

  ImpulsiveResult best;
  best.dv_min = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < n_t0; ++a) {
    const double t0 = grid.t0_lo + static_cast<double>(a) * grid.t0_step;
    const auto dep = astro::propagate(from.elements, from.epoch, t0, mu);
    for (std::size_t b = 0; b < n_tof; ++b) {
      const double tof = grid.tof_lo + static_cast<double>(b) * grid.tof_step;
      const auto arr = astro::propagate(to.elements, to.epoch, t0 + tof, mu);
      double dv;
      try {
        dv = rendezvous_dv(dep, arr, astro::lambert(dep.r, arr.r, tof, mu));
      } catch (const Error&) {
        continue;
      }
      if (dv < best.dv_min) best = {dv, tof, t0};
    }
  }
  if (!std::isfinite(best.dv_min)) {
    throw Error(Errc::AllLambertFailed, "every grid cell failed for " + from.id + " -> " + to.id);
  }
  return best;
}

Range tof_window(double dt_impls) {
  if (!(dt_impls > 0.0)) throw Error(Errc::InvalidArgument, "dt_impls must be positive");
  const Range window{1.2 * dt_impls, std::min(2.0 * dt_impls, kMaxTofDays)};
  if (window.lo > window.hi) {
    throw Error(Errc::EmptyTofWindow, "1.2 * dt_impls = " + std::to_string(window.lo) +
                                          " exceeds the TOF ceiling");
  }
  return window;
}

TransferCandidate init_transfer(const Asteroid& from, const Asteroid& to, double t0,
                                double dt_impls, const SpacecraftModel& sc, Rng& rng) {
  const Range window = tof_window(dt_impls);
  TransferCandidate cand;
  cand.from_id = from.id;
  cand.to_id = to.id;
  cand.t0 = t0;
  cand.dt_impls = dt_impls;
  cand.m_i = rng.uniform(sc.m0_range.lo, sc.m0_range.hi);
  cand.dt_lt = rng.uniform(window.lo, window.hi);
  return cand;
}

FeasibilityReport assess_transfer(const astro::Mee& departure, const astro::Mee& arrival,
                                  double m_i, double dt_lt, const SpacecraftModel& sc,
                                  const OracleParams& params, astro::GravParam mu) {
  if (!(dt_lt > 0.0) || !(m_i > 0.0)) {
    throw Error(Errc::InvalidArgument, "assess_transfer needs positive m_i and dt_lt");
  }
  FeasibilityReport report;
  report.dv_propellant_cap = sc.v_e * std::log(m_i / sc.m_dry);
  const double m_mean = 0.5 * (m_i + sc.m_dry);
  report.dv_thrust_cap =
      sc.thrust_max / m_mean * dt_lt * astro::kDaySec * params.eta_duty / 1000.0;

  const auto dep = astro::to_state(astro::mee_to_classical(departure), 0.0, mu);
  const auto arr = astro::propagate(astro::mee_to_classical(arrival), 0.0, dt_lt, mu);
  try {
    report.dv_required = rendezvous_dv(dep, arr, astro::lambert(dep.r, arr.r, dt_lt, mu));
  } catch (const Error&) {
    report.dv_required = std::numeric_limits<double>::infinity();
    report.m_final_est = 0.0;
    report.reject_reason = RejectReason::LambertFailure;
    return report;
  }
  report.m_final_est = m_i * std::exp(-params.kappa * report.dv_required / sc.v_e);
  if (report.m_final_est < sc.m_dry) {
    report.reject_reason = RejectReason::Propellant;
  } else if (params.kappa * report.dv_required > report.dv_thrust_cap) {
    report.reject_reason = RejectReason::ThrustDuration;
  } else {
    report.feasible = true;
  }
  return report;
}

FeasibilityReport feasibility_oracle(const TransferCandidate& cand, const Catalog& catalog,
                                     const SpacecraftModel& sc, const OracleParams& params,
                                     astro::GravParam mu) {
  const auto& from = catalog.find(cand.from_id);
  const auto& to = catalog.find(cand.to_id);
  const auto dep = astro::classical_to_mee(astro::elements_at(from.elements, from.epoch, cand.t0, mu));
  const auto arr = astro::classical_to_mee(astro::elements_at(to.elements, to.epoch, cand.t0, mu));
  return assess_transfer(dep, arr, cand.m_i, cand.dt_lt, sc, params, mu);
}

}  // namespace ltgan::pipeline
