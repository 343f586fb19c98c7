#pragma once

// Impulsive grid search, transfer initialization and the analytic low-thrust
// feasibility oracle.

#include <string>
#include <string_view>

#include "ltgan/astro.hpp"
#include "ltgan/catalog.hpp"
#include "ltgan/rng.hpp"

namespace ltgan::pipeline {

// Longest admissible low-thrust time of flight (four years).
inline constexpr double kMaxTofDays = 4.0 * 365.0;

struct SpacecraftModel {
  double m_dry = 1000.0;        // kg
  Range m0_range{1000.0, 3000.0};  // kg
  double thrust_max = 0.236;    // N
  double isp = 4190.0;          // s
  double g0 = 9.80665;          // m/s^2
  double v_e = 41.09;           // km/s, must agree with isp * g0

  // Throws InvalidArgument naming the violated invariant.
  void validate() const;
};

struct OracleParams {
  double kappa = 1.15;     // low-thrust penalty on the impulsive delta-v
  double eta_duty = 0.9;   // usable fraction of the flight spent thrusting
};

struct TransferCandidate {
  std::string from_id;
  std::string to_id;
  double t0 = 0.0;        // day
  double m_i = 0.0;       // kg
  double dt_lt = 0.0;     // day
  double dt_impls = 0.0;  // day
};

enum class RejectReason { None, Propellant, ThrustDuration, LambertFailure };

std::string_view to_string(RejectReason reason);

struct FeasibilityReport {
  bool feasible = false;
  double dv_required = 0.0;        // km/s
  double dv_propellant_cap = 0.0;  // km/s
  double dv_thrust_cap = 0.0;      // km/s
  double m_final_est = 0.0;        // kg
  RejectReason reject_reason = RejectReason::None;
};

struct ImpulsiveGrid {
  double t0_lo = 0.0;
  double t0_hi = 730.0;
  double t0_step = 20.0;
  double tof_lo = 50.0;
  double tof_hi = 730.0;
  double tof_step = 10.0;
};

struct ImpulsiveResult {
  double dv_min = 0.0;    // km/s
  double dt_impls = 0.0;  // day
  double t0_best = 0.0;   // day
};

// Two-impulse rendezvous cost in km/s for leaving `dep` and matching `arr`.
double rendezvous_dv(const astro::StateVector& dep, const astro::StateVector& arr,
                     const astro::LambertSolution& sol);

// Exhaustive (t0, tof) scan; cells where Lambert fails are skipped. Throws
// AllLambertFailed if no cell succeeds.
ImpulsiveResult impulsive_grid_search(const Asteroid& from, const Asteroid& to,
                                      const ImpulsiveGrid& grid, astro::GravParam mu = {});

// Bounds 1.2 * dt_impls <= dt_lt <= min(2 * dt_impls, 1460). Throws
// EmptyTofWindow when the window is empty.
Range tof_window(double dt_impls);

TransferCandidate init_transfer(const Asteroid& from, const Asteroid& to, double t0,
                                double dt_impls, const SpacecraftModel& sc, Rng& rng);

// Oracle on the two bodies' equinoctial elements at the departure epoch. The
// arrival body is propagated by dt_lt to obtain the rendezvous point.
FeasibilityReport assess_transfer(const astro::Mee& departure, const astro::Mee& arrival,
                                  double m_i, double dt_lt, const SpacecraftModel& sc,
                                  const OracleParams& params, astro::GravParam mu = {});

FeasibilityReport feasibility_oracle(const TransferCandidate& cand, const Catalog& catalog,
                                     const SpacecraftModel& sc, const OracleParams& params,
                                     astro::GravParam mu = {});

}  // namespace ltgan::pipeline
