#pragma once

// Two-body orbital mechanics in the heliocentric AU-day unit system.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <numbers>

namespace ltgan::astro {

// Standard solar GM in AU^3/day^2 (Gaussian gravitational constant squared).
inline constexpr double kMuSun = 2.9591220828559e-4;
inline constexpr double kAuKm = 149597870.7;
inline constexpr double kDaySec = 86400.0;
// 1 AU/day expressed in km/s.
inline constexpr double kAuPerDayToKmPerSec = kAuKm / kDaySec;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Vec3 = Eigen::Vector3d;

struct GravParam {
  double mu = kMuSun;
};

// Elliptic classical elements. Lengths in AU, angles in radians.
struct ClassicalElements {
  double a = 1.0;
  double e = 0.0;
  double i = 0.0;
  double raan = 0.0;
  double argp = 0.0;
  double nu = 0.0;

  // Validates a > 0, 0 <= e < 1, 0 <= i < pi and normalizes raan/argp/nu to
  // [0, 2pi). Throws Error(InvalidElements) naming the offending field.
  static ClassicalElements make(double a, double e, double i, double raan, double argp,
                                double nu);
};

// Modified equinoctial elements (p, f, g, h, k, L).
struct Mee {
  double p = 1.0;
  double f = 0.0;
  double g = 0.0;
  double h = 0.0;
  double k = 0.0;
  double L = 0.0;
};

struct StateVector {
  Vec3 r = Vec3::Zero();  // AU
  Vec3 v = Vec3::Zero();  // AU/day
  double t = 0.0;         // day
};

struct LambertSolution {
  Vec3 v1;
  Vec3 v2;
};

// Wraps an angle into [0, 2pi).
double wrap_two_pi(double angle);
// Wraps an angle into (-pi, pi].
double wrap_pi(double angle);

void validate(const ClassicalElements& el);
void validate(const Mee& mee);

Mee classical_to_mee(const ClassicalElements& el);
ClassicalElements mee_to_classical(const Mee& mee);

// Solves Kepler's equation E - e sin E = M for the eccentric anomaly.
double solve_kepler(double mean_anomaly, double e);

double true_to_mean_anomaly(double nu, double e);
double mean_to_true_anomaly(double mean_anomaly, double e);

double orbital_period(double a, GravParam mu = {});

// Elements advanced from epoch0 to t (only the true anomaly changes).
ClassicalElements elements_at(const ClassicalElements& el, double epoch0, double t,
                              GravParam mu = {});

// Cartesian state of the elements as given (no time advance), stamped with t.
StateVector to_state(const ClassicalElements& el, double t, GravParam mu = {});

StateVector propagate(const ClassicalElements& el, double epoch0, double t, GravParam mu = {});

// Inverse of to_state for bound orbits. Throws InvalidElements for e >= 1.
ClassicalElements from_state(const StateVector& state, GravParam mu = {});

// Zero-revolution prograde Lambert solver using universal variables. The
// transfer direction is chosen so the orbit normal has a positive z
// component. Throws NearCollinear when the transfer angle is within 1e-3 rad
// of 0 or pi, NoConvergence when no solution bracket exists.
LambertSolution lambert(const Vec3& r1, const Vec3& r2, double tof, GravParam mu = {});

double orbital_energy(const ClassicalElements& el, GravParam mu = {});
double angular_momentum(const ClassicalElements& el, GravParam mu = {});

// Same quantities evaluated directly on equinoctial elements.
double orbital_energy(const Mee& mee, GravParam mu = {});
double angular_momentum(const Mee& mee, GravParam mu = {});

}  // namespace ltgan::astro
