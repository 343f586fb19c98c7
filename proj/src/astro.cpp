#include "ltgan/astro.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ltgan/error.hpp"

namespace ltgan::astro {

namespace {

constexpr double kPi = std::numbers::pi;

[[noreturn]] void reject(const char* field, double value, const char* rule) {
  throw Error(Errc::InvalidElements,
              std::string(field) + " = " + std::to_string(value) + " violates " + rule);
}

// Stumpff functions C(z), S(z). Power series near zero where the closed forms
// lose precision to cancellation.
void stumpff(double z, double& c, double& s) {
  if (std::abs(z) < 1.0) {
    double term_c = 0.5;
    double term_s = 1.0 / 6.0;
    c = term_c;
    s = term_s;
    for (int k = 1; k < 14; ++k) {
      term_c *= -z / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
      term_s *= -z / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
      c += term_c;
      s += term_s;
    }
    return;
  }
  if (z > 0.0) {
    const double sz = std::sqrt(z);
    const double half = std::sin(0.5 * sz);
    c = 2.0 * half * half / z;
    s = (sz - std::sin(sz)) / (z * sz);
  } else {
    const double sz = std::sqrt(-z);
    c = (std::cosh(sz) - 1.0) / (-z);
    s = (std::sinh(sz) - sz) / (-z * sz);
  }
}

}  // namespace

double wrap_two_pi(double angle) {
  double w = std::fmod(angle, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  // fmod of a tiny negative number can round up to exactly 2pi.
  if (w >= kTwoPi) w = 0.0;
  return w;
}

double wrap_pi(double angle) {
  double w = wrap_two_pi(angle);
  if (w > kPi) w -= kTwoPi;
  return w;
}

void validate(const ClassicalElements& el) {
  if (!std::isfinite(el.a) || el.a <= 0.0) reject("a", el.a, "a > 0");
  if (!std::isfinite(el.e) || el.e < 0.0 || el.e >= 1.0) reject("e", el.e, "0 <= e < 1");
  if (!std::isfinite(el.i) || el.i < 0.0 || el.i >= kPi) reject("i", el.i, "0 <= i < pi");
  if (!std::isfinite(el.raan)) reject("raan", el.raan, "finite");
  if (!std::isfinite(el.argp)) reject("argp", el.argp, "finite");
  if (!std::isfinite(el.nu)) reject("nu", el.nu, "finite");
}

void validate(const Mee& mee) {
  if (!std::isfinite(mee.p) || mee.p <= 0.0) reject("p", mee.p, "p > 0");
  const double e2 = mee.f * mee.f + mee.g * mee.g;
  if (!std::isfinite(e2) || e2 >= 1.0) reject("f^2+g^2", e2, "f^2 + g^2 < 1");
  if (!std::isfinite(mee.h)) reject("h", mee.h, "finite");
  if (!std::isfinite(mee.k)) reject("k", mee.k, "finite");
  if (!std::isfinite(mee.L)) reject("L", mee.L, "finite");
}

ClassicalElements ClassicalElements::make(double a, double e, double i, double raan,
                                          double argp, double nu) {
  ClassicalElements el{a, e, i, raan, argp, nu};
  validate(el);
  el.raan = wrap_two_pi(raan);
  el.argp = wrap_two_pi(argp);
  el.nu = wrap_two_pi(nu);
  return el;
}

Mee classical_to_mee(const ClassicalElements& el) {
  validate(el);
  const double lonper = el.argp + el.raan;
  const double tan_half_i = std::tan(0.5 * el.i);
  Mee mee;
  mee.p = el.a * (1.0 - el.e * el.e);
  mee.f = el.e * std::cos(lonper);
  mee.g = el.e * std::sin(lonper);
  mee.h = tan_half_i * std::cos(el.raan);
  mee.k = tan_half_i * std::sin(el.raan);
  mee.L = wrap_two_pi(el.raan + el.argp + el.nu);
  return mee;
}

ClassicalElements mee_to_classical(const Mee& mee) {
  validate(mee);
  ClassicalElements el;
  el.e = std::hypot(mee.f, mee.g);
  el.a = mee.p / (1.0 - el.e * el.e);
  const double tan_half_i = std::hypot(mee.h, mee.k);
  el.i = 2.0 * std::atan(tan_half_i);
  el.raan = tan_half_i > 0.0 ? wrap_two_pi(std::atan2(mee.k, mee.h)) : 0.0;
  // Circular orbits have no periapsis; place it at the node.
  const double lonper = el.e > 0.0 ? std::atan2(mee.g, mee.f) : el.raan;
  el.argp = wrap_two_pi(lonper - el.raan);
  el.nu = wrap_two_pi(mee.L - lonper);
  return el;
}

double solve_kepler(double mean_anomaly, double e) {
  if (!(e >= 0.0 && e < 1.0)) {
    throw Error(Errc::InvalidElements, "solve_kepler requires 0 <= e < 1, got " +
                                           std::to_string(e));
  }
  if (!std::isfinite(mean_anomaly)) {
    throw Error(Errc::InvalidArgument, "solve_kepler: non-finite mean anomaly");
  }
  // Reduce to [-pi, pi], solve on [0, pi] by odd symmetry.
  const double reduced = wrap_pi(mean_anomaly);
  const double offset = mean_anomaly - reduced;
  const double m = std::abs(reduced);
  const double sign = reduced < 0.0 ? -1.0 : 1.0;
  if (m == 0.0) return offset;

  double lo = 0.0;
  double hi = kPi;
  double ecc = e < 0.8 ? m + e * std::sin(m) : kPi;
  ecc = std::clamp(ecc, lo, hi);
  bool converged = false;
  for (int iter = 0; iter < 100; ++iter) {
    const double f = ecc - e * std::sin(ecc) - m;
    if (std::abs(f) < 1e-15) {
      converged = true;
      break;
    }
    if (f > 0.0) {
      hi = ecc;
    } else {
      lo = ecc;
    }
    const double df = 1.0 - e * std::cos(ecc);
    double next = ecc - f / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - ecc) < 1e-16) {
      ecc = next;
      converged = true;
      break;
    }
    ecc = next;
  }
  if (!converged && std::abs(ecc - e * std::sin(ecc) - m) > 1e-13) {
    throw Error(Errc::NoConvergence, "Kepler iteration failed for M=" +
                                         std::to_string(mean_anomaly) + " e=" + std::to_string(e));
  }
  return sign * ecc + offset;
}

double true_to_mean_anomaly(double nu, double e) {
  const double ecc = 2.0 * std::atan2(std::sqrt(1.0 - e) * std::sin(0.5 * nu),
                                      std::sqrt(1.0 + e) * std::cos(0.5 * nu));
  return ecc - e * std::sin(ecc);
}

double mean_to_true_anomaly(double mean_anomaly, double e) {
  const double ecc = solve_kepler(mean_anomaly, e);
  return 2.0 * std::atan2(std::sqrt(1.0 + e) * std::sin(0.5 * ecc),
                          std::sqrt(1.0 - e) * std::cos(0.5 * ecc));
}

double orbital_period(double a, GravParam mu) { return kTwoPi * std::sqrt(a * a * a / mu.mu); }

ClassicalElements elements_at(const ClassicalElements& el, double epoch0, double t,
                              GravParam mu) {
  validate(el);
  if (!std::isfinite(t) || !std::isfinite(epoch0)) {
    throw Error(Errc::InvalidArgument, "elements_at: non-finite epoch");
  }
  ClassicalElements out = el;
  if (t == epoch0) return out;
  const double n = std::sqrt(mu.mu / (el.a * el.a * el.a));
  const double m0 = true_to_mean_anomaly(el.nu, el.e);
  const double m = wrap_two_pi(m0 + n * (t - epoch0));
  out.nu = wrap_two_pi(mean_to_true_anomaly(m, el.e));
  return out;
}

StateVector to_state(const ClassicalElements& el, double t, GravParam mu) {
  validate(el);
  const double p = el.a * (1.0 - el.e * el.e);
  const double radius = p / (1.0 + el.e * std::cos(el.nu));
  const double u = el.argp + el.nu;
  const double cu = std::cos(u), su = std::sin(u);
  const double co = std::cos(el.raan), so = std::sin(el.raan);
  const double ci = std::cos(el.i), si = std::sin(el.i);
  const double cw = std::cos(el.argp), sw = std::sin(el.argp);
  const double vs = std::sqrt(mu.mu / p);

  StateVector s;
  s.t = t;
  s.r = radius * Vec3(co * cu - so * su * ci, so * cu + co * su * ci, su * si);
  const double a1 = su + el.e * sw;
  const double a2 = cu + el.e * cw;
  s.v = vs * Vec3(-(co * a1 + so * a2 * ci), -(so * a1 - co * a2 * ci), a2 * si);
  return s;
}

StateVector propagate(const ClassicalElements& el, double epoch0, double t, GravParam mu) {
  return to_state(elements_at(el, epoch0, t, mu), t, mu);
}

ClassicalElements from_state(const StateVector& state, GravParam mu) {
  const Vec3& r = state.r;
  const Vec3& v = state.v;
  const double rn = r.norm();
  const double v2 = v.squaredNorm();
  const Vec3 h = r.cross(v);
  const double hn = h.norm();
  if (rn <= 0.0 || hn <= 0.0) {
    throw Error(Errc::InvalidElements, "from_state: degenerate state");
  }
  const Vec3 e_vec = ((v2 - mu.mu / rn) * r - r.dot(v) * v) / mu.mu;
  const double inv_a = 2.0 / rn - v2 / mu.mu;
  if (inv_a <= 0.0) reject("e", e_vec.norm(), "0 <= e < 1");

  ClassicalElements el;
  el.a = 1.0 / inv_a;
  el.e = e_vec.norm();
  if (el.e >= 1.0) reject("e", el.e, "0 <= e < 1");
  const Vec3 hhat = h / hn;
  el.i = std::acos(std::clamp(hhat.z(), -1.0, 1.0));

  Vec3 node(-h.y(), h.x(), 0.0);
  const double node_n = node.norm();
  if (node_n > 1e-14 * hn) {
    node /= node_n;
    el.raan = wrap_two_pi(std::atan2(node.y(), node.x()));
  } else {
    node = Vec3::UnitX();
    el.raan = 0.0;
  }
  Vec3 periapsis_dir = node;
  if (el.e > 1e-14) {
    periapsis_dir = e_vec / el.e;
    el.argp = wrap_two_pi(std::atan2(node.cross(periapsis_dir).dot(hhat), node.dot(periapsis_dir)));
  } else {
    el.argp = 0.0;
  }
  el.nu = wrap_two_pi(std::atan2(periapsis_dir.cross(r).dot(hhat), periapsis_dir.dot(r)));
  return el;
}

LambertSolution lambert(const Vec3& r1, const Vec3& r2, double tof, GravParam mu) {
  if (!(tof > 0.0) || !std::isfinite(tof)) {
    throw Error(Errc::InvalidArgument, "lambert: tof must be positive");
  }
  const double r1n = r1.norm();
  const double r2n = r2.norm();
  if (!(r1n > 0.0) || !(r2n > 0.0)) {
    throw Error(Errc::InvalidArgument, "lambert: zero position vector");
  }
  const double cos_dtheta = std::clamp(r1.dot(r2) / (r1n * r2n), -1.0, 1.0);
  double dtheta = std::acos(cos_dtheta);
  if (r1.cross(r2).z() < 0.0) dtheta = kTwoPi - dtheta;

  constexpr double kSingular = 1e-3;
  if (dtheta < kSingular || std::abs(dtheta - kPi) < kSingular || dtheta > kTwoPi - kSingular) {
    throw Error(Errc::NearCollinear,
                "transfer angle " + std::to_string(dtheta) + " rad is within 1e-3 of 0 or pi");
  }

  const double A = std::sin(dtheta) * std::sqrt(r1n * r2n / (1.0 - std::cos(dtheta)));
  const double sqrt_mu = std::sqrt(mu.mu);

  // y(z) and the time of flight it implies; y <= 0 marks the region left of
  // the admissible branch, treated as an infinitely short flight.
  auto evaluate = [&](double z, double& y, double& c, double& s) {
    stumpff(z, c, s);
    y = r1n + r2n + A * (z * s - 1.0) / std::sqrt(c);
    if (y <= 0.0) return -std::numeric_limits<double>::infinity();
    const double chi = std::sqrt(y / c);
    return (chi * chi * chi * s + A * std::sqrt(y)) / sqrt_mu;
  };

  constexpr double kZMax = 4.0 * kPi * kPi;
  double lo = -kZMax;
  double hi = kZMax * (1.0 - 1e-12);
  double y = 0.0, c = 0.0, s = 0.0;
  while (evaluate(lo, y, c, s) > tof) {
    lo *= 2.0;
    if (lo < -1e5) {
      throw Error(Errc::NoConvergence, "lambert: time of flight too short to bracket");
    }
  }
  if (!(evaluate(hi, y, c, s) > tof)) {
    throw Error(Errc::NoConvergence, "lambert: time of flight exceeds zero-revolution range");
  }

  double z = 0.0;
  if (!(z > lo && z < hi)) z = 0.5 * (lo + hi);
  bool converged = false;
  for (int iter = 0; iter < 300; ++iter) {
    const double t = evaluate(z, y, c, s);
    const double residual = t - tof;
    if (std::abs(residual) <= 1e-14 * tof) {
      converged = true;
      break;
    }
    if (residual > 0.0) {
      hi = z;
    } else {
      lo = z;
    }
    double next = 0.5 * (lo + hi);
    if (std::isfinite(t)) {
      double dtdz;
      const double chi3 = std::pow(y / c, 1.5);
      if (std::abs(z) > 1e-3) {
        dtdz = chi3 * ((c - 1.5 * s / c) / (2.0 * z) + 0.75 * s * s / c) +
               0.125 * A * (3.0 * s / c * std::sqrt(y) + A * std::sqrt(c / y));
      } else {
        dtdz = std::sqrt(2.0) / 40.0 * std::pow(y, 1.5) +
               0.125 * A * (std::sqrt(y) + A * std::sqrt(0.5 / y));
      }
      dtdz /= sqrt_mu;
      if (dtdz > 0.0) {
        const double newton = z - residual / dtdz;
        if (newton > lo && newton < hi) next = newton;
      }
    }
    if (hi - lo <= 1e-15 * (1.0 + std::abs(z))) {
      z = next;
      converged = true;
      break;
    }
    z = next;
  }
  if (!converged) {
    throw Error(Errc::NoConvergence, "lambert: iteration limit reached");
  }
  evaluate(z, y, c, s);
  if (!(y > 0.0)) {
    throw Error(Errc::NoConvergence, "lambert: converged outside admissible branch");
  }

  const double f = 1.0 - y / r1n;
  const double g = A * std::sqrt(y / mu.mu);
  const double gdot = 1.0 - y / r2n;
  return {(r2 - f * r1) / g, (gdot * r2 - r1) / g};
}

double orbital_energy(const ClassicalElements& el, GravParam mu) {
  validate(el);
  return -mu.mu / (2.0 * el.a);
}

double angular_momentum(const ClassicalElements& el, GravParam mu) {
  validate(el);
  return std::sqrt(mu.mu * el.a * (1.0 - el.e * el.e));
}

double orbital_energy(const Mee& mee, GravParam mu) {
  validate(mee);
  const double a = mee.p / (1.0 - (mee.f * mee.f + mee.g * mee.g));
  return -mu.mu / (2.0 * a);
}

double angular_momentum(const Mee& mee, GravParam mu) {
  validate(mee);
  return std::sqrt(mu.mu * mee.p);
}

}  // namespace ltgan::astro
