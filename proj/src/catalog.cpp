#include "ltgan/catalog.hpp"

#include <cmath>
#include <sstream>

#include "ltgan/error.hpp"
#include "ltgan/io.hpp"

namespace ltgan::pipeline {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr std::string_view kCatalogHeader = "id,a_au,e,i_deg,raan_deg,argp_deg,nu_deg,epoch_day";

void check_range(const char* name, Range r) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.hi < r.lo) {
    throw Error(Errc::InvalidArgument, std::string("invalid range for ") + name);
  }
}

}  // namespace

Catalog::Catalog(std::vector<Asteroid> bodies) : bodies_(std::move(bodies)) {
  for (std::size_t i = 0; i < bodies_.size(); ++i) {
    astro::validate(bodies_[i].elements);
    if (!index_.emplace(bodies_[i].id, i).second) {
      throw Error(Errc::InvalidArgument, "duplicate asteroid id " + bodies_[i].id);
    }
  }
}

const Asteroid& Catalog::find(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(Errc::InvalidArgument, "unknown asteroid id " + id);
  return bodies_[it->second];
}

Catalog synth_catalog(std::size_t n, const ElementRanges& ranges, std::uint64_t seed) {
  if (n < 2) throw Error(Errc::InvalidArgument, "synthetic catalog needs n >= 2");
  check_range("a", ranges.a);
  check_range("e", ranges.e);
  check_range("i_deg", ranges.i_deg);
  check_range("raan_deg", ranges.raan_deg);
  check_range("argp_deg", ranges.argp_deg);
  check_range("nu_deg", ranges.nu_deg);
  if (ranges.a.lo <= 0.0 || ranges.e.lo < 0.0 || ranges.e.hi >= 1.0 || ranges.i_deg.lo < 0.0 ||
      ranges.i_deg.hi >= 180.0) {
    throw Error(Errc::InvalidArgument, "element ranges leave the elliptic prograde domain");
  }

  Rng rng(seed);
  std::vector<Asteroid> bodies;
  bodies.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Asteroid body;
    char id[32];
    std::snprintf(id, sizeof(id), "SYN%05zu", k + 1);
    body.id = id;
    const double a = rng.uniform(ranges.a.lo, ranges.a.hi);
    const double e = rng.uniform(ranges.e.lo, ranges.e.hi);
    const double i = rng.uniform(ranges.i_deg.lo, ranges.i_deg.hi) * kDeg;
    const double raan = rng.uniform(ranges.raan_deg.lo, ranges.raan_deg.hi) * kDeg;
    const double argp = rng.uniform(ranges.argp_deg.lo, ranges.argp_deg.hi) * kDeg;
    const double nu = rng.uniform(ranges.nu_deg.lo, ranges.nu_deg.hi) * kDeg;
    body.elements = astro::ClassicalElements::make(a, e, i, raan, argp, nu);
    body.epoch = ranges.epoch;
    bodies.push_back(std::move(body));
  }
  return Catalog(std::move(bodies));
}

Catalog parse_catalog(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw Error(Errc::EmptyCatalog, "catalog file is empty");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCatalogHeader) {
    throw Error(Errc::ParseError, "line 1: expected header '" + std::string(kCatalogHeader) + "'");
  }
  static const char* kFields[] = {"a_au", "e", "i_deg", "raan_deg", "argp_deg", "nu_deg",
                                  "epoch_day"};
  std::vector<Asteroid> bodies;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = io::split_csv_line(line);
    const std::string where = "line " + std::to_string(line_no);
    if (fields.size() != 8) {
      throw Error(Errc::ParseError, where + ": expected 8 fields, got " +
                                        std::to_string(fields.size()));
    }
    double values[7];
    for (int f = 0; f < 7; ++f) {
      try {
        values[f] = io::parse_double(fields[f + 1]);
      } catch (const Error&) {
        throw Error(Errc::ParseError, where + ": field " + kFields[f] + " is not a number");
      }
    }
    Asteroid body;
    body.id = fields[0];
    if (body.id.empty()) throw Error(Errc::ParseError, where + ": empty id");
    try {
      body.elements = astro::ClassicalElements::make(values[0], values[1], values[2] * kDeg,
                                                     values[3] * kDeg, values[4] * kDeg,
                                                     values[5] * kDeg);
    } catch (const Error& err) {
      throw Error(Errc::InvalidElements, where + ": " + err.what());
    }
    body.epoch = values[6];
    if (!std::isfinite(body.epoch)) {
      throw Error(Errc::InvalidElements, where + ": epoch_day must be finite");
    }
    bodies.push_back(std::move(body));
  }
  if (bodies.empty()) throw Error(Errc::EmptyCatalog, "catalog has no rows");
  return Catalog(std::move(bodies));
}

Catalog load_catalog(const std::filesystem::path& path) {
  return parse_catalog(io::read_file(path));
}

std::string format_catalog(const Catalog& catalog) {
  std::string out(kCatalogHeader);
  out += '\n';
  for (const auto& body : catalog.bodies()) {
    const auto& el = body.elements;
    out += body.id;
    for (double v : {el.a, el.e, el.i / kDeg, el.raan / kDeg, el.argp / kDeg, el.nu / kDeg,
                     body.epoch}) {
      out += ',';
      out += io::format_double(v);
    }
    out += '\n';
  }
  return out;
}

void save_catalog(const Catalog& catalog, const std::filesystem::path& path) {
  io::write_file(path, format_catalog(catalog));
}

double true_longitude(const Asteroid& body, double t, astro::GravParam mu) {
  const auto el = astro::elements_at(body.elements, body.epoch, t, mu);
  return astro::wrap_two_pi(el.raan + el.argp + el.nu);
}

bool pair_passes(const Asteroid& a, const Asteroid& b, const PairFilter& filter, double t_ref,
                 astro::GravParam mu) {
  if (std::abs(a.elements.a - b.elements.a) > filter.max_da) return false;
  if (std::abs(a.elements.i - b.elements.i) > filter.max_di) return false;
  const double dl = astro::wrap_pi(true_longitude(a, t_ref, mu) - true_longitude(b, t_ref, mu));
  return std::abs(dl) <= filter.max_dL;
}

std::pair<const Asteroid*, const Asteroid*> sample_pair(const Catalog& catalog,
                                                        const PairFilter& filter, double t_ref,
                                                        Rng& rng, astro::GravParam mu,
                                                        int max_attempts) {
  if (catalog.size() < 2) throw Error(Errc::NoFeasiblePair, "catalog has fewer than 2 bodies");
  if (!(filter.max_da > 0.0 && filter.max_di > 0.0 && filter.max_dL > 0.0)) {
    throw Error(Errc::InvalidArgument, "pair filter thresholds must be positive");
  }
  const auto n = catalog.size();
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const auto i = rng.index(n);
    auto j = rng.index(n - 1);
    if (j >= i) ++j;
    if (pair_passes(catalog[i], catalog[j], filter, t_ref, mu)) {
      return {&catalog[i], &catalog[j]};
    }
  }
  throw Error(Errc::NoFeasiblePair,
              "no pair passed the filter in " + std::to_string(max_attempts) + " draws");
}

}  // namespace ltgan::pipeline
