#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ltgan/astro.hpp"
#include "ltgan/rng.hpp"

namespace ltgan::pipeline {

struct Asteroid {
  std::string id;
  astro::ClassicalElements elements;
  double epoch = 0.0;  // day
};

class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::vector<Asteroid> bodies);

  const std::vector<Asteroid>& bodies() const { return bodies_; }
  std::size_t size() const { return bodies_.size(); }
  const Asteroid& operator[](std::size_t index) const { return bodies_[index]; }
  // Throws InvalidArgument for an unknown id.
  const Asteroid& find(const std::string& id) const;

 private:
  std::vector<Asteroid> bodies_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

// Sampling box for synthetic catalogs; angles in degrees.
struct ElementRanges {
  Range a{0.7, 1.8};
  Range e{0.0, 0.6};
  Range i_deg{0.0, 10.0};
  Range raan_deg{0.0, 360.0};
  Range argp_deg{0.0, 360.0};
  Range nu_deg{0.0, 360.0};
  double epoch = 0.0;
};

Catalog synth_catalog(std::size_t n, const ElementRanges& ranges, std::uint64_t seed);

// CSV header: id,a_au,e,i_deg,raan_deg,argp_deg,nu_deg,epoch_day
Catalog load_catalog(const std::filesystem::path& path);
Catalog parse_catalog(const std::string& text);
std::string format_catalog(const Catalog& catalog);
void save_catalog(const Catalog& catalog, const std::filesystem::path& path);

struct PairFilter {
  double max_da = 0.3;                                 // AU
  double max_di = 3.0 * std::numbers::pi / 180.0;      // rad
  double max_dL = 30.0 * std::numbers::pi / 180.0;     // rad
};

double true_longitude(const Asteroid& body, double t, astro::GravParam mu = {});

bool pair_passes(const Asteroid& a, const Asteroid& b, const PairFilter& filter, double t_ref,
                 astro::GravParam mu = {});

// Rejection-samples an ordered pair of distinct bodies passing the filter.
// Throws NoFeasiblePair after max_attempts draws.
std::pair<const Asteroid*, const Asteroid*> sample_pair(const Catalog& catalog,
                                                        const PairFilter& filter, double t_ref,
                                                        Rng& rng, astro::GravParam mu = {},
                                                        int max_attempts = 20000);

}  // namespace ltgan::pipeline
