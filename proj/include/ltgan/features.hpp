#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

#include "ltgan/astro.hpp"
#include "ltgan/catalog.hpp"
#include "ltgan/oracle.hpp"

namespace ltgan::pipeline {

inline constexpr std::size_t kFeatureDim = 22;
inline constexpr std::string_view kFeatureOrdering = "m_i,dt_lt,mee1[6],mee2[6],d_mee[6],dE,dH/v1";

// Column positions in the fixed 22-feature layout.
namespace col {
inline constexpr std::size_t kMi = 0;
inline constexpr std::size_t kDtLt = 1;
inline constexpr std::size_t kMee1 = 2;
inline constexpr std::size_t kMee2 = 8;
inline constexpr std::size_t kDMee = 14;
inline constexpr std::size_t kDE = 20;
inline constexpr std::size_t kDH = 21;
}  // namespace col

const std::array<std::string_view, kFeatureDim>& feature_names();
// Throws InvalidArgument for unknown names.
std::size_t feature_index(std::string_view name);

// The eight columns summarized in the feasible-database overview table.
inline constexpr std::array<std::size_t, 8> kOverviewColumns = {
    col::kDtLt, col::kMi, col::kDMee + 0, col::kDMee + 1,
    col::kDMee + 2, col::kDMee + 3, col::kDMee + 4, col::kDMee + 5};

// Redundant columns (d_mee, dE, dH) that must be derivable from mee1/mee2.
inline constexpr std::array<std::size_t, 8> kDerivedColumns = {
    col::kDMee + 0, col::kDMee + 1, col::kDMee + 2, col::kDMee + 3,
    col::kDMee + 4, col::kDMee + 5, col::kDE,       col::kDH};

struct FeatureVector {
  std::array<double, kFeatureDim> values{};

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  double m_i() const { return values[col::kMi]; }
  double dt_lt() const { return values[col::kDtLt]; }
  astro::Mee mee1() const;
  astro::Mee mee2() const;

  bool operator==(const FeatureVector&) const = default;
};

// d_mee, dE, dH in kDerivedColumns order. The longitude difference is the raw
// difference of the two [0, 2pi) longitudes and so spans [-2pi, 2pi].
std::array<double, 8> derived_deltas(const astro::Mee& mee1, const astro::Mee& mee2,
                                     astro::GravParam mu = {});

FeatureVector make_features(double m_i, double dt_lt, const astro::Mee& mee1,
                            const astro::Mee& mee2, astro::GravParam mu = {});

// Both bodies' equinoctial elements are taken at the departure epoch t0.
FeatureVector extract_features(const TransferCandidate& cand, const Catalog& catalog,
                               astro::GravParam mu = {});

}  // namespace ltgan::pipeline
