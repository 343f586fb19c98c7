#include "ltgan/features.hpp"

#include "ltgan/error.hpp"

namespace ltgan::pipeline {

namespace {

astro::Mee read_mee(const std::array<double, kFeatureDim>& v, std::size_t at) {
  return {v[at], v[at + 1], v[at + 2], v[at + 3], v[at + 4], v[at + 5]};
}

void write_mee(std::array<double, kFeatureDim>& v, std::size_t at, const astro::Mee& m) {
  v[at] = m.p;
  v[at + 1] = m.f;
  v[at + 2] = m.g;
  v[at + 3] = m.h;
  v[at + 4] = m.k;
  v[at + 5] = m.L;
}

}  // namespace

const std::array<std::string_view, kFeatureDim>& feature_names() {
  static constexpr std::array<std::string_view, kFeatureDim> kNames = {
      "m_i", "dt_lt", "p1", "f1", "g1", "h1", "k1", "L1", "p2", "f2", "g2",
      "h2",  "k2",    "L2", "dp", "df", "dg", "dh", "dk", "dL", "dE", "dH"};
  return kNames;
}

std::size_t feature_index(std::string_view name) {
  const auto& names = feature_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  throw Error(Errc::InvalidArgument, "unknown feature " + std::string(name));
}

astro::Mee FeatureVector::mee1() const { return read_mee(values, col::kMee1); }
astro::Mee FeatureVector::mee2() const { return read_mee(values, col::kMee2); }

std::array<double, 8> derived_deltas(const astro::Mee& mee1, const astro::Mee& mee2,
                                     astro::GravParam mu) {
  return {mee1.p - mee2.p,
          mee1.f - mee2.f,
          mee1.g - mee2.g,
          mee1.h - mee2.h,
          mee1.k - mee2.k,
          mee1.L - mee2.L,
          astro::orbital_energy(mee1, mu) - astro::orbital_energy(mee2, mu),
          astro::angular_momentum(mee1, mu) - astro::angular_momentum(mee2, mu)};
}

FeatureVector make_features(double m_i, double dt_lt, const astro::Mee& mee1,
                            const astro::Mee& mee2, astro::GravParam mu) {
  FeatureVector fv;
  fv[col::kMi] = m_i;
  fv[col::kDtLt] = dt_lt;
  write_mee(fv.values, col::kMee1, mee1);
  write_mee(fv.values, col::kMee2, mee2);
  const auto deltas = derived_deltas(mee1, mee2, mu);
  for (std::size_t j = 0; j < deltas.size(); ++j) fv[kDerivedColumns[j]] = deltas[j];
  return fv;
}

FeatureVector extract_features(const TransferCandidate& cand, const Catalog& catalog,
                               astro::GravParam mu) {
  const auto& from = catalog.find(cand.from_id);
  const auto& to = catalog.find(cand.to_id);
  const auto mee1 =
      astro::classical_to_mee(astro::elements_at(from.elements, from.epoch, cand.t0, mu));
  const auto mee2 = astro::classical_to_mee(astro::elements_at(to.elements, to.epoch, cand.t0, mu));
  return make_features(cand.m_i, cand.dt_lt, mee1, mee2, mu);
}

}  // namespace ltgan::pipeline
