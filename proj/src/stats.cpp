#include "ltgan/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ltgan/error.hpp"

namespace ltgan::stats {

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error(Errc::InvalidArgument, "quantile of empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(Errc::InvalidArgument, "KS statistic of empty sample");
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

std::vector<std::size_t> histogram(std::span<const double> values, double lo, double hi,
                                   std::size_t n_bins) {
  if (n_bins == 0 || !(hi >= lo)) throw Error(Errc::InvalidArgument, "invalid histogram range");
  std::vector<std::size_t> counts(n_bins, 0);
  const double width = (hi - lo) / static_cast<double>(n_bins);
  for (double v : values) {
    if (!(v >= lo && v <= hi)) continue;
    auto bin = width > 0.0 ? static_cast<std::size_t>((v - lo) / width) : 0;
    counts[std::min(bin, n_bins - 1)]++;
  }
  return counts;
}

BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) throw Error(Errc::InvalidArgument, "box statistics of empty sample");
  std::sort(values.begin(), values.end());
  BoxStats s;
  s.min = values.front();
  s.max = values.back();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  s.q1 = quantile_sorted(values, 0.25);
  s.median = quantile_sorted(values, 0.5);
  s.q3 = quantile_sorted(values, 0.75);
  const double iqr = s.q3 - s.q1;
  const double fence_lo = s.q1 - 1.5 * iqr, fence_hi = s.q3 + 1.5 * iqr;
  s.whisker_lo = s.q1;
  s.whisker_hi = s.q3;
  for (double v : values) {
    if (v < fence_lo || v > fence_hi) {
      ++s.outliers;
      continue;
    }
    s.whisker_lo = std::min(s.whisker_lo, v);
    s.whisker_hi = std::max(s.whisker_hi, v);
  }
  s.degenerate = s.q1 == s.median && s.median == s.q3;
  return s;
}

}  // namespace ltgan::stats
