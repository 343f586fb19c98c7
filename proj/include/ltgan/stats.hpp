#pragma once

// Descriptive statistics shared by collapse detection and evaluation.

#include <cstddef>
#include <span>
#include <vector>

namespace ltgan::stats {

// Linear-interpolation quantile of sorted data: position q * (n - 1).
double quantile_sorted(std::span<const double> sorted, double q);

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b| of sorted samples.
double ks_statistic(std::span<const double> sorted_a, std::span<const double> sorted_b);

// Counts per equal-width bin over [lo, hi]; values outside are dropped and
// hi falls into the last bin.
std::vector<std::size_t> histogram(std::span<const double> values, double lo, double hi,
                                   std::size_t n_bins);

struct BoxStats {
  double min = 0.0, max = 0.0, mean = 0.0, median = 0.0, q1 = 0.0, q3 = 0.0;
  double whisker_lo = 0.0, whisker_hi = 0.0;  // furthest data within 1.5 IQR
  std::size_t outliers = 0;
  bool degenerate = false;  // q1 == median == q3
};

// Unsorted input; throws InvalidArgument when empty.
BoxStats box_stats(std::vector<double> values);

}  // namespace ltgan::stats
