#pragma once

#include <cstddef>
#include <vector>

#include "coalex/coalition.hpp"
#include "coalex/dataset.hpp"
#include "coalex/grouping.hpp"

namespace coalex {

/// Distinct non-empty subsets a coalitional explanation evaluates: every
/// non-empty subset of every group, plus every singleton. Sorted by
/// (size, index list).
std::vector<AttributeSubset> closure(const Coalition& g);
std::size_t closure_size(const Coalition& g);

/// 2^n - 1, the number of non-empty subsets of n attributes.
double complete_complexity(std::size_t n);

/// |closure(g)| / (2^n - 1).
double complexity_proportion(const Coalition& g);

struct ComplexityReport {
  std::size_t closure_size = 0;
  double complete_size = 0.0;
  double proportion = 0.0;
  double group_count = 0.0;
  double mean_group_size = 0.0;
};

ComplexityReport complexity_report(const Coalition& g);

struct BisectionOptions {
  std::size_t max_iter = 20;
  double tol = 0.02;
  double epsilon = 1e-6;  // bracket is [epsilon, 0.5 - epsilon]
};

struct ThresholdSearch {
  double threshold = 0.0;
  double achieved = 0.0;
  Coalition coalition;
  // True when no probe landed within `tol` of the target; the result is
  // then the closest achievable proportion.
  bool closest_achievable = false;
  std::size_t probes = 0;
};

/// Bisection on t over (0, 0.5) for the threshold whose coalition has the
/// requested complexity proportion. Returns the probe closest to `target`
/// (ties to the smaller t); never fails for unreachable targets.
ThresholdSearch find_threshold(const PreparedGrouping& grouping, double target,
                               const BisectionOptions& options = {});
ThresholdSearch find_threshold(GroupingMethod method, const Dataset& d, double target,
                               const BisectionOptions& options = {});

}  // namespace coalex
