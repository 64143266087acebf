#include "coalex/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "coalex/errors.hpp"

namespace coalex {

namespace {

constexpr std::size_t kMaxEnumeratedGroup = 24;

std::unordered_set<std::uint64_t> closure_masks(const Coalition& g) {
  std::unordered_set<std::uint64_t> seen;
  for (std::size_t a = 0; a < g.attribute_count(); ++a) seen.insert(std::uint64_t{1} << a);
  for (const auto& group : g.groups()) {
    if (group.size() > kMaxEnumeratedGroup) {
      throw CapExceeded("closure refused: group of " + std::to_string(group.size()) + " attributes");
    }
    const std::uint64_t full = group.mask();
    for (std::uint64_t sub = full; sub != 0; sub = (sub - 1) & full) seen.insert(sub);
  }
  return seen;
}

}  // namespace

std::vector<AttributeSubset> closure(const Coalition& g) {
  const auto masks = closure_masks(g);
  std::vector<AttributeSubset> out;
  out.reserve(masks.size());
  for (std::uint64_t m : masks) out.emplace_back(g.attribute_count(), m);
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t closure_size(const Coalition& g) { return closure_masks(g).size(); }

double complete_complexity(std::size_t n) { return std::ldexp(1.0, static_cast<int>(n)) - 1.0; }

double complexity_proportion(const Coalition& g) {
  if (g.attribute_count() < 1) throw std::invalid_argument("complexity_proportion: empty universe");
  return static_cast<double>(closure_size(g)) / complete_complexity(g.attribute_count());
}

ComplexityReport complexity_report(const Coalition& g) {
  ComplexityReport r;
  r.closure_size = closure_size(g);
  r.complete_size = complete_complexity(g.attribute_count());
  r.proportion = static_cast<double>(r.closure_size) / r.complete_size;
  r.group_count = static_cast<double>(g.size());
  std::size_t total = 0;
  for (const auto& group : g.groups()) total += group.size();
  r.mean_group_size = g.size() == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(g.size());
  return r;
}

ThresholdSearch find_threshold(const PreparedGrouping& grouping, double target,
                               const BisectionOptions& options) {
  if (!is_threshold_method(grouping.method())) {
    throw std::invalid_argument("find_threshold: " + to_string(grouping.method()) +
                                " is not a threshold method");
  }
  if (!(target > 0.0 && target <= 1.0)) throw std::invalid_argument("find_threshold: target outside (0, 1]");
  if (options.max_iter < 1) throw std::invalid_argument("find_threshold: max_iter must be >= 1");

  double lo = options.epsilon;
  double hi = 0.5 - options.epsilon;
  ThresholdSearch best;
  bool have = false;
  for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
    const double mid = 0.5 * (lo + hi);
    Coalition c = grouping.at(mid);
    const double achieved = complexity_proportion(c);
    ++best.probes;
    const double gap = std::abs(achieved - target);
    const double best_gap = std::abs(best.achieved - target);
    if (!have || gap < best_gap || (gap == best_gap && mid < best.threshold)) {
      best.threshold = mid;
      best.achieved = achieved;
      best.coalition = std::move(c);
      have = true;
    }
    if (gap <= options.tol) break;
    if (achieved < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  best.closest_achievable = std::abs(best.achieved - target) > options.tol;
  return best;
}

ThresholdSearch find_threshold(GroupingMethod method, const Dataset& d, double target,
                               const BisectionOptions& options) {
  return find_threshold(PreparedGrouping(method, d), target, options);
}

}  // namespace coalex
