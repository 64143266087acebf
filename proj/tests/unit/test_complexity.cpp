#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <random>

#include "coalex/complexity.hpp"
#include "coalex/errors.hpp"
#include "coalex/evaluation.hpp"
#include "coalex/synthetic.hpp"
#include "support.hpp"

using namespace coalex;
using Groups = std::vector<std::vector<std::size_t>>;

namespace {

Coalition coalition_of(const Groups& groups, std::size_t n) {
  std::vector<AttributeSubset> subsets;
  for (const auto& g : groups) subsets.push_back(AttributeSubset::of(n, g));
  return Coalition::normalize(subsets, n);
}

// Columns of a 16x16 Sylvester Hadamard matrix, skipping the constant one:
// centered, pairwise orthogonal, so every rank correlation is exactly 0.
Dataset hadamard_columns(std::size_t n) {
  std::vector<std::vector<double>> cols;
  for (std::size_t c = 1; c <= n; ++c) {
    std::vector<double> col(16);
    for (std::size_t r = 0; r < 16; ++r) col[r] = std::popcount(r & c) % 2 == 0 ? 1.0 : -1.0;
    cols.push_back(col);
  }
  return fixtures::from_columns(cols, fixtures::alternating_labels(16));
}

}  // namespace

TEST(Closure, LinearAndCompleteCounts) {
  EXPECT_EQ(closure_size(Coalition::singletons(7)), 7u);
  EXPECT_EQ(closure_size(Coalition::single_group(7)), 127u);
  EXPECT_DOUBLE_EQ(complete_complexity(7), 127.0);
}

TEST(Closure, OverlappingGroups) {
  const Groups groups{{0, 1, 2}, {1, 2, 3}};
  // 7 + 7 non-empty subsets, minus {1}, {2} and {1,2} counted twice.
  EXPECT_EQ(fixtures::brute_closure_size(groups, 4), 11u);
  EXPECT_EQ(closure_size(coalition_of(groups, 4)), 11u);
  const auto subsets = closure(coalition_of(groups, 4));
  EXPECT_EQ(subsets.size(), 11u);
  EXPECT_TRUE(std::is_sorted(subsets.begin(), subsets.end()));
}

TEST(Closure, MatchesBruteForceOnRandomCoalitions) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 9;
    Groups groups;
    const std::size_t count = rng() % 4;
    for (std::size_t g = 0; g < count; ++g) {
      std::vector<std::size_t> members;
      for (std::size_t a = 0; a < n; ++a) {
        if (rng() % 2 == 0) members.push_back(a);
      }
      groups.push_back(members);
    }
    const Coalition c = coalition_of(groups, n);
    EXPECT_EQ(closure_size(c), fixtures::brute_closure_size(groups, n));
    const double p = complexity_proportion(c);
    EXPECT_GT(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
}

TEST(Closure, Proportions) {
  EXPECT_DOUBLE_EQ(complexity_proportion(Coalition::singletons(4)), 4.0 / 15.0);
  EXPECT_DOUBLE_EQ(complexity_proportion(Coalition::single_group(6)), 1.0);
}

TEST(Closure, RefusesHugeGroups) { EXPECT_THROW(closure_size(Coalition::single_group(25)), CapExceeded); }

TEST(ComplexityReport, Fields) {
  const auto r = complexity_report(coalition_of({{0, 1, 2}, {1, 2, 3}}, 4));
  EXPECT_EQ(r.closure_size, 11u);
  EXPECT_DOUBLE_EQ(r.complete_size, 15.0);
  EXPECT_DOUBLE_EQ(r.proportion, 11.0 / 15.0);
  EXPECT_DOUBLE_EQ(r.group_count, 2.0);
  EXPECT_DOUBLE_EQ(r.mean_group_size, 3.0);
}

TEST(GroupStats, Examples) {
  const auto a = group_stats(Coalition::singletons(5));
  EXPECT_EQ(a.count, 5u);
  EXPECT_DOUBLE_EQ(a.mean_size, 1.0);
  const auto b = group_stats(coalition_of({{0, 1, 2}, {3}}, 4));
  EXPECT_EQ(b.count, 2u);
  EXPECT_DOUBLE_EQ(b.mean_size, 2.0);
  const auto c = group_stats(coalition_of({{0, 1, 2}, {1, 2, 3}}, 4));
  EXPECT_EQ(c.count, 2u);
  EXPECT_DOUBLE_EQ(c.mean_size, 3.0);
}

TEST(FindThreshold, UnreachableTargetFlagsClosest) {
  const Dataset d = hadamard_columns(9);
  const PreparedGrouping prepared(GroupingMethod::spearman, d);
  for (int i = 1; i < 200; ++i) EXPECT_EQ(closure_size(prepared.at(0.5 * i / 200.0)), 9u);
  const auto found = find_threshold(prepared, 0.10);
  EXPECT_DOUBLE_EQ(found.achieved, 9.0 / 511.0);
  EXPECT_TRUE(found.closest_achievable);
}

TEST(FindThreshold, FullBlockReachesEverything) {
  std::mt19937_64 rng(3);
  const auto x = fixtures::gaussian_column(rng, 50);
  std::vector<std::vector<double>> cols{x};
  for (int k = 1; k < 5; ++k) {
    std::vector<double> col;
    for (double v : x) col.push_back(k % 2 == 0 ? std::exp(v * k) : -v * k);
    cols.push_back(col);
  }
  const Dataset d = fixtures::from_columns(cols, fixtures::alternating_labels(50));
  const auto found = find_threshold(GroupingMethod::spearman, d, 1.0);
  EXPECT_DOUBLE_EQ(found.achieved, 1.0);
  EXPECT_FALSE(found.closest_achievable);
  EXPECT_GT(found.threshold, 0.0);
  EXPECT_LT(found.threshold, 0.5);
}

TEST(FindThreshold, AgreesWithGridScan) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    SyntheticConfig cfg;
    cfg.attributes = 7;
    cfg.rows = 150;
    cfg.seed = seed;
    const Dataset d = make_synthetic(cfg);
    for (auto method : {GroupingMethod::pca, GroupingMethod::vif, GroupingMethod::rev_vif, GroupingMethod::spearman,
                        GroupingMethod::rev_spearman}) {
      const PreparedGrouping prepared(method, d);
      const auto found = find_threshold(prepared, 0.25);
      EXPECT_EQ(complexity_proportion(found.coalition), found.achieved);
      EXPECT_EQ(prepared.at(found.threshold), found.coalition);
      if (!found.closest_achievable) EXPECT_LE(std::abs(found.achieved - 0.25), 0.02);
      bool grid_hit = false;
      for (int i = 1; i < 200; ++i) {
        grid_hit |= std::abs(complexity_proportion(prepared.at(0.5 * i / 200.0)) - 0.25) <= 0.02;
      }
      if (grid_hit) EXPECT_FALSE(found.closest_achievable) << to_string(method) << " seed " << seed;
    }
  }
}

TEST(FindThreshold, RejectsBadArguments) {
  const Dataset d = hadamard_columns(3);
  EXPECT_THROW(find_threshold(GroupingMethod::spearman, d, 0.0), std::invalid_argument);
  EXPECT_THROW(find_threshold(GroupingMethod::spearman, d, 1.5), std::invalid_argument);
  EXPECT_THROW(find_threshold(GroupingMethod::model_based, d, 0.5), std::invalid_argument);
}
