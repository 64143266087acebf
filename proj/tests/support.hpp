#pragma once

// Builders and brute-force oracles shared by the unit tests. The oracles
// deliberately avoid the library's own enumeration and weighting code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "coalex/coalition.hpp"
#include "coalex/dataset.hpp"
#include "coalex/influence.hpp"

namespace coalex::fixtures {

inline std::vector<std::string> default_names(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t a = 0; a < n; ++a) names.push_back("a" + std::to_string(a));
  return names;
}

/// Dataset from column vectors.
inline Dataset from_columns(const std::vector<std::vector<double>>& columns, std::vector<std::string> labels,
                            std::vector<std::string> names = {}) {
  const std::size_t n = columns.size();
  const std::size_t m = labels.size();
  if (names.empty()) names = default_names(n);
  std::vector<double> features(n * m);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) features[r * n + c] = columns[c][r];
  }
  return Dataset(std::move(names), std::move(features), std::move(labels));
}

inline std::vector<std::string> alternating_labels(std::size_t m) {
  std::vector<std::string> labels;
  for (std::size_t r = 0; r < m; ++r) labels.push_back(r % 2 == 0 ? "p" : "q");
  return labels;
}

inline std::vector<double> gaussian_column(std::mt19937_64& rng, std::size_t m) {
  std::normal_distribution<double> normal;
  std::vector<double> v(m);
  for (auto& x : v) x = normal(rng);
  return v;
}

/// Shapley value as the mean marginal contribution over every join order.
inline std::vector<double> permutation_shapley(InfluenceEngine& engine, std::size_t row, const ClassTarget& c) {
  const std::size_t n = engine.dataset().attribute_count();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> sum(n, 0.0);
  double perms = 0.0;
  do {
    AttributeSubset before(n);
    for (std::size_t a : order) {
      const AttributeSubset after = before.with(a);
      sum[a] += engine.subset_eval(after, row, c) - engine.subset_eval(before, row, c);
      before = after;
    }
    perms += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  for (auto& v : sum) v /= perms;
  return sum;
}

/// Closure size by scanning every mask: a subset counts when it is a
/// singleton or fits inside some group.
inline std::size_t brute_closure_size(const std::vector<std::vector<std::size_t>>& groups, std::size_t n) {
  std::size_t count = 0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    bool hit = (mask & (mask - 1)) == 0;
    for (const auto& g : groups) {
      std::uint64_t gm = 0;
      for (auto a : g) gm |= std::uint64_t{1} << a;
      if ((mask & ~gm) == 0) hit = true;
    }
    count += hit ? 1 : 0;
  }
  return count;
}

/// Average ranks (1-based) by pairwise counting.
inline std::vector<double> naive_ranks(const std::vector<double>& x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double less = 0, equal = 0;
    for (double y : x) {
      less += y < x[i] ? 1 : 0;
      equal += y == x[i] ? 1 : 0;
    }
    r[i] = less + (equal + 1.0) / 2.0;
  }
  return r;
}

inline double naive_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

/// R^2 of regressing y on the columns xs (with intercept), via the normal
/// equations and Gauss-Jordan elimination with partial pivoting.
inline double naive_r_squared(const std::vector<std::vector<double>>& xs, const std::vector<double>& y) {
  const std::size_t p = xs.size() + 1;
  const std::size_t m = y.size();
  std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0.0));
  auto feature = [&](std::size_t j, std::size_t r) { return j == 0 ? 1.0 : xs[j - 1][r]; };
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) a[i][j] += feature(i, r) * feature(j, r);
      a[i][p] += feature(i, r) * y[r];
    }
  }
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t pivot = col;
    for (std::size_t i = col + 1; i < p; ++i) {
      if (std::abs(a[i][col]) > std::abs(a[pivot][col])) pivot = i;
    }
    std::swap(a[col], a[pivot]);
    for (std::size_t i = 0; i < p; ++i) {
      if (i == col) continue;
      const double f = a[i][col] / a[col][col];
      for (std::size_t j = col; j <= p; ++j) a[i][j] -= f * a[col][j];
    }
  }
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(m);
  double ss_res = 0, ss_tot = 0;
  for (std::size_t r = 0; r < m; ++r) {
    double fit = 0;
    for (std::size_t j = 0; j < p; ++j) fit += a[j][p] / a[j][j] * feature(j, r);
    ss_res += (y[r] - fit) * (y[r] - fit);
    ss_tot += (y[r] - mean) * (y[r] - mean);
  }
  return 1.0 - ss_res / ss_tot;
}

inline std::vector<std::vector<std::size_t>> group_indices(const Coalition& g) {
  std::vector<std::vector<std::size_t>> out;
  for (const auto& s : g.groups()) out.push_back(s.indices());
  return out;
}

}  // namespace coalex::fixtures
