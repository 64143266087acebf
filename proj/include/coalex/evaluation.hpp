#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coalex/coalition.hpp"
#include "coalex/complexity.hpp"
#include "coalex/dataset.hpp"
#include "coalex/grouping.hpp"
#include "coalex/influence.hpp"
#include "coalex/model.hpp"

namespace coalex {

/// (1 / (2 sqrt(n))) * sum_k sqrt((a_k - b_k)^2): a scaled L1 distance.
double influence_distance(std::span<const double> a, std::span<const double> b);
double influence_distance(const InfluenceVector& a, const InfluenceVector& b);

struct ErrorScore {
  double value = 0.0;
  std::size_t n = 0;
  std::string method;
};

/// Distance of an approximation to the complete influence of the same
/// instance and class.
ErrorScore error_score(const InfluenceVector& approx, const InfluenceVector& oracle);

struct GroupStats {
  std::size_t count = 0;
  double mean_size = 0.0;
};

GroupStats group_stats(const Coalition& g);

/// One explanation method of a benchmark grid.
///
/// Textual form: `complete`, `kdepth:<k>`, `coalitional:<grouping>[:<value>]`
/// where the value is `p=<proportion>`, `t=<threshold>` or `delta=<delta>`.
/// A bare number is a proportion for threshold methods and delta for
/// modelbased. Without a value the grouping config supplies the parameter.
struct MethodConfig {
  enum class Param { none, k, threshold, proportion, delta };

  InfluenceKind kind = InfluenceKind::complete;
  GroupingMethod grouping = GroupingMethod::spearman;
  Param param = Param::none;
  double value = 0.0;

  static MethodConfig parse(const std::string& text);  // throws ConfigError
  void validate() const;                               // throws ConfigError
  std::string name() const;                            // method column, e.g. "coalitional:spearman"
  std::string param_string() const;                    // param column, e.g. "p=0.25"
  std::string id() const;                              // name + ":" + param
};

/// The coalition a coalitional method evaluates on one dataset. A proportion
/// is turned into a threshold by bisection; a method without a parameter
/// falls back to the grouping config (threshold or delta).
struct ResolvedCoalition {
  Coalition coalition;
  double parameter = 0.0;  // t, or delta for modelbased
  std::optional<double> target_proportion;
  double achieved_proportion = 0.0;
  bool closest_achievable = false;
};

ResolvedCoalition resolve_coalition(const MethodConfig& method, const Dataset& d, const ModelSpec& spec,
                                    const GroupingConfig& grouping = {},
                                    const BisectionOptions& bisection = {});

struct NamedDataset {
  std::string id;
  Dataset data;
};

struct BenchmarkOptions {
  std::uint64_t seed = 0;
  std::size_t max_instances = 0;  // 0 = every instance
  std::size_t jobs = 1;           // datasets evaluated concurrently
  bool parallel_instances = false;  // explain instances of one cell concurrently
  std::size_t complete_cap = 20;
  BisectionOptions bisection;
  GroupingConfig grouping;
};

struct BenchmarkRecord {
  std::string dataset;
  std::string method;
  std::string param;
  double mean_error = 0.0;
  double time_per_instance_s = 0.0;
  double time_ratio_vs_complete = 0.0;
  double complexity_proportion = 0.0;
  std::optional<double> group_count_mean;
  std::optional<double> group_size_mean;
  std::uint64_t seed = 0;

  std::size_t instances = 0;
  std::size_t attributes = 0;
  std::size_t trainings = 0;
  std::optional<double> threshold;
  bool closest_achievable = false;
  bool parallel_timed = false;
  ModelSpec model;
};

/// For every dataset, computes the complete influence of each selected
/// instance once, then each method, recording mean error against it and
/// wall-clock time per instance. Coalitional timings span grouping,
/// threshold search, training and influence computation. Datasets beyond
/// the complete cap are skipped with a message on `log`.
std::vector<BenchmarkRecord> run_benchmark(const std::vector<NamedDataset>& datasets,
                                           const std::vector<MethodConfig>& methods,
                                           const ModelSpec& spec, const BenchmarkOptions& options,
                                           std::ostream* log = nullptr);

}  // namespace coalex
