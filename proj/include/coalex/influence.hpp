#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coalex/coalition.hpp"
#include "coalex/dataset.hpp"
#include "coalex/model.hpp"

namespace coalex {

/// Signed per-attribute influences explaining one instance for one class.
struct InfluenceVector {
  std::vector<double> values;
  std::size_t instance = 0;
  ClassTarget target;
  std::string method;
};

enum class InfluenceKind { complete, kdepth, coalitional };

struct InfluenceMethod {
  InfluenceKind kind = InfluenceKind::complete;
  std::size_t k = 0;    // kdepth only
  Coalition coalition;  // coalitional only
  std::string label;    // tag written into the result; derived when empty

  static InfluenceMethod complete() { return {}; }
  static InfluenceMethod kdepth(std::size_t k) { return {InfluenceKind::kdepth, k, {}, {}}; }
  static InfluenceMethod coalitional(Coalition g, std::string label = {}) {
    return {InfluenceKind::coalitional, 0, std::move(g), std::move(label)};
  }
  std::string tag() const;
};

// Shapley weight |A'|! (n-|A'|-1)! / n!.
double shapley_penalty(std::size_t sub_size, std::size_t n);
// Depth-k weight |A'|! (n-|A'|-1)! / (k (n-1)!), defined for sub_size < k <= n.
double kdepth_penalty(std::size_t sub_size, std::size_t n, std::size_t k);
// Coalitional weight |g'|! (|g|-|g'|-1)! / sum of |h|! over the groups h
// that contain the attribute. `group_sizes` must include `group_size`.
double coalition_penalty(std::size_t sub_size, std::size_t group_size,
                         std::span<const std::size_t> group_sizes);

struct InfluenceOptions {
  // Largest attribute count (or coalition group size) for exhaustive
  // enumeration: 2^20 subsets.
  std::size_t complete_cap = 20;
};

/// Evaluates influences for instances of one dataset under one model spec.
///
/// Every subset model is trained at most once through the shared cache, so
/// the three influence definitions see bit-identical subset confidences.
/// All member functions are safe to call concurrently.
class InfluenceEngine {
 public:
  InfluenceEngine(const Dataset& d, const ModelSpec& spec, InfluenceOptions options = {});

  const Dataset& dataset() const { return *dataset_; }
  SubsetModelCache& cache() { return cache_; }
  std::size_t trainings() const { return cache_.trainings(); }

  /// Confidence for class `c` at row `row` of the model trained on `s`;
  /// the class prior when `s` is empty.
  double subset_eval(const AttributeSubset& s, std::size_t row, const ClassTarget& c);

  /// The class predicted by the model trained on every attribute.
  ClassTarget predicted_class(std::size_t row);
  ClassTarget resolve_target(std::size_t row, const std::optional<ClassTarget>& fixed);

  InfluenceVector complete(std::size_t row, const std::optional<ClassTarget>& target = {});
  InfluenceVector kdepth(std::size_t row, std::size_t k, const std::optional<ClassTarget>& target = {});
  InfluenceVector coalitional(std::size_t row, const Coalition& g,
                              const std::optional<ClassTarget>& target = {},
                              const std::string& label = {});
  InfluenceVector explain(std::size_t row, const InfluenceMethod& method,
                          const std::optional<ClassTarget>& target = {});

 private:
  class SubsetValues;

  const Dataset* dataset_;
  InfluenceOptions options_;
  SubsetModelCache cache_;
};

/// Self-contained request form, for one-off explanations.
struct InfluenceRequest {
  const Dataset* dataset = nullptr;
  ModelSpec spec;
  std::size_t instance = 0;
  std::optional<ClassTarget> target;  // empty: explain the predicted class
  InfluenceMethod method;
};

InfluenceVector explain(const InfluenceRequest& request, InfluenceOptions options = {});

}  // namespace coalex
