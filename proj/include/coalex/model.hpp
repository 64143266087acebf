#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "coalex/dataset.hpp"
#include "coalex/subset.hpp"

namespace coalex {

enum class ModelKind { random_forest, decision_tree, prior_baseline };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);  // throws ConfigError

struct ModelSpec {
  ModelKind kind = ModelKind::random_forest;
  std::size_t tree_count = 100;
  std::size_t max_depth = 0;  // 0 = unbounded
  std::size_t min_leaf = 1;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

namespace detail {

// A CART tree stored as a flat node array. Split attributes are indices into
// the original (unprojected) dataset.
struct Tree {
  struct Node {
    std::int32_t attribute = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t leaf = -1;  // offset into leaf_distributions
  };
  std::vector<Node> nodes;
  std::vector<double> leaf_distributions;  // class_count entries per leaf

  std::span<const double> leaf_for(std::span<const double> row, std::size_t class_count) const;
};

}  // namespace detail

/// A classifier fitted on one attribute subset. Immutable and shareable.
///
/// Rows passed to the query functions are full-width rows of the training
/// dataset; only the columns of `subset()` are ever read.
class TrainedModel {
 public:
  const ModelSpec& spec() const { return spec_; }
  const AttributeSubset& subset() const { return subset_; }
  std::size_t class_count() const { return class_count_; }

  // Probability vector over the class set.
  std::vector<double> probabilities(std::span<const double> row) const;
  double confidence(std::span<const double> row, const ClassTarget& c) const;
  // Most confident class; ties go to the lowest class index.
  std::size_t predict(std::span<const double> row) const;

 private:
  friend TrainedModel train(const ModelSpec& spec, const Dataset& d, const AttributeSubset& s);

  ModelSpec spec_;
  AttributeSubset subset_;
  std::size_t class_count_ = 0;
  std::vector<double> prior_;
  std::vector<detail::Tree> trees_;
  bool forest_ = false;
};

/// Fits `spec` on the columns of `s`. An empty subset, or the prior_baseline
/// kind, yields the constant class-prior predictor.
TrainedModel train(const ModelSpec& spec, const Dataset& d, const AttributeSubset& s);

/// At-most-once training per attribute subset, safe for concurrent callers.
/// The cache is bound to one dataset and spec; the dataset must outlive it.
class SubsetModelCache {
 public:
  SubsetModelCache(const Dataset& d, ModelSpec spec);

  std::shared_ptr<const TrainedModel> get_or_train(const AttributeSubset& s);

  // Number of distinct subsets trained so far (the empty subset included).
  std::size_t trainings() const { return trainings_.load(); }
  const Dataset& dataset() const { return *dataset_; }
  const ModelSpec& spec() const { return spec_; }

 private:
  struct Entry {
    std::once_flag once;
    std::shared_ptr<const TrainedModel> model;
  };

  const Dataset* dataset_;
  ModelSpec spec_;
  std::mutex mutex_;
  std::unordered_map<std::uint64_t, std::shared_ptr<Entry>> entries_;
  std::atomic<std::size_t> trainings_{0};
};

}  // namespace coalex
