#include "coalex/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "coalex/errors.hpp"
#include "coalex/random.hpp"

namespace coalex {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::random_forest: return "random_forest";
    case ModelKind::decision_tree: return "decision_tree";
    case ModelKind::prior_baseline: return "prior_baseline";
  }
  return "unknown";
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "rf" || name == "random_forest") return ModelKind::random_forest;
  if (name == "tree" || name == "dt" || name == "decision_tree") return ModelKind::decision_tree;
  if (name == "prior" || name == "prior_baseline") return ModelKind::prior_baseline;
  throw ConfigError("unknown model '" + name + "' (valid: rf, tree, prior)");
}

void ModelSpec::validate() const {
  if (kind == ModelKind::random_forest && tree_count < 1) throw ConfigError("tree_count must be >= 1");
  if (min_leaf < 1) throw ConfigError("min_leaf must be >= 1");
}

namespace detail {

std::span<const double> Tree::leaf_for(std::span<const double> row, std::size_t class_count) const {
  std::int32_t at = 0;
  while (nodes[at].attribute >= 0) {
    const auto& node = nodes[at];
    at = row[static_cast<std::size_t>(node.attribute)] <= node.threshold ? node.left : node.right;
  }
  return std::span<const double>(leaf_distributions)
      .subspan(static_cast<std::size_t>(nodes[at].leaf) * class_count, class_count);
}

}  // namespace detail

namespace {

struct TreeParams {
  std::size_t max_depth = 0;
  std::size_t min_leaf = 1;
  std::size_t features_per_split = 0;  // 0 = all
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& d, std::vector<std::size_t> features, TreeParams params, Rng rng)
      : d_(d), features_(std::move(features)), params_(params), rng_(rng), k_(d.class_count()) {}

  detail::Tree build(std::vector<std::size_t> samples) {
    samples_ = std::move(samples);
    grow(0, samples_.size(), 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    std::size_t attribute = 0;
    double threshold = 0.0;
    double score = 0.0;
    bool found = false;
  };

  std::int32_t make_leaf(const std::vector<double>& counts, double total) {
    detail::Tree::Node node;
    node.leaf = static_cast<std::int32_t>(tree_.leaf_distributions.size() / k_);
    for (double c : counts) tree_.leaf_distributions.push_back(c / total);
    tree_.nodes.push_back(node);
    return static_cast<std::int32_t>(tree_.nodes.size() - 1);
  }

  std::vector<std::size_t> candidate_features() {
    const std::size_t want = params_.features_per_split;
    if (want == 0 || want >= features_.size()) return features_;
    std::vector<std::size_t> pool = features_;
    for (std::size_t i = 0; i < want; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng_.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    // Sampled features first (sorted, so ties resolve to the lowest index),
    // the rest only as a fallback when no sampled feature can split.
    std::sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(want));
    std::sort(pool.begin() + static_cast<std::ptrdiff_t>(want), pool.end());
    fallback_from_ = want;
    return pool;
  }

  // Sum over children of (n_child - sum_c count_c^2 / n_child): the
  // sample-weighted Gini impurity, up to a constant factor.
  Split best_split(std::size_t begin, std::size_t end, const std::vector<std::size_t>& candidates,
                   std::size_t first, std::size_t last) {
    Split best;
    const std::size_t n = end - begin;
    std::vector<std::pair<double, std::size_t>> column(n);
    std::vector<double> left(k_), right(k_);
    for (std::size_t ci = first; ci < last; ++ci) {
      const std::size_t a = candidates[ci];
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = samples_[begin + i];
        column[i] = {d_.at(r, a), d_.label_index(r)};
      }
      std::sort(column.begin(), column.end());
      if (column.front().first == column.back().first) continue;
      std::fill(left.begin(), left.end(), 0.0);
      std::fill(right.begin(), right.end(), 0.0);
      for (const auto& [v, y] : column) right[y] += 1.0;
      double left_sq = 0.0;
      double right_sq = 0.0;
      for (double c : right) right_sq += c * c;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t y = column[i].second;
        left_sq += 2.0 * left[y] + 1.0;
        right_sq -= 2.0 * right[y] - 1.0;
        left[y] += 1.0;
        right[y] -= 1.0;
        if (column[i].first == column[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = static_cast<double>(n - i - 1);
        if (nl < static_cast<double>(params_.min_leaf) || nr < static_cast<double>(params_.min_leaf)) {
          continue;
        }
        const double score = (nl - left_sq / nl) + (nr - right_sq / nr);
        if (!best.found || score < best.score) {
          double threshold = 0.5 * (column[i].first + column[i + 1].first);
          if (!(threshold < column[i + 1].first)) threshold = column[i].first;
          best = {a, threshold, score, true};
        }
      }
    }
    return best;
  }

  std::int32_t grow(std::size_t begin, std::size_t end, std::size_t depth) {
    std::vector<double> counts(k_, 0.0);
    for (std::size_t i = begin; i < end; ++i) counts[d_.label_index(samples_[i])] += 1.0;
    const double total = static_cast<double>(end - begin);
    const bool pure = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0; }) <= 1;
    const bool depth_reached = params_.max_depth != 0 && depth >= params_.max_depth;
    if (pure || depth_reached || end - begin < 2 * params_.min_leaf || features_.empty()) {
      return make_leaf(counts, total);
    }

    fallback_from_ = 0;
    const auto candidates = candidate_features();
    const std::size_t primary = fallback_from_ == 0 ? candidates.size() : fallback_from_;
    Split split = best_split(begin, end, candidates, 0, primary);
    if (!split.found && primary < candidates.size()) {
      split = best_split(begin, end, candidates, primary, candidates.size());
    }
    if (!split.found) return make_leaf(counts, total);

    auto mid_it = std::stable_partition(
        samples_.begin() + static_cast<std::ptrdiff_t>(begin),
        samples_.begin() + static_cast<std::ptrdiff_t>(end),
        [&](std::size_t r) { return d_.at(r, split.attribute) <= split.threshold; });
    const auto mid = static_cast<std::size_t>(mid_it - samples_.begin());

    const auto self = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    tree_.nodes[self].attribute = static_cast<std::int32_t>(split.attribute);
    tree_.nodes[self].threshold = split.threshold;
    const std::int32_t l = grow(begin, mid, depth + 1);
    const std::int32_t r = grow(mid, end, depth + 1);
    tree_.nodes[self].left = l;
    tree_.nodes[self].right = r;
    return self;
  }

  const Dataset& d_;
  std::vector<std::size_t> features_;
  TreeParams params_;
  Rng rng_;
  std::size_t k_;
  std::vector<std::size_t> samples_;
  std::size_t fallback_from_ = 0;
  detail::Tree tree_;
};

}  // namespace

TrainedModel train(const ModelSpec& spec, const Dataset& d, const AttributeSubset& s) {
  spec.validate();
  if (s.universe() != d.attribute_count()) {
    throw std::invalid_argument("subset universe does not match the dataset");
  }
  TrainedModel model;
  model.spec_ = spec;
  model.subset_ = s;
  model.class_count_ = d.class_count();
  model.prior_ = class_priors(d);
  if (s.empty() || spec.kind == ModelKind::prior_baseline) return model;

  const auto features = s.indices();
  TreeParams params{spec.max_depth, spec.min_leaf, 0};
  if (spec.kind == ModelKind::decision_tree) {
    std::vector<std::size_t> all(d.row_count());
    std::iota(all.begin(), all.end(), 0);
    TreeBuilder builder(d, features, params, Rng(derive_seed(spec.seed, {s.mask(), 0})));
    model.trees_.push_back(builder.build(std::move(all)));
    return model;
  }

  model.forest_ = true;
  params.features_per_split =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(features.size())))));
  model.trees_.reserve(spec.tree_count);
  for (std::size_t t = 0; t < spec.tree_count; ++t) {
    Rng rng(derive_seed(spec.seed, {s.mask(), t}));
    std::vector<std::size_t> bootstrap(d.row_count());
    for (auto& r : bootstrap) r = static_cast<std::size_t>(rng.below(d.row_count()));
    TreeBuilder builder(d, features, params, rng);
    model.trees_.push_back(builder.build(std::move(bootstrap)));
  }
  return model;
}

std::vector<double> TrainedModel::probabilities(std::span<const double> row) const {
  if (trees_.empty()) return prior_;
  std::vector<double> out(class_count_, 0.0);
  if (!forest_) {
    const auto leaf = trees_.front().leaf_for(row, class_count_);
    std::copy(leaf.begin(), leaf.end(), out.begin());
    return out;
  }
  for (const auto& tree : trees_) {
    const auto leaf = tree.leaf_for(row, class_count_);
    const auto vote = static_cast<std::size_t>(std::max_element(leaf.begin(), leaf.end()) - leaf.begin());
    out[vote] += 1.0;
  }
  for (auto& v : out) v /= static_cast<double>(trees_.size());
  return out;
}

double TrainedModel::confidence(std::span<const double> row, const ClassTarget& c) const {
  if (c.index >= class_count_) throw std::invalid_argument("class '" + c.class_id + "' not in the training class set");
  return probabilities(row)[c.index];
}

std::size_t TrainedModel::predict(std::span<const double> row) const {
  const auto p = probabilities(row);
  return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

SubsetModelCache::SubsetModelCache(const Dataset& d, ModelSpec spec) : dataset_(&d), spec_(spec) {
  spec_.validate();
}

std::shared_ptr<const TrainedModel> SubsetModelCache::get_or_train(const AttributeSubset& s) {
  std::shared_ptr<Entry> entry;
  {
    std::lock_guard lock(mutex_);
    auto& slot = entries_[s.mask()];
    if (!slot) slot = std::make_shared<Entry>();
    entry = slot;
  }
  std::call_once(entry->once, [&] {
    entry->model = std::make_shared<const TrainedModel>(train(spec_, *dataset_, s));
    trainings_.fetch_add(1);
  });
  return entry->model;
}

}  // namespace coalex
