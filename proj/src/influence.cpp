#include "coalex/influence.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "coalex/errors.hpp"

namespace coalex {

namespace {

constexpr std::size_t kExactFactorials = 20;

constexpr std::array<std::uint64_t, kExactFactorials + 1> make_factorials() {
  std::array<std::uint64_t, kExactFactorials + 1> f{};
  f[0] = 1;
  for (std::size_t i = 1; i <= kExactFactorials; ++i) f[i] = f[i - 1] * i;
  return f;
}

constexpr auto kFactorial = make_factorials();

long double log_factorial(std::size_t v) { return std::lgamma(static_cast<long double>(v) + 1.0L); }

}  // namespace

std::string InfluenceMethod::tag() const {
  if (!label.empty()) return label;
  switch (kind) {
    case InfluenceKind::complete: return "complete";
    case InfluenceKind::kdepth: return "kdepth:" + std::to_string(k);
    case InfluenceKind::coalitional: return "coalitional";
  }
  return "unknown";
}

double shapley_penalty(std::size_t sub_size, std::size_t n) {
  if (n < 1 || sub_size > n - 1) throw std::invalid_argument("shapley_penalty: need 0 <= sub_size <= n-1");
  if (n <= kExactFactorials) {
    return static_cast<double>(kFactorial[sub_size] * kFactorial[n - sub_size - 1]) /
           static_cast<double>(kFactorial[n]);
  }
  return static_cast<double>(
      std::exp(log_factorial(sub_size) + log_factorial(n - sub_size - 1) - log_factorial(n)));
}

double kdepth_penalty(std::size_t sub_size, std::size_t n, std::size_t k) {
  if (k < 1 || k > n || sub_size >= k) {
    throw std::invalid_argument("kdepth_penalty: need 0 <= sub_size < k <= n");
  }
  if (n <= kExactFactorials) {
    return static_cast<double>(kFactorial[sub_size] * kFactorial[n - sub_size - 1]) /
           static_cast<double>(k * kFactorial[n - 1]);
  }
  return static_cast<double>(std::exp(log_factorial(sub_size) + log_factorial(n - sub_size - 1) -
                                      std::log(static_cast<long double>(k)) - log_factorial(n - 1)));
}

double coalition_penalty(std::size_t sub_size, std::size_t group_size,
                         std::span<const std::size_t> group_sizes) {
  if (group_size < 1 || sub_size > group_size - 1) {
    throw std::invalid_argument("coalition_penalty: need 0 <= sub_size <= group_size-1");
  }
  bool listed = false;
  bool exact = true;
  for (std::size_t s : group_sizes) {
    listed = listed || s == group_size;
    exact = exact && s <= kExactFactorials;
  }
  if (!listed) throw std::invalid_argument("coalition_penalty: group_sizes must contain group_size");

  if (exact) {
    unsigned __int128 denom = 0;
    for (std::size_t s : group_sizes) denom += kFactorial[s];
    return static_cast<double>(kFactorial[sub_size] * kFactorial[group_size - sub_size - 1]) /
           static_cast<double>(denom);
  }
  // log-sum-exp over the group factorials
  long double top = 0.0L;
  for (std::size_t s : group_sizes) top = std::max(top, log_factorial(s));
  long double sum = 0.0L;
  for (std::size_t s : group_sizes) sum += std::exp(log_factorial(s) - top);
  const long double log_denom = top + std::log(sum);
  return static_cast<double>(
      std::exp(log_factorial(sub_size) + log_factorial(group_size - sub_size - 1) - log_denom));
}

// Memoized subset confidences for one (row, class) pair.
class InfluenceEngine::SubsetValues {
 public:
  SubsetValues(InfluenceEngine& engine, std::size_t row, ClassTarget target)
      : engine_(engine), row_(row), target_(std::move(target)) {}

  double operator()(std::uint64_t mask) {
    auto it = values_.find(mask);
    if (it != values_.end()) return it->second;
    const double v =
        engine_.subset_eval(AttributeSubset(engine_.dataset().attribute_count(), mask), row_, target_);
    values_.emplace(mask, v);
    return v;
  }

  // Accumulates weight(|s|) * (v(s + a) - v(s)) over `subsets` in order.
  template <typename Weight>
  double marginal_sum(std::size_t attribute, const std::vector<std::uint64_t>& subsets, Weight weight) {
    const std::uint64_t bit = std::uint64_t{1} << attribute;
    double acc = 0.0;
    for (std::uint64_t s : subsets) {
      const auto size = static_cast<std::size_t>(std::popcount(s));
      acc += weight(size) * ((*this)(s | bit) - (*this)(s));
    }
    return acc;
  }

 private:
  InfluenceEngine& engine_;
  std::size_t row_;
  ClassTarget target_;
  std::unordered_map<std::uint64_t, double> values_;
};

InfluenceEngine::InfluenceEngine(const Dataset& d, const ModelSpec& spec, InfluenceOptions options)
    : dataset_(&d), options_(options), cache_(d, spec) {
  if (d.attribute_count() < 1) throw std::invalid_argument("dataset has no attributes");
  if (d.attribute_count() > AttributeSubset::kMaxAttributes) {
    throw CapExceeded("at most 64 attributes are supported, dataset has " +
                      std::to_string(d.attribute_count()));
  }
}

double InfluenceEngine::subset_eval(const AttributeSubset& s, std::size_t row, const ClassTarget& c) {
  if (row >= dataset_->row_count()) throw std::out_of_range("instance index out of range");
  const auto model = cache_.get_or_train(s);
  return model->confidence(dataset_->row(row), c);
}

ClassTarget InfluenceEngine::predicted_class(std::size_t row) {
  const auto model = cache_.get_or_train(dataset_->all_attributes());
  return dataset_->target(model->predict(dataset_->row(row)));
}

ClassTarget InfluenceEngine::resolve_target(std::size_t row, const std::optional<ClassTarget>& fixed) {
  if (!fixed) return predicted_class(row);
  if (fixed->index >= dataset_->class_count() || dataset_->class_set()[fixed->index] != fixed->class_id) {
    throw std::invalid_argument("unknown class '" + fixed->class_id + "'");
  }
  return *fixed;
}

InfluenceVector InfluenceEngine::complete(std::size_t row, const std::optional<ClassTarget>& target) {
  const std::size_t n = dataset_->attribute_count();
  if (n > options_.complete_cap) {
    throw CapExceeded("complete influence refused: " + std::to_string(n) +
                      " attributes exceed the cap of " + std::to_string(options_.complete_cap));
  }
  InfluenceVector out{std::vector<double>(n, 0.0), row, resolve_target(row, target), "complete"};
  SubsetValues values(*this, row, out.target);
  const std::uint64_t all = full_mask(n);
  for (std::size_t a = 0; a < n; ++a) {
    const auto subsets = enumerate_subsets(all & ~(std::uint64_t{1} << a), n - 1);
    out.values[a] = values.marginal_sum(a, subsets, [n](std::size_t s) { return shapley_penalty(s, n); });
  }
  return out;
}

InfluenceVector InfluenceEngine::kdepth(std::size_t row, std::size_t k, const std::optional<ClassTarget>& target) {
  const std::size_t n = dataset_->attribute_count();
  if (k < 1 || k > n) {
    throw std::invalid_argument("kdepth: k=" + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  }
  if (k > options_.complete_cap) {
    throw CapExceeded("kdepth refused: k=" + std::to_string(k) + " exceeds the cap of " +
                      std::to_string(options_.complete_cap));
  }
  InfluenceVector out{std::vector<double>(n, 0.0), row, resolve_target(row, target),
                      "kdepth:" + std::to_string(k)};
  SubsetValues values(*this, row, out.target);
  const std::uint64_t all = full_mask(n);
  for (std::size_t a = 0; a < n; ++a) {
    const auto subsets = enumerate_subsets(all & ~(std::uint64_t{1} << a), k - 1);
    out.values[a] =
        values.marginal_sum(a, subsets, [n, k](std::size_t s) { return kdepth_penalty(s, n, k); });
  }
  return out;
}

InfluenceVector InfluenceEngine::coalitional(std::size_t row, const Coalition& g,
                                             const std::optional<ClassTarget>& target,
                                             const std::string& label) {
  const std::size_t n = dataset_->attribute_count();
  if (g.attribute_count() != n || !g.covers_all()) {
    throw std::invalid_argument("coalition does not cover every attribute of the dataset");
  }
  for (const auto& group : g.groups()) {
    if (group.size() > options_.complete_cap) {
      throw CapExceeded("coalitional influence refused: a group of " + std::to_string(group.size()) +
                        " attributes exceeds the cap of " + std::to_string(options_.complete_cap));
    }
  }
  InfluenceVector out{std::vector<double>(n, 0.0), row, resolve_target(row, target),
                      label.empty() ? "coalitional" : label};
  SubsetValues values(*this, row, out.target);
  for (std::size_t a = 0; a < n; ++a) {
    const auto containing = g.groups_containing(a);
    std::vector<std::size_t> sizes;
    for (const auto& h : containing) sizes.push_back(h.size());
    // Literal sum over (group, sub-group) pairs: a subset reachable from two
    // groups contributes once per group.
    double acc = 0.0;
    for (const auto& h : containing) {
      const std::size_t gs = h.size();
      const auto subsets = enumerate_subsets(h.mask() & ~(std::uint64_t{1} << a), gs - 1);
      acc += values.marginal_sum(a, subsets,
                                 [&](std::size_t s) { return coalition_penalty(s, gs, sizes); });
    }
    out.values[a] = acc;
  }
  return out;
}

InfluenceVector InfluenceEngine::explain(std::size_t row, const InfluenceMethod& method,
                                         const std::optional<ClassTarget>& target) {
  InfluenceVector out;
  switch (method.kind) {
    case InfluenceKind::complete: out = complete(row, target); break;
    case InfluenceKind::kdepth: out = kdepth(row, method.k, target); break;
    case InfluenceKind::coalitional: out = coalitional(row, method.coalition, target); break;
  }
  out.method = method.tag();
  return out;
}

InfluenceVector explain(const InfluenceRequest& request, InfluenceOptions options) {
  if (request.dataset == nullptr) throw std::invalid_argument("influence request without dataset");
  InfluenceEngine engine(*request.dataset, request.spec, options);
  return engine.explain(request.instance, request.method, request.target);
}

}  // namespace coalex
