#include "coalex/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "coalex/errors.hpp"
#include "coalex/random.hpp"

namespace coalex {

std::string to_string(GroupingMethod method) {
  switch (method) {
    case GroupingMethod::pca: return "pca";
    case GroupingMethod::vif: return "vif";
    case GroupingMethod::rev_vif: return "rev_vif";
    case GroupingMethod::spearman: return "spearman";
    case GroupingMethod::rev_spearman: return "rev_spearman";
    case GroupingMethod::model_based: return "modelbased";
  }
  return "unknown";
}

GroupingMethod parse_grouping_method(const std::string& name) {
  if (name == "pca") return GroupingMethod::pca;
  if (name == "vif") return GroupingMethod::vif;
  if (name == "rev_vif" || name == "revvif" || name == "reverse_vif") return GroupingMethod::rev_vif;
  if (name == "spearman") return GroupingMethod::spearman;
  if (name == "rev_spearman" || name == "revspearman" || name == "reverse_spearman") {
    return GroupingMethod::rev_spearman;
  }
  if (name == "modelbased" || name == "model_based" || name == "model") return GroupingMethod::model_based;
  throw ConfigError("unknown grouping method '" + name +
                    "' (valid: pca, vif, rev_vif, spearman, rev_spearman, modelbased)");
}

bool is_threshold_method(GroupingMethod method) { return method != GroupingMethod::model_based; }

namespace {

void check_threshold(double t) {
  if (!(t > 0.0 && t < 0.5)) {
    throw std::invalid_argument("threshold t=" + std::to_string(t) + " outside (0, 0.5)");
  }
}

void check_kernel_threshold(double t) {
  if (!(t > 0.0 && t < 1.0)) {
    throw std::invalid_argument("threshold t=" + std::to_string(t) + " outside (0, 1)");
  }
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

// Constant columns come back exactly zero, so rounding in the mean cannot
// leak a spurious signal into regressions or the PCA.
Eigen::VectorXd centered(const std::vector<double>& v) {
  Eigen::VectorXd out = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); })) {
    out.setZero();
    return out;
  }
  out.array() -= out.mean();
  return out;
}

}  // namespace

Eigen::MatrixXd spearman_matrix(const Dataset& d) {
  const std::size_t n = d.attribute_count();
  if (n < 1) throw std::invalid_argument("spearman_matrix: no attributes");
  if (d.row_count() < 2) throw std::invalid_argument("spearman_matrix: need at least 2 rows");

  std::vector<Eigen::VectorXd> ranks;
  std::vector<double> norms;
  for (std::size_t c = 0; c < n; ++c) {
    ranks.push_back(centered(average_ranks(d.column(c))));
    norms.push_back(ranks.back().squaredNorm());
  }
  Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double rho = 0.0;
      if (norms[i] > 0.0 && norms[j] > 0.0) {
        rho = std::abs(ranks[i].dot(ranks[j])) / std::sqrt(norms[i] * norms[j]);
        rho = std::min(rho, 1.0);
      }
      corr(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rho;
      corr(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = rho;
    }
  }
  return corr;
}

double VifVector::of(std::size_t attribute) const {
  const auto idx = subset.indices();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] == attribute) return values[i];
  }
  throw std::invalid_argument("attribute " + std::to_string(attribute) + " not in the VIF subset");
}

VifVector vif_all(const Dataset& d, const AttributeSubset& s) {
  if (s.universe() != d.attribute_count()) {
    throw std::invalid_argument("subset universe does not match the dataset");
  }
  const auto members = s.indices();
  const auto m = static_cast<Eigen::Index>(d.row_count());
  std::vector<Eigen::VectorXd> cols;
  for (std::size_t c : members) cols.push_back(centered(d.column(c)));

  VifVector out{s, std::vector<double>(members.size(), 1.0)};
  if (members.size() < 2) return out;
  for (std::size_t t = 0; t < members.size(); ++t) {
    const Eigen::VectorXd& y = cols[t];
    const double ss_tot = y.squaredNorm();
    if (!(ss_tot > 0.0)) continue;  // constant column: nothing to explain
    Eigen::MatrixXd x(m, static_cast<Eigen::Index>(members.size() - 1));
    Eigen::Index col = 0;
    for (std::size_t o = 0; o < members.size(); ++o) {
      if (o != t) x.col(col++) = cols[o];
    }
    const Eigen::VectorXd beta = x.completeOrthogonalDecomposition().solve(y);
    const double ss_res = (y - x * beta).squaredNorm();
    const double r2 = std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
    out.values[t] = r2 >= 1.0 - 1e-6 ? kVifCap : 1.0 / (1.0 - r2);
  }
  return out;
}

VifTable vif_table(const Dataset& d) {
  const std::size_t n = d.attribute_count();
  VifTable table;
  table.baseline = vif_all(d, AttributeSubset::full(n));
  for (std::size_t a = 0; a < n; ++a) {
    table.without.push_back(vif_all(d, AttributeSubset::full(n).without(a)));
  }
  return table;
}

PcaResult pca_loadings(const Dataset& d) {
  const auto n = static_cast<Eigen::Index>(d.attribute_count());
  const auto m = static_cast<Eigen::Index>(d.row_count());
  if (m < 2) throw std::invalid_argument("pca_loadings: need at least 2 rows");
  Eigen::MatrixXd z(m, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::VectorXd col = centered(d.column(static_cast<std::size_t>(c)));
    const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(m - 1));
    if (sd > 0.0) {
      z.col(c) = col / sd;
    } else {
      z.col(c).setZero();
    }
  }
  const Eigen::MatrixXd cov = (z.transpose() * z) / static_cast<double>(m - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  PcaResult out;
  out.trace = cov.trace();
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    out.eigenvalues.push_back(solver.eigenvalues()(k));
    const Eigen::VectorXd v = solver.eigenvectors().col(k);
    out.loadings.emplace_back(v.data(), v.data() + v.size());
  }
  return out;
}

Coalition group_pca_from_loadings(const std::vector<std::vector<double>>& loadings, std::size_t n,
                                  double t) {
  check_kernel_threshold(t);
  std::vector<AttributeSubset> groups;
  for (const auto& component : loadings) {
    if (component.size() != n) throw std::invalid_argument("loading vector length mismatch");
    double top = 0.0;
    for (double a : component) top = std::max(top, std::abs(a));
    if (top <= 0.0) continue;
    AttributeSubset g(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(component[i]) >= top * (1.0 - t)) g = g.with(i);
    }
    groups.push_back(g);
  }
  return Coalition::normalize(std::move(groups), n);
}

Coalition group_vif_from_table(const VifTable& table, double t, bool reverse) {
  check_kernel_threshold(t);
  const std::size_t n = table.baseline.subset.universe();
  std::vector<AttributeSubset> groups;
  for (std::size_t a = 0; a < table.without.size(); ++a) {
    AttributeSubset g = AttributeSubset::of(n, {a});
    for (std::size_t other : table.without[a].subset.indices()) {
      const double before = table.baseline.of(other);
      const double after = table.without[a].of(other);
      const bool member = reverse ? after > before * (1.0 - t * 0.05) : after < before * (0.4 + t);
      if (member) g = g.with(other);
    }
    groups.push_back(g);
  }
  return Coalition::normalize(std::move(groups), n);
}

Coalition group_spearman_from_matrix(const Eigen::MatrixXd& corr, double t, bool reverse) {
  check_kernel_threshold(t);
  const auto n = static_cast<std::size_t>(corr.rows());
  std::vector<AttributeSubset> groups;
  for (std::size_t a = 0; a < n; ++a) {
    double hi = 0.0;
    double lo = 1.0;
    bool any = false;
    for (std::size_t b = 0; b < n; ++b) {
      if (b == a) continue;
      const double c = corr(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      hi = any ? std::max(hi, c) : c;
      lo = any ? std::min(lo, c) : c;
      any = true;
    }
    AttributeSubset g = AttributeSubset::of(n, {a});
    const bool grouped = any && (reverse ? lo < 0.5 : hi > 0.1);
    if (grouped) {
      for (std::size_t b = 0; b < n; ++b) {
        if (b == a) continue;
        const double c = corr(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        const bool member = reverse ? c < lo + hi * t : c > hi * (1.0 - t);
        if (member) g = g.with(b);
      }
    }
    groups.push_back(g);
  }
  return Coalition::normalize(std::move(groups), n);
}

Coalition group_pca(const Dataset& d, double t) {
  check_threshold(t);
  return group_pca_from_loadings(pca_loadings(d).loadings, d.attribute_count(), t);
}

Coalition group_vif(const Dataset& d, double t) {
  check_threshold(t);
  return group_vif_from_table(vif_table(d), t, false);
}

Coalition group_rev_vif(const Dataset& d, double t) {
  check_threshold(t);
  return group_vif_from_table(vif_table(d), t, true);
}

Coalition group_spearman(const Dataset& d, double t) {
  check_threshold(t);
  return group_spearman_from_matrix(spearman_matrix(d), t, false);
}

Coalition group_rev_spearman(const Dataset& d, double t) {
  check_threshold(t);
  return group_spearman_from_matrix(spearman_matrix(d), t, true);
}

namespace {

class FidelityEvaluator {
 public:
  FidelityEvaluator(const Dataset& d, const TrainedModel& model, std::size_t repetitions,
                    std::uint64_t seed)
      : d_(d), model_(model), repetitions_(repetitions), seed_(seed) {
    if (repetitions_ < 1) throw std::invalid_argument("fidelity: repetitions must be >= 1");
    predicted_.reserve(d.row_count());
    pools_.resize(d.class_count());
    for (std::size_t r = 0; r < d.row_count(); ++r) {
      predicted_.push_back(model.predict(d.row(r)));
      pools_[predicted_.back()].push_back(r);
    }
  }

  double operator()(const std::vector<AttributeSubset>& partition) const {
    const std::size_t n = d_.attribute_count();
    const std::size_t m = d_.row_count();
    std::vector<std::vector<std::size_t>> joint;
    std::uint64_t jointly_drawn = 0;
    for (const auto& g : partition) {
      if (g.universe() != n) throw std::invalid_argument("fidelity: group universe mismatch");
      if (g.size() >= 2) {
        joint.push_back(g.indices());
        jointly_drawn |= g.mask();
      }
    }
    // Singletons and attributes outside every group are drawn independently.
    std::vector<std::size_t> independent;
    for (std::size_t a = 0; a < n; ++a) {
      if (((jointly_drawn >> a) & 1U) == 0) independent.push_back(a);
    }

    double total = 0.0;
    std::vector<double> row(n);
    for (std::size_t round = 0; round < repetitions_; ++round) {
      Rng rng(derive_seed(seed_, {round}));
      std::size_t unchanged = 0;
      for (std::size_t r = 0; r < m; ++r) {
        const auto original = d_.row(r);
        std::copy(original.begin(), original.end(), row.begin());
        const auto& pool = pools_[predicted_[r]];
        for (const auto& members : joint) {
          const std::size_t donor = pool[rng.below(pool.size())];
          for (std::size_t a : members) row[a] = d_.at(donor, a);
        }
        for (std::size_t a : independent) row[a] = d_.at(rng.below(m), a);
        unchanged += model_.predict(row) == predicted_[r] ? 1 : 0;
      }
      total += static_cast<double>(unchanged) / static_cast<double>(m);
    }
    return total / static_cast<double>(repetitions_);
  }

 private:
  const Dataset& d_;
  const TrainedModel& model_;
  std::size_t repetitions_;
  std::uint64_t seed_;
  std::vector<std::size_t> predicted_;
  std::vector<std::vector<std::size_t>> pools_;
};

std::vector<AttributeSubset> singletons_of(std::size_t n, std::uint64_t mask) {
  std::vector<AttributeSubset> out;
  for (std::size_t a = 0; a < n; ++a) {
    if ((mask >> a) & 1U) out.push_back(AttributeSubset::of(n, {a}));
  }
  return out;
}

}  // namespace

double fidelity(const Dataset& d, const TrainedModel& model, const std::vector<AttributeSubset>& partition,
                std::size_t repetitions, std::uint64_t seed) {
  return FidelityEvaluator(d, model, repetitions, seed)(partition);
}

Coalition group_model_based(const Dataset& d, const ModelSpec& spec, double delta, std::size_t repetitions,
                            std::uint64_t seed) {
  if (!(delta > 0.0)) throw std::invalid_argument("model-based grouping: delta must be > 0");
  const std::size_t n = d.attribute_count();
  const TrainedModel model = train(spec, d, d.all_attributes());
  const FidelityEvaluator fid(d, model, repetitions, seed);

  std::vector<AttributeSubset> sigma;
  std::uint64_t grouped = 0;  // union of the groups in sigma
  std::uint64_t remaining = full_mask(n);
  std::uint64_t removed = 0;
  const double threshold = fid(singletons_of(n, full_mask(n))) + delta;

  auto with_fixed = [&](std::vector<AttributeSubset> parts) {
    for (auto& s : singletons_of(n, grouped)) parts.push_back(s);
    return parts;
  };

  while (remaining != 0 || removed != 0) {
    if (removed == 0 && fid(with_fixed({AttributeSubset(n, remaining)})) < threshold) {
      // Already below the threshold before removing anything: the rest
      // become singletons.
      for (auto& s : singletons_of(n, remaining)) sigma.push_back(s);
      grouped |= remaining;
      remaining = 0;
      continue;
    }
    const AttributeSubset r(n, remaining);
    std::size_t best = 0;
    double best_fid = -1.0;
    if (r.size() > 1) {
      for (std::size_t j : r.indices()) {
        const double f = fid(with_fixed({r.without(j), AttributeSubset::of(n, {j}), AttributeSubset(n, removed)}));
        if (f > best_fid) {
          best_fid = f;
          best = j;
        }
      }
    }
    if (r.size() == 1 || best_fid < threshold) {
      sigma.push_back(r);
      grouped |= remaining;
      remaining = removed;
      removed = 0;
    } else {
      remaining &= ~(std::uint64_t{1} << best);
      removed |= std::uint64_t{1} << best;
    }
  }
  return Coalition::normalize(std::move(sigma), n);
}

PreparedGrouping::PreparedGrouping(GroupingMethod method, const Dataset& d, GroupingConfig config,
                                   ModelSpec spec)
    : method_(method), n_(d.attribute_count()), dataset_(&d), config_(config), spec_(spec) {
  switch (method_) {
    case GroupingMethod::pca: pca_ = pca_loadings(d); break;
    case GroupingMethod::vif:
    case GroupingMethod::rev_vif: vifs_ = vif_table(d); break;
    case GroupingMethod::spearman:
    case GroupingMethod::rev_spearman: corr_ = spearman_matrix(d); break;
    case GroupingMethod::model_based: break;
  }
}

Coalition PreparedGrouping::at(double parameter) const {
  if (method_ == GroupingMethod::model_based) {
    return group_model_based(*dataset_, spec_, parameter, config_.repetitions, config_.seed);
  }
  check_threshold(parameter);
  switch (method_) {
    case GroupingMethod::pca: return group_pca_from_loadings(pca_.loadings, n_, parameter);
    case GroupingMethod::vif: return group_vif_from_table(vifs_, parameter, false);
    case GroupingMethod::rev_vif: return group_vif_from_table(vifs_, parameter, true);
    case GroupingMethod::spearman: return group_spearman_from_matrix(corr_, parameter, false);
    case GroupingMethod::rev_spearman: return group_spearman_from_matrix(corr_, parameter, true);
    case GroupingMethod::model_based: break;
  }
  return Coalition::singletons(n_);
}

}  // namespace coalex
