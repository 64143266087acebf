#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coalex/coalition.hpp"
#include "coalex/dataset.hpp"
#include "coalex/model.hpp"

namespace coalex {

enum class GroupingMethod { pca, vif, rev_vif, spearman, rev_spearman, model_based };

std::string to_string(GroupingMethod method);
// Accepts the names printed by to_string plus a few aliases; throws
// ConfigError listing the valid names otherwise.
GroupingMethod parse_grouping_method(const std::string& name);
// Methods driven by a threshold t in (0, 0.5); model_based uses delta instead.
bool is_threshold_method(GroupingMethod method);

struct GroupingConfig {
  double threshold = 0.25;
  double delta = 0.1;
  std::size_t repetitions = 10;
  std::uint64_t seed = 0;
};

// --- numeric kernels -------------------------------------------------------

/// Absolute Spearman coefficients (Pearson on average ranks). Unit diagonal;
/// a constant column is uncorrelated with everything else.
Eigen::MatrixXd spearman_matrix(const Dataset& d);

inline constexpr double kVifCap = 1e6;

/// VIF values for the members of `subset`, aligned with `subset.indices()`.
struct VifVector {
  AttributeSubset subset;
  std::vector<double> values;

  double of(std::size_t attribute) const;
};

/// OLS (with intercept) of each member of `s` on the other members.
/// VIF = 1/(1-R^2), capped at kVifCap once R^2 >= 1 - 1e-6.
VifVector vif_all(const Dataset& d, const AttributeSubset& s);

/// Baseline VIFs over all attributes plus the VIFs recomputed with each
/// attribute removed in turn.
struct VifTable {
  VifVector baseline;
  std::vector<VifVector> without;  // without[a] is computed over A \ {a}
};
VifTable vif_table(const Dataset& d);

struct PcaResult {
  std::vector<double> eigenvalues;            // descending
  std::vector<std::vector<double>> loadings;  // loadings[k] belongs to eigenvalues[k]
  double trace = 0.0;                         // trace of the analysed covariance
};

/// Eigen-decomposition of the covariance of the standardized columns.
/// Constant columns stay at zero after standardization.
PcaResult pca_loadings(const Dataset& d);

// --- coalition extraction from precomputed kernels --------------------------
// These accept any t in (0, 1); the dataset-level entry points below
// restrict t to (0, 0.5).

Coalition group_pca_from_loadings(const std::vector<std::vector<double>>& loadings, std::size_t n,
                                  double t);
Coalition group_vif_from_table(const VifTable& table, double t, bool reverse);
Coalition group_spearman_from_matrix(const Eigen::MatrixXd& corr, double t, bool reverse);

// --- dataset-level grouping --------------------------------------------------

Coalition group_pca(const Dataset& d, double t);
Coalition group_vif(const Dataset& d, double t);
Coalition group_rev_vif(const Dataset& d, double t);
Coalition group_spearman(const Dataset& d, double t);
Coalition group_rev_spearman(const Dataset& d, double t);

/// Fraction of instances whose predicted class survives a structured
/// randomization, averaged over `repetitions` seeded rounds. Members of a
/// group of two or more attributes jointly take their values from one donor
/// instance with the same predicted class; every other attribute takes its
/// value from an independent uniformly drawn instance.
double fidelity(const Dataset& d, const TrainedModel& model,
                const std::vector<AttributeSubset>& partition, std::size_t repetitions,
                std::uint64_t seed);

/// Greedy model-based grouping: grow a group, shed the attribute whose
/// removal hurts fidelity least while fidelity stays above
/// fidelity(all singletons) + delta, then recurse on the shed attributes.
Coalition group_model_based(const Dataset& d, const ModelSpec& spec, double delta,
                            std::size_t repetitions, std::uint64_t seed);

/// Drops empty, duplicate and contained groups; adds singletons for
/// uncovered attributes.
inline Coalition normalize(std::vector<AttributeSubset> groups, std::size_t n) {
  return Coalition::normalize(std::move(groups), n);
}

/// A grouping method with its dataset kernel computed once, so that many
/// thresholds can be probed cheaply.
class PreparedGrouping {
 public:
  PreparedGrouping(GroupingMethod method, const Dataset& d, GroupingConfig config = {},
                   ModelSpec spec = {});

  GroupingMethod method() const { return method_; }
  std::size_t attribute_count() const { return n_; }

  // For model_based the parameter is delta; otherwise t in (0, 0.5).
  Coalition at(double parameter) const;

 private:
  GroupingMethod method_;
  std::size_t n_;
  const Dataset* dataset_;
  GroupingConfig config_;
  ModelSpec spec_;
  Eigen::MatrixXd corr_;
  VifTable vifs_;
  PcaResult pca_;
};

}  // namespace coalex
