#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "coalex/errors.hpp"
#include "coalex/evaluation.hpp"
#include "coalex/synthetic.hpp"
#include "support.hpp"

using namespace coalex;

namespace {

ModelSpec tree_spec() {
  ModelSpec s;
  s.kind = ModelKind::decision_tree;
  return s;
}

std::vector<NamedDataset> small_suite(std::size_t count, std::uint64_t seed) {
  SuiteConfig c;
  c.count = count;
  c.min_attributes = 3;
  c.max_attributes = 5;
  c.min_rows = 60;
  c.max_rows = 90;
  c.seed = seed;
  return synthetic_suite(c);
}

BenchmarkOptions quick_options() {
  BenchmarkOptions o;
  o.max_instances = 6;
  return o;
}

}  // namespace

TEST(Distance, KnownValues) {
  const std::vector<double> a{0.1, -0.2, 0.3};
  EXPECT_DOUBLE_EQ(influence_distance(a, a), 0.0);
  // n = 1: |1 - 0| / 2
  EXPECT_DOUBLE_EQ(influence_distance(std::vector<double>{1.0}, std::vector<double>{0.0}), 0.5);
  // n = 4: 0.4 / (2 * 2)
  const std::vector<double> x{0.1, -0.1, 0.2, 0.0};
  const std::vector<double> y{0.0, 0.0, 0.0, 0.0};
  EXPECT_EQ(influence_distance(x, y), 0.1);
}

TEST(Distance, SymmetricAndTriangle) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    std::vector<double> a(n), b(n), c(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
      c[i] = u(rng);
    }
    EXPECT_EQ(influence_distance(a, b), influence_distance(b, a));
    EXPECT_GE(influence_distance(a, b), 0.0);
    EXPECT_LE(influence_distance(a, c), influence_distance(a, b) + influence_distance(b, c) + 1e-12);
  }
}

TEST(Distance, RejectsMismatchedInputs) {
  EXPECT_THROW(influence_distance(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}), std::invalid_argument);
  EXPECT_THROW(influence_distance(std::vector<double>{}, std::vector<double>{}), std::invalid_argument);
  InfluenceVector a{{0.1, 0.2}, 0, {"p", 0}, "complete"};
  InfluenceVector b = a;
  b.instance = 1;
  EXPECT_THROW(error_score(a, b), std::invalid_argument);
  b = a;
  b.target = {"q", 1};
  EXPECT_THROW(error_score(a, b), std::invalid_argument);
  b = a;
  b.values[0] = 0.3;
  const auto score = error_score(b, a);
  EXPECT_EQ(score.n, 2u);
  EXPECT_NEAR(score.value, 0.2 / (2 * std::sqrt(2.0)), 1e-15);
}

TEST(MethodConfig, ParsesEveryForm) {
  EXPECT_EQ(MethodConfig::parse("complete").id(), "complete");
  const auto k = MethodConfig::parse("kdepth:2");
  EXPECT_EQ(k.kind, InfluenceKind::kdepth);
  EXPECT_EQ(k.value, 2.0);
  EXPECT_EQ(k.id(), "kdepth:k=2");
  EXPECT_EQ(MethodConfig::parse("kdepth:k=3").value, 3.0);

  const auto p = MethodConfig::parse("coalitional:spearman:p=0.25");
  EXPECT_EQ(p.grouping, GroupingMethod::spearman);
  EXPECT_EQ(p.param, MethodConfig::Param::proportion);
  EXPECT_EQ(p.name(), "coalitional:spearman");
  EXPECT_EQ(p.param_string(), "p=0.25");
  EXPECT_EQ(MethodConfig::parse("coalitional:vif:0.5").param, MethodConfig::Param::proportion);
  EXPECT_EQ(MethodConfig::parse("coalitional:pca:t=0.2").param, MethodConfig::Param::threshold);
  EXPECT_EQ(MethodConfig::parse("coalitional:modelbased:0.05").param, MethodConfig::Param::delta);
  EXPECT_EQ(MethodConfig::parse("coalitional:rev_vif").param, MethodConfig::Param::none);
  for (const char* text : {"coalitional:spearman:p=0.25", "kdepth:k=4", "coalitional:modelbased:delta=0.1"}) {
    EXPECT_EQ(MethodConfig::parse(MethodConfig::parse(text).id()).id(), text);
  }
}

TEST(MethodConfig, RejectsInvalidForms) {
  for (const char* text :
       {"", "shapley", "kdepth", "kdepth:0", "kdepth:1.5", "coalitional", "coalitional:nope:0.2",
        "coalitional:spearman:p=0", "coalitional:spearman:p=1.2", "coalitional:spearman:t=0.5",
        "coalitional:spearman:delta=0.1", "coalitional:modelbased:t=0.2", "coalitional:modelbased:delta=0",
        "coalitional:spearman:p=abc", "complete:1"}) {
    EXPECT_THROW(MethodConfig::parse(text), ConfigError) << text;
  }
}

TEST(ResolveCoalition, ThresholdProportionAndDefaults) {
  SyntheticConfig c;
  c.attributes = 6;
  c.rows = 120;
  c.seed = 4;
  const Dataset d = make_synthetic(c);
  const auto by_t = resolve_coalition(MethodConfig::parse("coalitional:spearman:t=0.2"), d, tree_spec());
  EXPECT_DOUBLE_EQ(by_t.parameter, 0.2);
  EXPECT_FALSE(by_t.target_proportion);
  EXPECT_EQ(by_t.coalition, group_spearman(d, 0.2));
  EXPECT_DOUBLE_EQ(by_t.achieved_proportion, complexity_proportion(by_t.coalition));

  const auto by_p = resolve_coalition(MethodConfig::parse("coalitional:spearman:p=0.3"), d, tree_spec());
  EXPECT_EQ(by_p.target_proportion, 0.3);
  if (!by_p.closest_achievable) EXPECT_LE(std::abs(by_p.achieved_proportion - 0.3), 0.02);

  GroupingConfig gc;
  gc.threshold = 0.35;
  const auto fallback = resolve_coalition(MethodConfig::parse("coalitional:vif"), d, tree_spec(), gc);
  EXPECT_DOUBLE_EQ(fallback.parameter, 0.35);
  EXPECT_THROW(resolve_coalition(MethodConfig::parse("kdepth:1"), d, tree_spec()), ConfigError);
}

TEST(Benchmark, CompleteIsExactAndRecordsAreComplete) {
  const auto suite = small_suite(3, 1);
  const std::vector<MethodConfig> methods{MethodConfig::parse("complete"), MethodConfig::parse("kdepth:1"),
                                          MethodConfig::parse("coalitional:spearman:p=0.5")};
  const auto records = run_benchmark(suite, methods, tree_spec(), quick_options());
  ASSERT_EQ(records.size(), suite.size() * methods.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    EXPECT_EQ(r.dataset, suite[i / methods.size()].id);
    EXPECT_EQ(r.instances, 6u);
    EXPECT_GT(r.time_per_instance_s, 0.0);
    EXPECT_GT(r.complexity_proportion, 0.0);
    EXPECT_LE(r.complexity_proportion, 1.0);
    EXPECT_GE(r.mean_error, 0.0);
    if (r.method == "complete") {
      EXPECT_EQ(r.mean_error, 0.0);
      EXPECT_EQ(r.time_ratio_vs_complete, 1.0);
      EXPECT_EQ(r.trainings, std::size_t{1} << r.attributes);
    }
    if (r.method == "kdepth") {
      EXPECT_EQ(r.trainings, r.attributes + 1);
      EXPECT_DOUBLE_EQ(r.complexity_proportion,
                       static_cast<double>(r.attributes) / static_cast<double>((1u << r.attributes) - 1));
      EXPECT_FALSE(r.group_count_mean);
    }
    if (r.method == "coalitional:spearman") {
      ASSERT_TRUE(r.threshold);
      ASSERT_TRUE(r.group_count_mean);
      const double closure = r.complexity_proportion * static_cast<double>((1u << r.attributes) - 1);
      EXPECT_LE(static_cast<double>(r.trainings), std::round(closure) + 1);
    }
  }
}

TEST(Benchmark, DeterministicForSeed) {
  const auto suite = small_suite(2, 7);
  const std::vector<MethodConfig> methods{MethodConfig::parse("kdepth:2"),
                                          MethodConfig::parse("coalitional:vif:p=0.4")};
  ModelSpec spec;
  spec.tree_count = 10;
  const auto a = run_benchmark(suite, methods, spec, quick_options());
  const auto b = run_benchmark(suite, methods, spec, quick_options());
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].mean_error, b[i].mean_error);
    EXPECT_EQ(a[i].complexity_proportion, b[i].complexity_proportion);
    EXPECT_EQ(a[i].threshold, b[i].threshold);
  }
}

TEST(Benchmark, ParallelDatasetsMatchSerial) {
  const auto suite = small_suite(4, 3);
  const std::vector<MethodConfig> methods{MethodConfig::parse("kdepth:1")};
  auto options = quick_options();
  const auto serial = run_benchmark(suite, methods, tree_spec(), options);
  options.jobs = 3;
  options.parallel_instances = true;
  const auto parallel = run_benchmark(suite, methods, tree_spec(), options);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].dataset, parallel[i].dataset);
    EXPECT_EQ(serial[i].mean_error, parallel[i].mean_error);
  }
}

TEST(Benchmark, KdepthBeyondAttributeCountRejected) {
  const auto suite = small_suite(1, 2);
  const auto k = MethodConfig::parse("kdepth:" + std::to_string(suite[0].data.attribute_count() + 1));
  EXPECT_THROW(run_benchmark(suite, {k}, tree_spec(), quick_options()), ConfigError);
}

TEST(Benchmark, OverCapDatasetSkippedWithMessage) {
  auto suite = small_suite(2, 5);
  auto options = quick_options();
  options.complete_cap = suite[0].data.attribute_count() - 1;
  suite[1].data = project(suite[1].data, AttributeSubset::of(suite[1].data.attribute_count(), {0, 1}));
  std::ostringstream log;
  const auto records = run_benchmark(suite, {MethodConfig::parse("kdepth:1")}, tree_spec(), options, &log);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].dataset, suite[1].id);
  EXPECT_NE(log.str().find(suite[0].id), std::string::npos);
}

TEST(Benchmark, ModelBasedIsTimedLikeOtherMethods) {
  const auto suite = small_suite(1, 9);
  const auto records =
      run_benchmark(suite, {MethodConfig::parse("coalitional:modelbased:0.05")}, tree_spec(), quick_options());
  ASSERT_EQ(records.size(), 1u);
  EXPECT_GT(records[0].time_per_instance_s, 1e-9);
  EXPECT_GT(records[0].time_ratio_vs_complete, 0.0);
  EXPECT_EQ(records[0].threshold, 0.05);
}

TEST(Benchmark, MarginalsMissInteractions) {
  // Label is the XOR of two bits; first-order influences cannot see it.
  std::vector<double> x0, x1, noise;
  std::vector<std::string> labels;
  std::mt19937_64 rng(2);
  for (int r = 0; r < 80; ++r) {
    const int a = r % 2, b = (r / 2) % 2;
    x0.push_back(a);
    x1.push_back(b);
    noise.push_back(static_cast<double>(rng() % 3));
    labels.push_back(a == b ? "p" : "q");
  }
  const NamedDataset named{"xor", fixtures::from_columns({x0, x1, noise}, labels)};
  const auto records = run_benchmark({named}, {MethodConfig::parse("kdepth:1"), MethodConfig::parse("kdepth:3")},
                                     tree_spec(), quick_options());
  ASSERT_EQ(records.size(), 2u);
  EXPECT_GT(records[0].mean_error, 0.05);
  EXPECT_NEAR(records[1].mean_error, 0.0, 1e-12);
}
