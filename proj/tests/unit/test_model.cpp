#include <gtest/gtest.h>

#include <random>
#include <set>
#include <thread>

#include "coalex/errors.hpp"
#include "coalex/influence.hpp"
#include "coalex/model.hpp"
#include "coalex/synthetic.hpp"
#include "support.hpp"

using namespace coalex;

namespace {

// (0,0)->p, (0,1)->q, (1,0)->q, (1,1)->p
Dataset xor_data() { return fixtures::from_columns({{0, 0, 1, 1}, {0, 1, 0, 1}}, {"p", "q", "q", "p"}); }

ModelSpec tree_spec() {
  ModelSpec s;
  s.kind = ModelKind::decision_tree;
  return s;
}

Dataset noisy_data(std::uint64_t seed) {
  SyntheticConfig c;
  c.attributes = 5;
  c.rows = 120;
  c.seed = seed;
  return make_synthetic(c);
}

}  // namespace

TEST(ModelSpec, ParseAndValidate) {
  EXPECT_EQ(parse_model_kind("rf"), ModelKind::random_forest);
  EXPECT_EQ(parse_model_kind("random_forest"), ModelKind::random_forest);
  EXPECT_EQ(parse_model_kind("tree"), ModelKind::decision_tree);
  EXPECT_EQ(parse_model_kind("prior"), ModelKind::prior_baseline);
  EXPECT_THROW(parse_model_kind("svm"), ConfigError);
  ModelSpec s;
  s.tree_count = 0;
  EXPECT_THROW(s.validate(), ConfigError);
  s.tree_count = 3;
  s.min_leaf = 0;
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(PriorBaseline, ConfidenceIsClassPrior) {
  const Dataset d = fixtures::from_columns({{1, 2, 3}}, {"p", "p", "q"});
  ModelSpec s;
  s.kind = ModelKind::prior_baseline;
  const TrainedModel m = train(s, d, d.all_attributes());
  for (std::size_t r = 0; r < d.row_count(); ++r) {
    EXPECT_DOUBLE_EQ(m.confidence(d.row(r), d.target("p")), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(m.confidence(d.row(r), d.target("q")), 1.0 / 3.0);
  }
  // Any kind trained on the empty subset is the prior.
  const TrainedModel empty = train(ModelSpec{}, d, AttributeSubset(1));
  EXPECT_DOUBLE_EQ(empty.confidence(d.row(0), d.target("p")), 2.0 / 3.0);
}

TEST(DecisionTree, XorColumnAloneCarriesNoSignal) {
  const Dataset d = xor_data();
  const TrainedModel m = train(tree_spec(), d, AttributeSubset::of(2, {0}));
  for (std::size_t r = 0; r < 4; ++r) EXPECT_DOUBLE_EQ(m.confidence(d.row(r), d.target("p")), 0.5);
}

TEST(DecisionTree, XorLearnedFromBothColumns) {
  const Dataset d = xor_data();
  const TrainedModel m = train(tree_spec(), d, d.all_attributes());
  for (std::size_t r = 0; r < 4; ++r) {
    EXPECT_DOUBLE_EQ(m.confidence(d.row(r), d.target(d.labels()[r])), 1.0);
    EXPECT_EQ(m.predict(d.row(r)), d.label_index(r));
  }
}

TEST(DecisionTree, StumpSeparatesTwoPoints) {
  const Dataset d = fixtures::from_columns({{0, 1}}, {"p", "q"});
  const TrainedModel m = train(tree_spec(), d, d.all_attributes());
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 2; ++c) {
      const double v = m.confidence(d.row(r), d.target(c));
      EXPECT_TRUE(v == 0.0 || v == 1.0) << v;
    }
    EXPECT_DOUBLE_EQ(m.confidence(d.row(r), d.target(d.labels()[r])), 1.0);
  }
}

TEST(DecisionTree, DepthAndLeafLimits) {
  const Dataset d = noisy_data(3);
  ModelSpec s = tree_spec();
  s.max_depth = 1;
  const TrainedModel stump = train(s, d, d.all_attributes());
  std::set<double> values;
  for (std::size_t r = 0; r < d.row_count(); ++r) values.insert(stump.confidence(d.row(r), d.target(0)));
  EXPECT_LE(values.size(), 2u);

  s.max_depth = 0;
  s.min_leaf = d.row_count();
  const TrainedModel leaf = train(s, d, d.all_attributes());
  const double prior = class_prior(d, d.target(0));
  for (std::size_t r = 0; r < d.row_count(); ++r) EXPECT_DOUBLE_EQ(leaf.confidence(d.row(r), d.target(0)), prior);
}

TEST(RandomForest, DeterministicForSeed) {
  const Dataset d = noisy_data(5);
  ModelSpec s;
  s.tree_count = 50;
  s.seed = 7;
  const TrainedModel a = train(s, d, AttributeSubset::of(5, {0, 2, 4}));
  const TrainedModel b = train(s, d, AttributeSubset::of(5, {0, 2, 4}));
  for (std::size_t r = 0; r < d.row_count(); ++r) EXPECT_EQ(a.probabilities(d.row(r)), b.probabilities(d.row(r)));

  s.seed = 8;
  const TrainedModel c = train(s, d, AttributeSubset::of(5, {0, 2, 4}));
  bool differs = false;
  for (std::size_t r = 0; r < d.row_count(); ++r) differs |= a.probabilities(d.row(r)) != c.probabilities(d.row(r));
  EXPECT_TRUE(differs);
}

TEST(Models, ProbabilitiesSumToOne) {
  const Dataset d = noisy_data(9);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  for (ModelKind kind : {ModelKind::random_forest, ModelKind::decision_tree, ModelKind::prior_baseline}) {
    ModelSpec s;
    s.kind = kind;
    s.tree_count = 15;
    const TrainedModel m = train(s, d, AttributeSubset::of(5, {1, 3}));
    for (int i = 0; i < 50; ++i) {
      std::vector<double> row(5);
      for (auto& v : row) v = normal(rng);
      const auto p = m.probabilities(row);
      double sum = 0;
      for (double v : p) {
        EXPECT_GE(v, 0.0);
        sum += v;
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(Models, ReadOnlySubsetColumns) {
  const Dataset d = noisy_data(4);
  ModelSpec s;
  s.tree_count = 10;
  const TrainedModel m = train(s, d, AttributeSubset::of(5, {1, 2}));
  for (std::size_t r = 0; r < d.row_count(); ++r) {
    std::vector<double> row(d.row(r).begin(), d.row(r).end());
    const auto before = m.probabilities(row);
    row[0] = 1e9;
    row[3] = -1e9;
    row[4] = 42;
    EXPECT_EQ(m.probabilities(row), before);
  }
}

TEST(Models, UnknownClassRejected) {
  const Dataset d = noisy_data(4);
  const TrainedModel m = train(tree_spec(), d, d.all_attributes());
  EXPECT_THROW(m.confidence(d.row(0), ClassTarget{"nope", 7}), std::invalid_argument);
}

TEST(SubsetModelCache, TrainsEachSubsetOnce) {
  const Dataset d = noisy_data(2);
  SubsetModelCache cache(d, tree_spec());
  const auto s = AttributeSubset::of(5, {0, 1});
  const auto a = cache.get_or_train(s);
  const auto b = cache.get_or_train(s);
  EXPECT_EQ(cache.trainings(), 1u);
  EXPECT_EQ(a.get(), b.get());
  cache.get_or_train(AttributeSubset::of(5, {2}));
  EXPECT_EQ(cache.trainings(), 2u);
}

TEST(SubsetModelCache, ConcurrentCallersShareOneTraining) {
  const Dataset d = noisy_data(2);
  ModelSpec spec;
  spec.tree_count = 20;
  SubsetModelCache cache(d, spec);
  std::vector<std::thread> pool;
  std::vector<const TrainedModel*> seen(8);
  for (std::size_t t = 0; t < 8; ++t) {
    pool.emplace_back([&, t] { seen[t] = cache.get_or_train(AttributeSubset::full(5)).get(); });
  }
  for (auto& th : pool) th.join();
  EXPECT_EQ(cache.trainings(), 1u);
  for (auto* p : seen) EXPECT_EQ(p, seen[0]);
}

TEST(SubsetModelCache, CompleteInfluenceTrainsEverySubset) {
  const Dataset d = noisy_data(6);
  for (std::size_t n : {1u, 3u, 5u}) {
    const Dataset p = project(d, AttributeSubset(5, (1u << n) - 1));
    InfluenceEngine engine(p, tree_spec());
    engine.complete(0);
    EXPECT_EQ(engine.trainings(), (std::size_t{1} << n)) << n;  // 2^n - 1 subsets plus the baseline
  }
}
