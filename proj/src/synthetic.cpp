#include "coalex/synthetic.hpp"

#include <cmath>
#include <stdexcept>

#include "coalex/random.hpp"

namespace coalex {

Dataset make_synthetic(const SyntheticConfig& config) {
  if (config.attributes < 1 || config.rows < 2) throw std::invalid_argument("synthetic: need n >= 1, m >= 2");
  Rng rng(derive_seed(config.seed, {0x5e7}));
  const std::size_t n = config.attributes;

  // Block layout and per-column transform.
  std::vector<std::size_t> block_of(n);
  std::vector<int> transform(n);
  std::size_t blocks = 0;
  for (std::size_t a = 0; a < n;) {
    const std::size_t len = std::min<std::size_t>(n - a, 1 + rng.below(3));
    for (std::size_t i = 0; i < len; ++i) block_of[a + i] = blocks;
    a += len;
    ++blocks;
  }
  for (auto& t : transform) t = static_cast<int>(rng.below(3));

  std::vector<std::string> names;
  for (std::size_t a = 0; a < n; ++a) names.push_back("x" + std::to_string(a));

  std::vector<double> features;
  features.reserve(n * config.rows);
  std::vector<std::string> labels;
  std::vector<double> latent(blocks);
  for (std::size_t r = 0; r < config.rows; ++r) {
    for (auto& z : latent) z = rng.normal();
    for (std::size_t a = 0; a < n; ++a) {
      const double x = latent[block_of[a]] + config.attribute_noise * rng.normal();
      switch (transform[a]) {
        case 1: features.push_back(x * x * x); break;
        case 2: features.push_back(std::exp(0.5 * x)); break;
        default: features.push_back(x); break;
      }
    }
    double score = blocks >= 2 ? latent[0] * latent[1] : latent[0];
    if (blocks >= 3) score += 0.5 * latent[blocks - 1];
    score += config.label_noise * rng.normal();
    labels.push_back(score > 0.0 ? "pos" : "neg");
  }
  return Dataset(std::move(names), std::move(features), std::move(labels));
}

std::vector<NamedDataset> synthetic_suite(const SuiteConfig& config) {
  if (config.min_attributes > config.max_attributes || config.min_rows > config.max_rows) {
    throw std::invalid_argument("synthetic suite: empty range");
  }
  Rng rng(derive_seed(config.seed, {0x5417e}));
  std::vector<NamedDataset> out;
  for (std::size_t i = 0; i < config.count; ++i) {
    SyntheticConfig c;
    c.attributes = config.min_attributes + rng.below(config.max_attributes - config.min_attributes + 1);
    c.rows = config.min_rows + rng.below(config.max_rows - config.min_rows + 1);
    c.seed = derive_seed(config.seed, {i});
    out.push_back({"synthetic-" + std::to_string(i), make_synthetic(c)});
  }
  return out;
}

}  // namespace coalex
