#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "coalex/dataset.hpp"
#include "coalex/evaluation.hpp"

namespace coalex {

/// Seeded binary-classification data with planted structure.
///
/// Attributes are split into correlated blocks of one to three columns,
/// each block driven by one latent Gaussian factor (some columns pass
/// through a monotone non-linearity). The label depends on the product of
/// the first two factors, plus a linear term in the last factor, so the
/// data carries both correlation groups and a pure interaction.
struct SyntheticConfig {
  std::size_t attributes = 6;
  std::size_t rows = 200;
  std::uint64_t seed = 0;
  double attribute_noise = 0.35;
  double label_noise = 0.25;
};

Dataset make_synthetic(const SyntheticConfig& config);

struct SuiteConfig {
  std::size_t count = 20;
  std::size_t min_attributes = 2;
  std::size_t max_attributes = 8;
  std::size_t min_rows = 50;
  std::size_t max_rows = 300;
  std::uint64_t seed = 0;
};

/// `count` datasets with attribute and row counts drawn uniformly from the
/// configured ranges. Ids are "synthetic-<index>".
std::vector<NamedDataset> synthetic_suite(const SuiteConfig& config);

}  // namespace coalex
