#include "coalex/coalition.hpp"

#include <algorithm>
#include <stdexcept>

namespace coalex {

Coalition Coalition::normalize(std::vector<AttributeSubset> groups, std::size_t n) {
  for (const auto& g : groups) {
    if (g.universe() != n) throw std::invalid_argument("group universe does not match the coalition");
  }
  std::erase_if(groups, [](const AttributeSubset& g) { return g.empty(); });
  std::sort(groups.begin(), groups.end());
  groups.erase(std::unique(groups.begin(), groups.end()), groups.end());

  std::vector<AttributeSubset> kept;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    bool contained = false;
    for (std::size_t j = i + 1; j < groups.size() && !contained; ++j) {
      contained = groups[i].is_subset_of(groups[j]);
    }
    if (!contained) kept.push_back(groups[i]);
  }

  std::uint64_t covered = 0;
  for (const auto& g : kept) covered |= g.mask();
  for (std::size_t a = 0; a < n; ++a) {
    if (((covered >> a) & 1U) == 0) kept.push_back(AttributeSubset::of(n, {a}));
  }
  std::sort(kept.begin(), kept.end());

  Coalition c;
  c.n_ = n;
  c.groups_ = std::move(kept);
  return c;
}

Coalition Coalition::singletons(std::size_t n) { return normalize({}, n); }

Coalition Coalition::single_group(std::size_t n) { return normalize({AttributeSubset::full(n)}, n); }

std::vector<AttributeSubset> Coalition::groups_containing(std::size_t attribute) const {
  std::vector<AttributeSubset> out;
  for (const auto& g : groups_) {
    if (g.contains(attribute)) out.push_back(g);
  }
  return out;
}

bool Coalition::covers_all() const {
  std::uint64_t covered = 0;
  for (const auto& g : groups_) covered |= g.mask();
  return covered == full_mask(n_);
}

std::vector<std::vector<std::string>> Coalition::named_groups(const std::vector<std::string>& names) const {
  std::vector<std::vector<std::string>> out;
  for (const auto& g : groups_) {
    auto& named = out.emplace_back();
    for (std::size_t i : g.indices()) named.push_back(i < names.size() ? names[i] : std::to_string(i));
  }
  return out;
}

}  // namespace coalex
