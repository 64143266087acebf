#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "coalex/subset.hpp"

namespace coalex {

/// A covering family of attribute groups. Groups may overlap.
///
/// Instances built through `normalize` hold no empty group, no group
/// contained in another, no duplicates, and cover every attribute. Groups
/// are kept in ascending (size, index list) order.
class Coalition {
 public:
  Coalition() = default;

  static Coalition normalize(std::vector<AttributeSubset> groups, std::size_t n);
  static Coalition singletons(std::size_t n);
  static Coalition single_group(std::size_t n);

  std::size_t attribute_count() const { return n_; }
  const std::vector<AttributeSubset>& groups() const { return groups_; }
  std::size_t size() const { return groups_.size(); }

  // Groups that contain `attribute`, in coalition order.
  std::vector<AttributeSubset> groups_containing(std::size_t attribute) const;
  bool covers_all() const;

  std::vector<std::vector<std::string>> named_groups(const std::vector<std::string>& names) const;

  bool operator==(const Coalition&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<AttributeSubset> groups_;
};

}  // namespace coalex
