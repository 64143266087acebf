#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

namespace coalex {

/// A set of attribute indices drawn from a universe of `n` attributes.
///
/// Stored as a 64-bit mask, so the universe is limited to 64 attributes.
/// Equal subsets compare and hash equal; ordering is by (size, index list),
/// which is also the canonical enumeration order used by the influence sums.
class AttributeSubset {
 public:
  static constexpr std::size_t kMaxAttributes = 64;

  AttributeSubset() = default;
  explicit AttributeSubset(std::size_t n, std::uint64_t mask = 0);

  static AttributeSubset full(std::size_t n);
  static AttributeSubset of(std::size_t n, std::initializer_list<std::size_t> indices);
  static AttributeSubset of(std::size_t n, const std::vector<std::size_t>& indices);

  std::size_t universe() const { return n_; }
  std::uint64_t mask() const { return mask_; }
  std::size_t size() const;
  bool empty() const { return mask_ == 0; }
  bool contains(std::size_t index) const;

  AttributeSubset with(std::size_t index) const;
  AttributeSubset without(std::size_t index) const;

  // Ascending attribute indices.
  std::vector<std::size_t> indices() const;

  bool is_subset_of(const AttributeSubset& other) const;
  AttributeSubset operator|(const AttributeSubset& other) const;
  AttributeSubset operator&(const AttributeSubset& other) const;

  bool operator==(const AttributeSubset& other) const = default;
  std::strong_ordering operator<=>(const AttributeSubset& other) const;

  std::string to_string() const;

 private:
  std::size_t n_ = 0;
  std::uint64_t mask_ = 0;
};

std::uint64_t full_mask(std::size_t n);

/// Every subset of `base` with at most `max_size` members, in size-then-
/// lexicographic order of the index lists. The empty subset comes first.
std::vector<std::uint64_t> enumerate_subsets(std::uint64_t base, std::size_t max_size);

}  // namespace coalex

template <>
struct std::hash<coalex::AttributeSubset> {
  std::size_t operator()(const coalex::AttributeSubset& s) const noexcept {
    return std::hash<std::uint64_t>{}(s.mask()) ^ (s.universe() * 0x9e3779b97f4a7c15ULL);
  }
};
