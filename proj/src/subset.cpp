#include "coalex/subset.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace coalex {

std::uint64_t full_mask(std::size_t n) {
  if (n > AttributeSubset::kMaxAttributes) {
    throw std::invalid_argument("attribute universe larger than 64");
  }
  return n == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
}

AttributeSubset::AttributeSubset(std::size_t n, std::uint64_t mask) : n_(n), mask_(mask) {
  if ((mask & ~full_mask(n)) != 0) {
    throw std::invalid_argument("attribute index outside the universe");
  }
}

AttributeSubset AttributeSubset::full(std::size_t n) { return AttributeSubset(n, full_mask(n)); }

AttributeSubset AttributeSubset::of(std::size_t n, std::initializer_list<std::size_t> indices) {
  return of(n, std::vector<std::size_t>(indices));
}

AttributeSubset AttributeSubset::of(std::size_t n, const std::vector<std::size_t>& indices) {
  std::uint64_t mask = 0;
  for (std::size_t i : indices) {
    if (i >= n) throw std::invalid_argument("attribute index outside the universe");
    mask |= std::uint64_t{1} << i;
  }
  return AttributeSubset(n, mask);
}

std::size_t AttributeSubset::size() const { return static_cast<std::size_t>(std::popcount(mask_)); }

bool AttributeSubset::contains(std::size_t index) const {
  return index < n_ && ((mask_ >> index) & 1U) != 0;
}

AttributeSubset AttributeSubset::with(std::size_t index) const {
  if (index >= n_) throw std::invalid_argument("attribute index outside the universe");
  return AttributeSubset(n_, mask_ | (std::uint64_t{1} << index));
}

AttributeSubset AttributeSubset::without(std::size_t index) const {
  if (index >= n_) throw std::invalid_argument("attribute index outside the universe");
  return AttributeSubset(n_, mask_ & ~(std::uint64_t{1} << index));
}

std::vector<std::size_t> AttributeSubset::indices() const {
  std::vector<std::size_t> out;
  out.reserve(size());
  for (std::uint64_t m = mask_; m != 0; m &= m - 1) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(m)));
  }
  return out;
}

bool AttributeSubset::is_subset_of(const AttributeSubset& other) const {
  return (mask_ & ~other.mask_) == 0;
}

AttributeSubset AttributeSubset::operator|(const AttributeSubset& other) const {
  if (n_ != other.n_) throw std::invalid_argument("subsets over different universes");
  return AttributeSubset(n_, mask_ | other.mask_);
}

AttributeSubset AttributeSubset::operator&(const AttributeSubset& other) const {
  if (n_ != other.n_) throw std::invalid_argument("subsets over different universes");
  return AttributeSubset(n_, mask_ & other.mask_);
}

std::strong_ordering AttributeSubset::operator<=>(const AttributeSubset& other) const {
  if (auto c = n_ <=> other.n_; c != 0) return c;
  if (auto c = size() <=> other.size(); c != 0) return c;
  // Same size: lexicographic on ascending index lists, which for equal
  // popcount is the reverse of comparing the lowest differing bit.
  if (mask_ == other.mask_) return std::strong_ordering::equal;
  const std::uint64_t diff = mask_ ^ other.mask_;
  const std::uint64_t low = diff & (~diff + 1);
  return (mask_ & low) != 0 ? std::strong_ordering::less : std::strong_ordering::greater;
}

std::string AttributeSubset::to_string() const {
  std::string out = "{";
  bool first = true;
  for (std::size_t i : indices()) {
    if (!first) out += ",";
    out += std::to_string(i);
    first = false;
  }
  return out + "}";
}

namespace {

void combinations(const std::vector<std::size_t>& items, std::size_t want, std::size_t start,
                  std::uint64_t acc, std::vector<std::uint64_t>& out) {
  if (want == 0) {
    out.push_back(acc);
    return;
  }
  for (std::size_t i = start; i + want <= items.size(); ++i) {
    combinations(items, want - 1, i + 1, acc | (std::uint64_t{1} << items[i]), out);
  }
}

}  // namespace

std::vector<std::uint64_t> enumerate_subsets(std::uint64_t base, std::size_t max_size) {
  std::vector<std::size_t> items;
  for (std::uint64_t m = base; m != 0; m &= m - 1) {
    items.push_back(static_cast<std::size_t>(std::countr_zero(m)));
  }
  const std::size_t top = std::min(max_size, items.size());
  std::vector<std::uint64_t> out;
  for (std::size_t size = 0; size <= top; ++size) {
    combinations(items, size, 0, 0, out);
  }
  return out;
}

}  // namespace coalex
