#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <unordered_set>
#include <utility>
#include <vector>

#include "deepspace/types.hpp"

namespace deepspace {

/// Highest-scoring items not in `exclude`, ties by ascending item id.
/// Returns fewer than k when there are fewer candidates.
template <typename Scalar>
std::vector<ItemId> top_k(std::span<const ItemId> items, std::span<const Scalar> scores,
                          const std::unordered_set<ItemId>& exclude, std::size_t k) {
  if (items.size() != scores.size()) throw Error("top_k: items/scores size mismatch");
  std::vector<std::pair<Scalar, ItemId>> candidates;
  candidates.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i)
    if (!exclude.count(items[i])) candidates.emplace_back(scores[i], items[i]);

  const auto better = [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  };
  const std::size_t n = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(n),
                    candidates.end(), better);

  std::vector<ItemId> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(candidates[i].second);
  return out;
}

}  // namespace deepspace
