#pragma once

#include <cstddef>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "deepspace/corpus.hpp"
#include "deepspace/types.hpp"

namespace deepspace {

/// Train rating counts per item (all ratings, not only positive ones).
class PopularityModel {
 public:
  explicit PopularityModel(std::span<const RatingEvent> train);

  const std::vector<ItemId>& items() const noexcept { return items_; }
  const std::vector<double>& counts() const noexcept { return counts_; }
  std::size_t count(ItemId item) const;

 private:
  std::vector<ItemId> items_;  // ascending
  std::vector<double> counts_;
};

std::vector<ItemId> popularity_topk(const PopularityModel& model,
                                    const std::unordered_set<ItemId>& exclude, std::size_t k);

/// User-based kNN over binary "has rated" vectors with cosine similarity.
/// An item's score is the summed similarity of the k nearest neighbors who
/// rated it; neighbors tied on similarity are taken in ascending user id.
class KnnModel {
 public:
  KnnModel(std::span<const RatingEvent> train, std::size_t k);

  std::size_t k() const noexcept { return k_; }
  const std::vector<ItemId>& items() const noexcept { return items_; }
  bool has_user(UserId user) const { return user_items_.count(user) != 0; }

  /// Scores aligned with items().
  std::vector<double> scores(UserId user) const;

  /// (neighbor, similarity), best first, at most k.
  std::vector<std::pair<UserId, double>> neighbors(UserId user) const;

 private:
  std::size_t k_;
  std::vector<ItemId> items_;  // ascending
  std::unordered_map<UserId, std::vector<std::size_t>> user_items_;   // item indices
  std::vector<std::vector<UserId>> item_users_;                       // per item index
};

std::vector<double> knn_scores(const KnnModel& model, UserId user);

std::vector<ItemId> knn_topk(const KnnModel& model, UserId user,
                             const std::unordered_set<ItemId>& exclude, std::size_t k);

}  // namespace deepspace
