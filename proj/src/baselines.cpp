#include "deepspace/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "deepspace/topk.hpp"

namespace deepspace {

PopularityModel::PopularityModel(std::span<const RatingEvent> train) {
  std::map<ItemId, std::size_t> counts;
  for (const auto& ev : train) ++counts[ev.item];
  items_.reserve(counts.size());
  counts_.reserve(counts.size());
  for (const auto& [item, n] : counts) {
    items_.push_back(item);
    counts_.push_back(static_cast<double>(n));
  }
}

std::size_t PopularityModel::count(ItemId item) const {
  const auto it = std::lower_bound(items_.begin(), items_.end(), item);
  if (it == items_.end() || *it != item) return 0;
  return static_cast<std::size_t>(counts_[static_cast<std::size_t>(it - items_.begin())]);
}

std::vector<ItemId> popularity_topk(const PopularityModel& model,
                                    const std::unordered_set<ItemId>& exclude, std::size_t k) {
  return top_k<double>(model.items(), model.counts(), exclude, k);
}

KnnModel::KnnModel(std::span<const RatingEvent> train, std::size_t k) : k_(k) {
  if (k == 0) throw Error("neighborhood size must be at least 1");
  for (const auto& ev : train) items_.push_back(ev.item);
  std::sort(items_.begin(), items_.end());
  items_.erase(std::unique(items_.begin(), items_.end()), items_.end());

  item_users_.resize(items_.size());
  for (const auto& ev : train) {
    const auto idx =
        static_cast<std::size_t>(std::lower_bound(items_.begin(), items_.end(), ev.item) - items_.begin());
    user_items_[ev.user].push_back(idx);
    item_users_[idx].push_back(ev.user);
  }
  for (auto& [user, list] : user_items_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  for (auto& list : item_users_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
}

std::vector<std::pair<UserId, double>> KnnModel::neighbors(UserId user) const {
  const auto self = user_items_.find(user);
  if (self == user_items_.end()) throw NoSuchUser(user);

  // Co-rating counts are the dot products of binary vectors.
  std::unordered_map<UserId, std::size_t> overlap;
  for (const auto idx : self->second)
    for (const auto other : item_users_[idx])
      if (other != user) ++overlap[other];

  const double self_norm = std::sqrt(static_cast<double>(self->second.size()));
  std::vector<std::pair<UserId, double>> sims;
  sims.reserve(overlap.size());
  for (const auto& [other, common] : overlap) {
    const double other_norm = std::sqrt(static_cast<double>(user_items_.at(other).size()));
    sims.emplace_back(other, static_cast<double>(common) / (self_norm * other_norm));
  }
  const std::size_t n = std::min(k_, sims.size());
  std::partial_sort(sims.begin(), sims.begin() + static_cast<std::ptrdiff_t>(n), sims.end(),
                    [](const auto& a, const auto& b) {
                      return a.second != b.second ? a.second > b.second : a.first < b.first;
                    });
  sims.resize(n);
  return sims;
}

std::vector<double> KnnModel::scores(UserId user) const {
  std::vector<double> out(items_.size(), 0.0);
  for (const auto& [other, sim] : neighbors(user))
    for (const auto idx : user_items_.at(other)) out[idx] += sim;
  return out;
}

std::vector<double> knn_scores(const KnnModel& model, UserId user) { return model.scores(user); }

std::vector<ItemId> knn_topk(const KnnModel& model, UserId user,
                             const std::unordered_set<ItemId>& exclude, std::size_t k) {
  const auto scores = model.scores(user);
  return top_k<double>(model.items(), scores, exclude, k);
}

}  // namespace deepspace
