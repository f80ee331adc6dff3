#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <unordered_set>
#include <vector>

#include "deepspace/corpus.hpp"
#include "deepspace/types.hpp"

namespace deepspace {

struct HitRecord {
  UserItem target;
  bool hit = false;

  friend bool operator==(const HitRecord&, const HitRecord&) = default;
};

/// Paired outcomes of systems A and B: n10 = only A hit, n01 = only B hit.
struct ContingencyTable {
  std::uint64_t n00 = 0;
  std::uint64_t n01 = 0;
  std::uint64_t n10 = 0;
  std::uint64_t n11 = 0;

  std::uint64_t total() const noexcept { return n00 + n01 + n10 + n11; }
};

double recall_at_k(std::span<const HitRecord> hits);

/// Exact one-tailed McNemar: P(X >= n10) for X ~ Binomial(n10 + n01, 1/2),
/// small when A beats B.
double mcnemar_one_tailed(const ContingencyTable& table);

/// Throws ValidationError unless both runs cover the same target sequence.
ContingencyTable contingency(std::span<const HitRecord> a, std::span<const HitRecord> b);

/// Top-k for a user with the given items excluded. May throw CannotRank.
using Recommender = std::function<std::vector<ItemId>(
    UserId user, const std::unordered_set<ItemId>& exclude, std::size_t k)>;

struct EvalResult {
  double recall = 0.0;
  std::size_t k = 10;
  std::vector<HitRecord> hits;
  std::size_t skipped = 0;      // targets of users absent from train
  std::size_t cannot_rank = 0;  // targets scored as misses because the recommender gave up
};

/// Each target (user, item) is a hit when the item is in the user's top-k,
/// excluding her train-rated items. The recommender is called once per user,
/// from up to `workers` threads at a time.
EvalResult evaluate_system(const Recommender& recommender, std::span<const UserItem> targets,
                           std::span<const RatingEvent> train, std::size_t k = 10,
                           unsigned workers = 1);

/// One `user<TAB>item<TAB>{0|1}` line per target, then `recall@k<TAB>value`.
void write_results(std::ostream& out, const EvalResult& result);
void save_results(const EvalResult& result, const std::filesystem::path& path);
EvalResult read_results(std::istream& in);
EvalResult load_results(const std::filesystem::path& path);

}  // namespace deepspace
