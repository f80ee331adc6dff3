#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "deepspace/corpus.hpp"
#include "deepspace/types.hpp"

namespace deepspace {

enum class Part : std::uint8_t { train, validation, test };

/// Which held-out set a run is scored on. Scoring on `test` trains on
/// train + validation; scoring on `validation` trains on train only.
enum class Holdout { test, validation };

const char* to_string(Part part) noexcept;
const char* to_string(Holdout holdout) noexcept;
Holdout parse_holdout(std::string_view text);

/// Partition of the corpus pairs. Each set is sorted by (user, item).
class EvalSplit {
 public:
  EvalSplit() = default;
  EvalSplit(std::vector<UserItem> train, std::vector<UserItem> validation,
            std::vector<UserItem> test);

  const std::vector<UserItem>& train() const noexcept { return train_; }
  const std::vector<UserItem>& validation() const noexcept { return validation_; }
  const std::vector<UserItem>& test() const noexcept { return test_; }

  /// Throws ValidationError for a pair outside the corpus.
  Part part_of(const UserItem& pair) const;

  /// True when `pair` must be hidden from training under `holdout`.
  bool held_out(const UserItem& pair, Holdout holdout) const;

 private:
  std::vector<UserItem> train_, validation_, test_;
  std::unordered_map<UserItem, Part, UserItemHash> index_;
};

/// Orders users by rating count (descending, ties by id) and each user's
/// ratings by (timestamp, item); marks every `every`-th rating of the
/// concatenation. Every user in `events` gets an entry, possibly 0.
std::map<UserId, std::size_t> mark_counts(std::span<const RatingEvent> events,
                                          std::size_t every = 25);

/// A user with n marks gives up her n latest ratings: the earlier ceil(n/2)
/// to validation, the later floor(n/2) to test.
EvalSplit build_split(std::span<const RatingEvent> events,
                      const std::map<UserId, std::size_t>& counts);

/// Test pairs rated 4 or 5.
std::vector<UserItem> test_targets(const EvalSplit& split, std::span<const RatingEvent> events);

/// Liked pairs (rating 4 or 5) of the set selected by `holdout`.
std::vector<UserItem> holdout_targets(const EvalSplit& split, std::span<const RatingEvent> events,
                                      Holdout holdout);

/// Events visible to training under `holdout`, in input order.
std::vector<RatingEvent> training_events(std::span<const RatingEvent> events,
                                         const EvalSplit& split, Holdout holdout);

/// `user<TAB>item<TAB>{validation|test}` per held-out pair; validation first.
void write_split(std::ostream& out, const EvalSplit& split);
void save_split(const EvalSplit& split, const std::filesystem::path& path);

/// Rebuilds a split from its export; every pair not listed is train.
EvalSplit read_split(std::istream& in, std::span<const RatingEvent> events);
EvalSplit load_split(const std::filesystem::path& path, std::span<const RatingEvent> events);

}  // namespace deepspace
