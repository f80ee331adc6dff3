#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deepspace/types.hpp"

namespace deepspace {

struct RatingEvent {
  UserId user = 0;
  ItemId item = 0;
  int rating = 0;  // 1..5
  std::int64_t timestamp = 0;

  friend bool operator==(const RatingEvent&, const RatingEvent&) = default;
};

struct UserProfile {
  UserId user = 0;
  double mean_rating = 0.0;
  std::size_t rating_count = 0;
};

/// All review text for one item, without ratings or user names.
struct ReviewDocument {
  ItemId item = 0;
  std::string text;
};

/// One (item, token) training pair for the embedding trainer.
struct Observation {
  ItemId item = 0;
  std::string token;

  friend bool operator==(const Observation&, const Observation&) = default;
};

using ProfileMap = std::map<UserId, UserProfile>;

enum class DuplicatePolicy {
  reject,     // a repeated (user, item) pair is a ValidationError
  last_wins,  // later lines overwrite earlier ones in place
};

/// Parses `UserID::MovieID::Rating::Timestamp` lines. Blank lines are skipped.
std::vector<RatingEvent> parse_ratings(std::istream& in,
                                       DuplicatePolicy policy = DuplicatePolicy::reject);
std::vector<RatingEvent> load_ratings(const std::filesystem::path& path,
                                      DuplicatePolicy policy = DuplicatePolicy::reject);

/// Parses `item_id<TAB>text` lines; repeated items are joined with one space.
/// Documents come back in first-appearance order.
std::vector<ReviewDocument> parse_reviews(std::istream& in);
std::vector<ReviewDocument> load_reviews(const std::filesystem::path& path);

double user_mean(std::span<const RatingEvent> events, UserId user);

ProfileMap build_profiles(std::span<const RatingEvent> events);

/// 1 below the user's mean, 2 at or above it.
constexpr int binarize(int rating, double mean) noexcept {
  return static_cast<double>(rating) < mean ? 1 : 2;
}

/// Lowercased maximal runs of alphanumeric characters. Bytes >= 0x80 count as
/// word characters so UTF-8 words are kept whole.
std::vector<std::string> tokenize(std::string_view text);

/// One observation `user{uid}_rating{1|2}` per event.
std::vector<Observation> ratings_to_observations(std::span<const RatingEvent> events,
                                                 const ProfileMap& profiles);

std::vector<Observation> reviews_to_observations(std::span<const ReviewDocument> docs);

}  // namespace deepspace
