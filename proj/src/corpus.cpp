#include "deepspace/corpus.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <unordered_map>

namespace deepspace {
namespace {

template <typename Int>
Int parse_int(std::string_view field, std::size_t line, const char* name) {
  Int value{};
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || res.ec != std::errc{} || res.ptr != field.data() + field.size())
    throw ParseError(line, std::string("bad ") + name + " field '" + std::string(field) + "'");
  return value;
}

std::string_view trim_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

}  // namespace

std::vector<RatingEvent> parse_ratings(std::istream& in, DuplicatePolicy policy) {
  std::vector<RatingEvent> events;
  std::unordered_map<UserItem, std::size_t, UserItemHash> seen;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim_cr(raw);
    if (line.empty()) continue;

    std::string_view fields[4];
    std::size_t pos = 0;
    for (int f = 0; f < 4; ++f) {
      const auto sep = f < 3 ? line.find("::", pos) : std::string_view::npos;
      if (f < 3 && sep == std::string_view::npos)
        throw ParseError(line_no, "expected UserID::MovieID::Rating::Timestamp");
      fields[f] = line.substr(pos, sep == std::string_view::npos ? line.size() - pos : sep - pos);
      pos = sep + 2;
    }

    RatingEvent ev;
    ev.user = parse_int<UserId>(fields[0], line_no, "user");
    ev.item = parse_int<ItemId>(fields[1], line_no, "item");
    ev.rating = parse_int<int>(fields[2], line_no, "rating");
    ev.timestamp = parse_int<std::int64_t>(fields[3], line_no, "timestamp");
    if (ev.rating < 1 || ev.rating > 5)
      throw ParseError(line_no, "rating out of range 1..5: " + std::to_string(ev.rating));

    const auto [it, inserted] = seen.try_emplace(UserItem{ev.user, ev.item}, events.size());
    if (inserted) {
      events.push_back(ev);
    } else if (policy == DuplicatePolicy::last_wins) {
      events[it->second] = ev;
    } else {
      throw ValidationError("line " + std::to_string(line_no) + ": duplicate (user, item) pair (" +
                            std::to_string(ev.user) + ", " + std::to_string(ev.item) + ")");
    }
  }
  return events;
}

std::vector<RatingEvent> load_ratings(const std::filesystem::path& path, DuplicatePolicy policy) {
  auto in = open_input(path);
  return parse_ratings(in, policy);
}

std::vector<ReviewDocument> parse_reviews(std::istream& in) {
  std::vector<ReviewDocument> docs;
  std::unordered_map<ItemId, std::size_t> index;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim_cr(raw);
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw ParseError(line_no, "expected item_id<TAB>text");
    const auto item = parse_int<ItemId>(line.substr(0, tab), line_no, "item");
    const auto text = line.substr(tab + 1);

    const auto [it, inserted] = index.try_emplace(item, docs.size());
    if (inserted) {
      docs.push_back({item, std::string(text)});
    } else {
      auto& doc = docs[it->second];
      doc.text += ' ';
      doc.text += text;
    }
  }
  return docs;
}

std::vector<ReviewDocument> load_reviews(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_reviews(in);
}

double user_mean(std::span<const RatingEvent> events, UserId user) {
  std::int64_t sum = 0;
  std::size_t count = 0;
  for (const auto& ev : events) {
    if (ev.user != user) continue;
    sum += ev.rating;
    ++count;
  }
  if (count == 0) throw NoSuchUser(user);
  return static_cast<double>(sum) / static_cast<double>(count);
}

ProfileMap build_profiles(std::span<const RatingEvent> events) {
  std::map<UserId, std::int64_t> sums;
  ProfileMap profiles;
  for (const auto& ev : events) {
    sums[ev.user] += ev.rating;
    auto& p = profiles[ev.user];
    p.user = ev.user;
    ++p.rating_count;
  }
  for (auto& [user, p] : profiles)
    p.mean_rating = static_cast<double>(sums[user]) / static_cast<double>(p.rating_count);
  return profiles;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_word_byte(c)) {
      current += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch;
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<Observation> ratings_to_observations(std::span<const RatingEvent> events,
                                                 const ProfileMap& profiles) {
  std::vector<Observation> out;
  out.reserve(events.size());
  for (const auto& ev : events) {
    const auto it = profiles.find(ev.user);
    if (it == profiles.end() || it->second.rating_count == 0) throw NoSuchUser(ev.user);
    const int level = binarize(ev.rating, it->second.mean_rating);
    out.push_back({ev.item, "user" + std::to_string(ev.user) + "_rating" + std::to_string(level)});
  }
  return out;
}

std::vector<Observation> reviews_to_observations(std::span<const ReviewDocument> docs) {
  std::vector<Observation> out;
  for (const auto& doc : docs)
    for (auto& token : tokenize(doc.text)) out.push_back({doc.item, std::move(token)});
  return out;
}

}  // namespace deepspace
