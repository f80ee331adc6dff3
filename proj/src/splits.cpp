#include "deepspace/splits.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <tuple>

namespace deepspace {
namespace {

// Per-user events in temporal order, ties by item id.
std::map<UserId, std::vector<const RatingEvent*>> events_by_user(
    std::span<const RatingEvent> events) {
  std::map<UserId, std::vector<const RatingEvent*>> by_user;
  for (const auto& ev : events) by_user[ev.user].push_back(&ev);
  for (auto& [user, list] : by_user)
    std::sort(list.begin(), list.end(), [](const RatingEvent* a, const RatingEvent* b) {
      return std::tie(a->timestamp, a->item) < std::tie(b->timestamp, b->item);
    });
  return by_user;
}

}  // namespace

const char* to_string(Part part) noexcept {
  switch (part) {
    case Part::train: return "train";
    case Part::validation: return "validation";
    case Part::test: return "test";
  }
  return "?";
}

const char* to_string(Holdout holdout) noexcept {
  return holdout == Holdout::test ? "test" : "validation";
}

Holdout parse_holdout(std::string_view text) {
  if (text == "test") return Holdout::test;
  if (text == "validation") return Holdout::validation;
  throw Error("holdout must be 'test' or 'validation', got '" + std::string(text) + "'");
}

EvalSplit::EvalSplit(std::vector<UserItem> train, std::vector<UserItem> validation,
                     std::vector<UserItem> test)
    : train_(std::move(train)), validation_(std::move(validation)), test_(std::move(test)) {
  std::sort(train_.begin(), train_.end());
  std::sort(validation_.begin(), validation_.end());
  std::sort(test_.begin(), test_.end());
  index_.reserve(train_.size() + validation_.size() + test_.size());
  const auto add = [this](const std::vector<UserItem>& pairs, Part part) {
    for (const auto& p : pairs)
      if (!index_.emplace(p, part).second)
        throw ValidationError("pair (" + std::to_string(p.user) + ", " + std::to_string(p.item) +
                              ") assigned to more than one set");
  };
  add(train_, Part::train);
  add(validation_, Part::validation);
  add(test_, Part::test);
}

Part EvalSplit::part_of(const UserItem& pair) const {
  const auto it = index_.find(pair);
  if (it == index_.end())
    throw ValidationError("pair (" + std::to_string(pair.user) + ", " + std::to_string(pair.item) +
                          ") is not in the split");
  return it->second;
}

bool EvalSplit::held_out(const UserItem& pair, Holdout holdout) const {
  const Part part = part_of(pair);
  if (part == Part::test) return true;
  return holdout == Holdout::validation && part == Part::validation;
}

std::map<UserId, std::size_t> mark_counts(std::span<const RatingEvent> events, std::size_t every) {
  if (every == 0) throw Error("mark interval must be positive");
  const auto by_user = events_by_user(events);

  std::vector<std::pair<UserId, std::size_t>> order;
  order.reserve(by_user.size());
  for (const auto& [user, list] : by_user) order.emplace_back(user, list.size());
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  // Position p (1-based) of the global sequence is marked when p % every == 0,
  // so a user's marks depend only on where her block starts.
  std::map<UserId, std::size_t> counts;
  std::size_t offset = 0;
  for (const auto& [user, n] : order) {
    counts[user] = (offset + n) / every - offset / every;
    offset += n;
  }
  return counts;
}

EvalSplit build_split(std::span<const RatingEvent> events,
                      const std::map<UserId, std::size_t>& counts) {
  std::vector<UserItem> train, validation, test;
  for (const auto& [user, list] : events_by_user(events)) {
    const auto it = counts.find(user);
    const std::size_t n = it == counts.end() ? 0 : it->second;
    if (n > list.size())
      throw std::logic_error("user " + std::to_string(user) + " has more marks than ratings");
    const std::size_t first_held = list.size() - n;
    const std::size_t first_test = first_held + (n + 1) / 2;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const UserItem pair{user, list[i]->item};
      if (i < first_held)
        train.push_back(pair);
      else if (i < first_test)
        validation.push_back(pair);
      else
        test.push_back(pair);
    }
  }
  return EvalSplit(std::move(train), std::move(validation), std::move(test));
}

std::vector<UserItem> holdout_targets(const EvalSplit& split, std::span<const RatingEvent> events,
                                      Holdout holdout) {
  const Part wanted = holdout == Holdout::test ? Part::test : Part::validation;
  std::vector<UserItem> out;
  for (const auto& ev : events) {
    const UserItem pair{ev.user, ev.item};
    if (ev.rating >= 4 && split.part_of(pair) == wanted) out.push_back(pair);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<UserItem> test_targets(const EvalSplit& split, std::span<const RatingEvent> events) {
  return holdout_targets(split, events, Holdout::test);
}

std::vector<RatingEvent> training_events(std::span<const RatingEvent> events,
                                         const EvalSplit& split, Holdout holdout) {
  std::vector<RatingEvent> out;
  out.reserve(events.size());
  for (const auto& ev : events)
    if (!split.held_out({ev.user, ev.item}, holdout)) out.push_back(ev);
  return out;
}

void write_split(std::ostream& out, const EvalSplit& split) {
  for (const auto& p : split.validation()) out << p.user << '\t' << p.item << "\tvalidation\n";
  for (const auto& p : split.test()) out << p.user << '\t' << p.item << "\ttest\n";
}

void save_split(const EvalSplit& split, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_split(out, split);
  if (!out) throw Error("write failed: " + path.string());
}

EvalSplit read_split(std::istream& in, std::span<const RatingEvent> events) {
  std::unordered_map<UserItem, Part, UserItemHash> held;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos) throw ParseError(line_no, "expected user<TAB>item<TAB>set");
    UserItem pair;
    const auto u = line.substr(0, t1);
    const auto i = line.substr(t1 + 1, t2 - t1 - 1);
    if (std::from_chars(u.data(), u.data() + u.size(), pair.user).ptr != u.data() + u.size() ||
        u.empty() ||
        std::from_chars(i.data(), i.data() + i.size(), pair.item).ptr != i.data() + i.size() ||
        i.empty())
      throw ParseError(line_no, "bad user or item id");
    const auto tag = line.substr(t2 + 1);
    Part part;
    if (tag == "validation")
      part = Part::validation;
    else if (tag == "test")
      part = Part::test;
    else
      throw ParseError(line_no, "set must be 'validation' or 'test'");
    if (!held.emplace(pair, part).second) throw ParseError(line_no, "pair listed twice");
  }

  std::vector<UserItem> train, validation, test;
  std::size_t matched = 0;
  for (const auto& ev : events) {
    const UserItem pair{ev.user, ev.item};
    const auto it = held.find(pair);
    if (it == held.end()) {
      train.push_back(pair);
      continue;
    }
    ++matched;
    (it->second == Part::test ? test : validation).push_back(pair);
  }
  if (matched != held.size())
    throw FormatError("split lists " + std::to_string(held.size() - matched) +
                      " pair(s) absent from the ratings corpus");
  return EvalSplit(std::move(train), std::move(validation), std::move(test));
}

EvalSplit load_split(const std::filesystem::path& path, std::span<const RatingEvent> events) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_split(in, events);
}

}  // namespace deepspace
