#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "deepspace/corpus.hpp"
#include "deepspace/rng.hpp"

using namespace deepspace;

namespace {

std::vector<RatingEvent> parse(const std::string& text,
                               DuplicatePolicy policy = DuplicatePolicy::reject) {
  std::istringstream in(text);
  return parse_ratings(in, policy);
}

}  // namespace

TEST_CASE("load_ratings maps MovieLens fields") {
  const auto events = parse("1::1193::5::978300760\n");
  REQUIRE(events.size() == 1);
  CHECK(events[0] == RatingEvent{1, 1193, 5, 978300760});
}

TEST_CASE("load_ratings on empty input") {
  CHECK(parse("").empty());
  CHECK(parse("\n\n").empty());
}

TEST_CASE("load_ratings keeps file order and tolerates CRLF") {
  const auto events = parse("2::10::3::5\r\n1::11::4::6\r\n");
  REQUIRE(events.size() == 2);
  CHECK(events[0].user == 2);
  CHECK(events[1].item == 11);
}

TEST_CASE("load_ratings reports the malformed line number") {
  try {
    parse("1::1::5::1\n1::2::5\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse("1::x::5::1\n"), ParseError);
  CHECK_THROWS_AS(parse("1::1::6::1\n"), ParseError);
  CHECK_THROWS_AS(parse("1::1::0::1\n"), ParseError);
  CHECK_THROWS_AS(parse("1::1::5::1::9\n"), ParseError);
}

TEST_CASE("duplicate pairs: rejected by default, last wins on request") {
  const std::string text = "1::5::2::100\n1::6::3::101\n1::5::4::102\n";
  CHECK_THROWS_AS(parse(text), ValidationError);
  const auto events = parse(text, DuplicatePolicy::last_wins);
  REQUIRE(events.size() == 2);
  CHECK(events[0] == RatingEvent{1, 5, 4, 102});
}

TEST_CASE("user_mean") {
  std::vector<RatingEvent> events;
  for (int r : {3, 4, 3, 4, 3}) events.push_back({73, static_cast<ItemId>(events.size()), r, 0});
  events.push_back({9, 1, 5, 0});
  CHECK(user_mean(events, 73) == doctest::Approx(3.4).epsilon(1e-15));
  CHECK(user_mean(events, 9) == 5.0);
  CHECK_THROWS_AS(user_mean(events, 42), NoSuchUser);

  const auto profiles = build_profiles(events);
  CHECK(profiles.at(73).rating_count == 5);
  CHECK(profiles.at(73).mean_rating == doctest::Approx(3.4));
}

TEST_CASE("binarize") {
  CHECK(binarize(3, 3.4) == 1);
  CHECK(binarize(4, 3.4) == 2);
  CHECK(binarize(3, 3.0) == 2);
}

TEST_CASE("binarize is monotone in rating") {
  for (double mean = 1.0; mean <= 5.0; mean += 0.05)
    for (int r = 1; r < 5; ++r) CHECK(binarize(r, mean) <= binarize(r + 1, mean));
}

TEST_CASE("ratings_to_observations tokens") {
  ProfileMap profiles;
  profiles[73] = {73, 3.4, 5};
  profiles[9] = {9, 2.0, 3};
  const std::vector<RatingEvent> events{{73, 240, 3, 0}, {9, 7, 5, 0}};
  const auto obs = ratings_to_observations(events, profiles);
  REQUIRE(obs.size() == 2);
  CHECK(obs[0] == Observation{240, "user73_rating1"});
  CHECK(obs[1] == Observation{7, "user9_rating2"});

  CHECK(ratings_to_observations({}, profiles).empty());
  const std::vector<RatingEvent> stranger{{5, 1, 3, 0}};
  CHECK_THROWS_AS(ratings_to_observations(stranger, profiles), NoSuchUser);
}

TEST_CASE("rating observations: one per event, vocabulary at most two per user") {
  Rng rng(7);
  std::vector<RatingEvent> events;
  for (UserId u = 0; u < 40; ++u)
    for (ItemId i = 0; i < 30; ++i)
      if (uniform01(rng) < 0.4)
        events.push_back({u, i, static_cast<int>(1 + uniform_below(rng, 5)), 0});
  const auto profiles = build_profiles(events);
  const auto obs = ratings_to_observations(events, profiles);
  CHECK(obs.size() == events.size());
  std::set<std::string> vocab;
  for (const auto& o : obs) vocab.insert(o.token);
  CHECK(vocab.size() <= 2 * profiles.size());
}

TEST_CASE("reviews_to_observations tokenizer") {
  const std::vector<ReviewDocument> docs{{240, "The masterpiece, the"}};
  const auto obs = reviews_to_observations(docs);
  REQUIRE(obs.size() == 3);
  CHECK(obs[0] == Observation{240, "the"});
  CHECK(obs[1] == Observation{240, "masterpiece"});
  CHECK(obs[2] == Observation{240, "the"});

  CHECK(reviews_to_observations(std::vector<ReviewDocument>{{7, ""}}).empty());

  const auto hyphen = reviews_to_observations(std::vector<ReviewDocument>{{7, "A-1 movie!"}});
  REQUIRE(hyphen.size() == 3);
  CHECK(hyphen[0].token == "a");
  CHECK(hyphen[1].token == "1");
  CHECK(hyphen[2].token == "movie");
}

TEST_CASE("tokenizer keeps UTF-8 words whole") {
  const auto tokens = tokenize("Caf\xC3\xA9 NOIR");
  REQUIRE(tokens.size() == 2);
  CHECK(tokens[0] == "caf\xC3\xA9");
  CHECK(tokens[1] == "noir");
}

TEST_CASE("tokenizing concatenated texts equals concatenated tokenizations") {
  Rng rng(3);
  const std::string alphabet = "abcXYZ019 ,.-!\t";
  for (int trial = 0; trial < 200; ++trial) {
    std::string a, b;
    for (int i = 0; i < 20; ++i) a += alphabet[uniform_below(rng, alphabet.size())];
    for (int i = 0; i < 20; ++i) b += alphabet[uniform_below(rng, alphabet.size())];
    auto expected = tokenize(a);
    const auto tb = tokenize(b);
    expected.insert(expected.end(), tb.begin(), tb.end());
    // documents are joined with a separator, as the reviews loader does
    CHECK(tokenize(a + " " + b) == expected);
  }
}

TEST_CASE("reviews loader concatenates lines per item") {
  std::istringstream in("240\tThe masterpiece\n7\tgood\n240\tthe legend\n");
  const auto docs = parse_reviews(in);
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].item == 240);
  CHECK(docs[0].text == "The masterpiece the legend");
  CHECK(docs[1].text == "good");

  std::istringstream bad("240 no tab\n");
  CHECK_THROWS_AS(parse_reviews(bad), ParseError);
}
