#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "deepspace/eval.hpp"
#include "oracles.hpp"

using namespace deepspace;

TEST_CASE("recall_at_k") {
  std::vector<HitRecord> hits;
  for (int i = 0; i < 10; ++i) hits.push_back({{1, i}, i < 3});
  CHECK(recall_at_k(hits) == doctest::Approx(0.3));
  const double before = recall_at_k(hits);
  hits.push_back({{2, 1}, false});
  CHECK(recall_at_k(hits) < before);

  std::vector<HitRecord> all{{{1, 1}, true}, {{1, 2}, true}};
  CHECK(recall_at_k(all) == 1.0);
  CHECK_THROWS(recall_at_k({}));
}

TEST_CASE("mcnemar worked values") {
  CHECK(mcnemar_one_tailed({0, 6, 6, 0}) == 2510.0 / 4096.0);
  CHECK(mcnemar_one_tailed({0, 2, 10, 0}) == 79.0 / 4096.0);
  CHECK(mcnemar_one_tailed({3, 5, 0, 9}) == 1.0);
  CHECK_THROWS_AS(mcnemar_one_tailed({4, 0, 0, 7}), UndefinedTest);
}

TEST_CASE("mcnemar matches enumeration") {
  for (unsigned n = 1; n <= 20; ++n)
    for (unsigned n10 = 0; n10 <= n; ++n10)
      CHECK(mcnemar_one_tailed({0, n - n10, n10, 0}) == oracle::mcnemar_brute_force(n10, n - n10));
}

TEST_CASE("mcnemar large counts") {
  for (unsigned n : {63u, 100u, 400u})
    for (unsigned n10 : {0u, n / 3, n / 2, n / 2 + 7, n}) {
      const double p = mcnemar_one_tailed({0, n - n10, n10, 0});
      CHECK(p == doctest::Approx(oracle::binomial_tail_exact(n, n10)).epsilon(1e-9));
    }
  // large, lopsided: vanishing but positive
  const double tiny = mcnemar_one_tailed({0, 100, 900, 0});
  CHECK(tiny >= 0.0);
  CHECK(tiny < 1e-100);
}

TEST_CASE("mcnemar symmetry") {
  for (unsigned a = 0; a <= 12; ++a)
    for (unsigned b = 0; b <= 12; ++b) {
      if (a + b == 0) continue;
      const double p_ab = mcnemar_one_tailed({0, b, a, 0});
      const double p_ba = mcnemar_one_tailed({0, a, b, 0});
      CHECK(p_ba == oracle::binomial_tail_exact(a + b, b));
      // P(X >= a) + P(X >= b) = 1 + P(X = a) when a + b = n
      const double point = oracle::binomial_tail_exact(a + b, a) - oracle::binomial_tail_exact(a + b, a + 1);
      CHECK(p_ab + p_ba == doctest::Approx(1.0 + point).epsilon(1e-12));
    }
}

TEST_CASE("contingency table") {
  const std::vector<HitRecord> a{{{1, 1}, true}, {{1, 2}, true}, {{2, 3}, false}, {{3, 4}, false}};
  const std::vector<HitRecord> b{{{1, 1}, true}, {{1, 2}, false}, {{2, 3}, true}, {{3, 4}, false}};
  const auto t = contingency(a, b);
  CHECK(t.n11 == 1);
  CHECK(t.n10 == 1);
  CHECK(t.n01 == 1);
  CHECK(t.n00 == 1);
  CHECK(t.total() == 4);

  auto shifted = b;
  shifted[2].target.item = 99;
  CHECK_THROWS_AS(contingency(a, shifted), ValidationError);
  CHECK_THROWS_AS(contingency(a, std::span(b).first(3)), ValidationError);
}

TEST_CASE("evaluate_system") {
  const std::vector<RatingEvent> train{{1, 10, 5, 0}, {2, 10, 3, 0}};
  const std::vector<UserItem> targets{{1, 20}, {2, 30}, {1, 40}, {3, 20}};
  const Recommender rec = [](UserId user, const std::unordered_set<ItemId>& exclude, std::size_t k) {
    CHECK(exclude.count(10) == 1);
    CHECK(k == 2);
    if (user == 2) throw CannotRank("no signal");
    return std::vector<ItemId>{20, 30};
  };
  for (unsigned workers : {1u, 3u}) {
    const auto result = evaluate_system(rec, targets, train, 2, workers);
    CHECK(result.skipped == 1);
    CHECK(result.cannot_rank == 1);
    REQUIRE(result.hits.size() == 3);
    CHECK(result.hits[0] == HitRecord{{1, 20}, true});
    CHECK(result.hits[1] == HitRecord{{2, 30}, false});
    CHECK(result.hits[2] == HitRecord{{1, 40}, false});
    CHECK(result.recall == doctest::Approx(1.0 / 3.0));
  }

  const std::vector<UserItem> one{{1, 20}};
  CHECK(evaluate_system(rec, one, train, 2).recall == 1.0);
}

TEST_CASE("results file round trip") {
  EvalResult r;
  r.k = 10;
  r.hits = {{{1, 2}, true}, {{3, 4}, false}};
  r.recall = 0.5;
  std::stringstream buf;
  write_results(buf, r);
  CHECK(buf.str() == "1\t2\t1\n3\t4\t0\nrecall@10\t0.5\n");
  const auto back = read_results(buf);
  CHECK(back.hits == r.hits);
  CHECK(back.recall == 0.5);
  CHECK(back.k == 10);

  std::istringstream missing("1\t2\t1\n");
  CHECK_THROWS_AS(read_results(missing), FormatError);
  std::istringstream bad_flag("1\t2\t2\nrecall@10\t1\n");
  CHECK_THROWS_AS(read_results(bad_flag), ParseError);
}
