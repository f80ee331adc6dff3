#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "deepspace/rng.hpp"
#include "deepspace/space.hpp"

using namespace deepspace;

namespace {

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.dot(b) / (a.norm() * b.norm());
}

// Items 1 and 2 share tokens t0..t4; item 3 has its own tokens u0..u4.
std::vector<Observation> substitutes_corpus() {
  std::vector<Observation> obs;
  for (int rep = 0; rep < 3; ++rep)
    for (int t = 0; t < 5; ++t) {
      obs.push_back({1, "t" + std::to_string(t)});
      obs.push_back({2, "t" + std::to_string(t)});
      obs.push_back({3, "u" + std::to_string(t)});
    }
  return obs;
}

std::vector<Observation> toy_corpus(std::uint64_t seed) {
  // 50 items, 20 tokens; each item draws from a 5-token neighbourhood
  Rng rng(seed);
  std::vector<Observation> obs;
  for (ItemId item = 0; item < 50; ++item)
    for (int k = 0; k < 12; ++k) {
      const auto token = (item % 4) * 5 + uniform_below(rng, 5);
      obs.push_back({item, "w" + std::to_string(token)});
    }
  return obs;
}

}  // namespace

TEST_CASE("vanishing learning rate leaves the initialization") {
  const auto obs = substitutes_corpus();
  SpaceTrainConfig cfg;
  cfg.dims = 8;
  cfg.iterations = 1;
  cfg.alpha0 = 1e-12;
  cfg.seed = 4;
  SpaceTrainer<double> trainer(obs, cfg);
  const Eigen::MatrixXd init = trainer.vectors();
  CHECK(init.cwiseAbs().maxCoeff() <= 0.5 / 8);
  trainer.train();
  CHECK((trainer.vectors() - init).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("items sharing observations end up closer") {
  SpaceTrainConfig cfg;
  cfg.dims = 8;
  cfg.iterations = 200;
  cfg.seed = 17;
  const auto space = train_space<double>(substitutes_corpus(), cfg);
  const Eigen::VectorXd v1 = space.vector(1), v2 = space.vector(2), v3 = space.vector(3);
  CHECK(cosine(v1, v2) > cosine(v1, v3));
}

TEST_CASE("training lowers the observation loss") {
  const auto obs = toy_corpus(3);
  SpaceTrainConfig cfg;
  cfg.dims = 10;
  cfg.iterations = 20;
  cfg.seed = 9;
  SpaceTrainer<double> trainer(obs, cfg);
  const double before = trainer.mean_neg_log_likelihood(obs);
  trainer.train();
  CHECK(trainer.mean_neg_log_likelihood(obs) < before);
}

TEST_CASE("single worker training is deterministic") {
  const auto obs = toy_corpus(5);
  SpaceTrainConfig cfg;
  cfg.dims = 6;
  cfg.iterations = 3;
  cfg.seed = 77;
  CHECK(train_space<double>(obs, cfg) == train_space<double>(obs, cfg));
  const auto first = train_space<double>(obs, cfg);
  cfg.seed = 78;
  CHECK_FALSE(train_space<double>(obs, cfg) == first);
}

TEST_CASE("multi-worker training runs and still learns") {
  const auto obs = toy_corpus(6);
  SpaceTrainConfig cfg;
  cfg.dims = 10;
  cfg.iterations = 20;
  cfg.workers = 4;
  SpaceTrainer<double> trainer(obs, cfg);
  const double before = trainer.mean_neg_log_likelihood(obs);
  trainer.train();
  CHECK(trainer.mean_neg_log_likelihood(obs) < before);
  CHECK(trainer.vectors().allFinite());
}

TEST_CASE("learning rate schedule") {
  SpaceTrainConfig cfg;
  cfg.dims = 2;
  cfg.alpha0 = 0.025;
  SpaceTrainer<double> trainer(substitutes_corpus(), cfg);
  CHECK(trainer.learning_rate(0, 100) == 0.025);
  CHECK(trainer.learning_rate(50, 100) == doctest::Approx(0.0125));
  CHECK(trainer.learning_rate(100, 100) == doctest::Approx(0.025 * 1e-4));
}

TEST_CASE("train_space rejects bad input") {
  CHECK_THROWS(train_space<double>({}, SpaceTrainConfig{}));
  SpaceTrainConfig cfg;
  cfg.dims = 0;
  CHECK_THROWS(train_space<double>(substitutes_corpus(), cfg));
  cfg.dims = 4;
  cfg.iterations = 0;
  CHECK_THROWS(train_space<double>(substitutes_corpus(), cfg));
}

TEST_CASE("vsm space") {
  ProfileMap profiles;
  profiles[1] = {1, 3.0, 2};
  profiles[2] = {2, 4.0, 2};
  profiles[3] = {3, 2.0, 1};
  const std::vector<RatingEvent> events{
      {1, 10, 4, 0}, {1, 20, 2, 0},  // user 1: item 10 -> 2, item 20 -> 1
      {2, 20, 4, 0}, {2, 30, 4, 0},  // user 2: both -> 2
      {3, 40, 5, 0},                 // item 40 only rated by user 3
  };
  const std::vector<ItemId> extra{50};
  const auto space = build_vsm_space<double>(events, profiles, extra);
  CHECK(space.dims() == 3);
  CHECK(space.provenance() == Provenance::vsm);
  CHECK(space.items() == std::vector<ItemId>{10, 20, 30, 40, 50});

  CHECK(space.vector(40) == Eigen::Vector3d(0, 0, 1));
  CHECK(space.vector(10) == Eigen::Vector3d(1, 0, 0));
  CHECK(space.vector(50) == Eigen::Vector3d::Zero());
  const Eigen::Vector3d v20 = space.vector(20);
  CHECK(v20.isApprox(Eigen::Vector3d(1, 2, 0) / std::sqrt(5.0)));

  for (std::size_t i = 0; i < space.size(); ++i) {
    const double norm = space.vectors().col(static_cast<Eigen::Index>(i)).norm();
    if (norm > 0) CHECK(std::abs(norm - 1.0) <= 1e-12);
  }
}

TEST_CASE("vsm: identical rating columns give identical vectors") {
  const ProfileMap profiles{{1, {1, 3.0, 2}}, {2, {2, 3.0, 2}}};
  const std::vector<RatingEvent> events{{1, 7, 4, 0}, {2, 7, 2, 0}, {1, 8, 4, 0}, {2, 8, 2, 0}};
  const auto space = build_vsm_space<double>(events, profiles);
  CHECK(space.vector(7) == space.vector(8));
}

TEST_CASE("space file round trip is bit exact") {
  Rng rng(1);
  Eigen::MatrixXd vectors(3, 2);
  for (Eigen::Index c = 0; c < 2; ++c)
    for (Eigen::Index r = 0; r < 3; ++r) vectors(r, c) = (uniform01(rng) - 0.5) * 1e-3;
  vectors(0, 0) = -0.0;
  vectors(1, 1) = 1e-310;  // subnormal
  const EmbeddingSpace<double> space({240, 7}, vectors, Provenance::cf);

  std::stringstream buf;
  write_space(buf, space);
  const auto back = read_space<double>(buf);
  CHECK(back == space);
  CHECK(std::signbit(back.vector(240)[0]));

  Eigen::MatrixXf fv = vectors.cast<float>();
  const EmbeddingSpace<float> fspace({1, 2}, fv, Provenance::cb);
  std::stringstream fbuf;
  write_space(fbuf, fspace);
  CHECK(read_space<float>(fbuf) == fspace);
}

TEST_CASE("space file errors") {
  std::istringstream truncated("2 3 cf\n1 0.5 0.5 0.5\n");
  CHECK_THROWS_AS(read_space<double>(truncated), FormatError);

  std::istringstream short_line("1 3 cf\n1 0.5 0.5\n");
  CHECK_THROWS_AS(read_space<double>(short_line), FormatError);

  std::istringstream extra("1 1 cf\n1 0.5\n2 0.5\n");
  CHECK_THROWS_AS(read_space<double>(extra), FormatError);

  std::istringstream bad_tag("1 1 lsa\n1 0.5\n");
  CHECK_THROWS_AS(read_space<double>(bad_tag), FormatError);

  std::istringstream no_tag("2 3\n1 1 2 3\n2 4 5 6\n");
  const auto space = read_space<double>(no_tag);
  CHECK(space.size() == 2);
  CHECK(space.provenance() == Provenance::unknown);
}

TEST_CASE("exported vectors") {
  Eigen::MatrixXd v(2, 1);
  v << 0.5, -1.0;
  const EmbeddingSpace<double> space({240}, v, Provenance::cf);
  std::stringstream out;
  write_vectors(out, space);
  CHECK(out.str() == "1 2\n240 0.5 -1.0\n");

  std::stringstream empty;
  write_vectors(empty, EmbeddingSpace<double>({}, Eigen::MatrixXd(4, 0), Provenance::cf));
  CHECK(empty.str() == "0 4\n");

  const auto back = read_space<double>(out);
  CHECK(back.vectors() == space.vectors());
  CHECK(back.items() == space.items());
}

TEST_CASE("space file on disk") {
  const auto path = std::filesystem::temp_directory_path() / "deepspace_space_test.txt";
  Eigen::MatrixXd v(2, 2);
  v << 1, 2, 3, 4;
  const EmbeddingSpace<double> space({5, 6}, v, Provenance::vsm);
  save_space(space, path);
  CHECK(load_space<double>(path) == space);
  std::filesystem::remove(path);
}
