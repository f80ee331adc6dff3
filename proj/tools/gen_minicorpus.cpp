// Deterministic synthetic corpus: users with genre tastes, Zipf item
// popularity, increasing timestamps and genre-word reviews.
//
//   gen_minicorpus OUT_DIR [--seed N]
//
// Writes OUT_DIR/ratings.dat (user::item::rating::timestamp) and
// OUT_DIR/reviews.tsv (item<TAB>text).

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "deepspace/rng.hpp"

using deepspace::Rng;
using deepspace::uniform01;
using deepspace::uniform_below;

namespace {

constexpr int kUsers = 200;
constexpr int kItems = 300;
constexpr int kGenres = 6;

const char* const kGenreWords[kGenres][6] = {
    {"spaceship", "alien", "galaxy", "robot", "laser", "planet"},
    {"detective", "murder", "clue", "suspect", "alibi", "witness"},
    {"wedding", "romance", "kiss", "heartbreak", "date", "lovers"},
    {"haunted", "ghost", "scream", "blood", "zombie", "curse"},
    {"cowboy", "saloon", "sheriff", "horse", "desert", "outlaw"},
    {"cartoon", "puppy", "family", "magic", "princess", "talking"},
};
const char* const kCommon[] = {"the", "movie", "film", "story", "plot", "actor", "scene", "ending"};

std::size_t pick_weighted(const std::vector<double>& w, double total, Rng& rng) {
  double r = uniform01(rng) * total;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (r < w[i]) return i;
    r -= w[i];
  }
  return w.size() - 1;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: gen_minicorpus OUT_DIR [--seed N]\n";
    return 1;
  }
  std::uint64_t seed = 7;
  for (int a = 2; a + 1 < argc; ++a)
    if (std::string(argv[a]) == "--seed") seed = std::stoull(argv[a + 1]);

  Rng rng(seed);
  std::vector<int> genre(kItems);
  std::vector<double> popularity(kItems);
  for (int i = 0; i < kItems; ++i) {
    genre[i] = static_cast<int>(uniform_below(rng, kGenres));
    popularity[i] = 1.0 / std::pow(i + 1.0, 0.8);
  }

  const std::filesystem::path out = argv[1];
  std::filesystem::create_directories(out);
  std::ofstream ratings(out / "ratings.dat");
  std::int64_t clock = 978300000;

  for (int u = 1; u <= kUsers; ++u) {
    const int like_a = static_cast<int>(uniform_below(rng, kGenres));
    const int like_b = static_cast<int>(uniform_below(rng, kGenres));
    const int hate = static_cast<int>(uniform_below(rng, kGenres));
    const int count = 15 + static_cast<int>(uniform_below(rng, 66));

    std::vector<double> w(kItems);
    for (int i = 0; i < kItems; ++i) {
      const bool liked = genre[i] == like_a || genre[i] == like_b;
      w[i] = popularity[i] * (liked ? 4.0 : 1.0);
    }
    double total = 0;
    for (double x : w) total += x;

    for (int n = 0; n < count; ++n) {
      const auto i = pick_weighted(w, total, rng);
      total -= w[i];
      w[i] = 0;
      const bool liked = genre[i] == like_a || genre[i] == like_b;
      int r = liked ? 4 + static_cast<int>(uniform_below(rng, 2))
                    : 1 + static_cast<int>(uniform_below(rng, 3));
      if (genre[i] == hate && !liked) r = 1;
      if (uniform01(rng) < 0.1) r = 1 + static_cast<int>(uniform_below(rng, 5));
      clock += 1 + static_cast<std::int64_t>(uniform_below(rng, 600));
      ratings << u << "::" << (i + 1) << "::" << r << "::" << clock << "\n";
    }
  }

  std::ofstream reviews(out / "reviews.tsv");
  for (int i = 0; i < kItems; ++i) {
    const int lines = 1 + static_cast<int>(uniform_below(rng, 3));
    for (int l = 0; l < lines; ++l) {
      reviews << (i + 1) << '\t';
      const int words = 8 + static_cast<int>(uniform_below(rng, 8));
      for (int k = 0; k < words; ++k) {
        if (k) reviews << ' ';
        if (uniform01(rng) < 0.6)
          reviews << kGenreWords[genre[i]][uniform_below(rng, 6)];
        else
          reviews << kCommon[uniform_below(rng, std::size(kCommon))];
      }
      reviews << '\n';
    }
  }
  return 0;
}
