#include "deepspace/ranker.hpp"

#include <functional>

namespace deepspace {

void RankerConfig::validate() const {
  if (phi_i < 1) throw Error("phi_i must be at least 1");
  if (!(phi_d >= 1.0)) throw Error("phi_d must be at least 1");
  if (phi_t && *phi_t == 0) throw Error("phi_t must be positive or 'all'");
  if (!(alpha0 > 0)) throw Error("ranker learning rate must be positive");
}

std::vector<ItemPair> pair_stream(std::span<const PreferenceTriple> triples, int phi_i,
                                  double phi_d, std::uint64_t seed) {
  if (phi_i < 1) throw Error("phi_i must be at least 1");
  if (!(phi_d >= 1.0)) throw Error("phi_d must be at least 1");

  std::vector<ItemId> by_level[3];
  for (const auto& t : triples) {
    if (t.level < 0 || t.level > 2) throw Error("preference level outside {0,1,2}");
    by_level[t.level].push_back(t.item);
  }
  const auto& unrated = by_level[0];
  const auto& low = by_level[1];
  const auto& high = by_level[2];
  const std::size_t rated_pairs = low.size() * high.size();
  const std::size_t mixed_pairs = unrated.size() * (low.size() + high.size());
  if (rated_pairs + mixed_pairs == 0) throw CannotRank("no differently rated item pairs");

  const double keep = 1.0 / phi_d;
  Rng rng(seed ^ 0x5DEECE66DULL);
  std::vector<ItemPair> out;
  out.reserve(static_cast<std::size_t>(phi_i) *
              (rated_pairs + static_cast<std::size_t>(static_cast<double>(mixed_pairs) * keep) + 1));
  std::vector<ItemPair> pass;
  for (int it = 0; it < phi_i; ++it) {
    pass.clear();
    for (const auto a : low)
      for (const auto b : high) pass.push_back({a, b});
    for (const auto& rated : {std::cref(low), std::cref(high)})
      for (const auto b : rated.get())
        for (const auto a : unrated)
          if (keep >= 1.0 || uniform01(rng) < keep) pass.push_back({a, b});
    shuffle(pass.begin(), pass.end(), rng);
    out.insert(out.end(), pass.begin(), pass.end());
  }
  return out;
}

}  // namespace deepspace
