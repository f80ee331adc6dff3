#pragma once

// Per-user hyperplane ranking over a fixed item space.
//
// The user's rated items are binarized against her mean (1 below, 2 at or
// above) and every unrated item in the space is level 0. A direction w is
// learned from pairs (a, b) with level(a) < level(b):
//
//   g = sigmoid(w.v_a - w.v_b),   w <- w - g*alpha*v_a + g*alpha*v_b
//
// Item vectors are never modified. Items are then ranked by w.v.

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <unordered_set>
#include <vector>

#include "deepspace/corpus.hpp"
#include "deepspace/hsoftmax.hpp"
#include "deepspace/rng.hpp"
#include "deepspace/space.hpp"
#include "deepspace/topk.hpp"
#include "deepspace/types.hpp"

namespace deepspace {

struct RankerConfig {
  int phi_i = 10;                         // passes over the pair set
  std::optional<std::size_t> phi_t = 5;   // most-recent rated items kept; nullopt = all
  double phi_d = 20.0;                    // rated-vs-unrated pairs kept with prob 1/phi_d
  double alpha0 = 0.025;
  std::uint64_t seed = 1;

  void validate() const;
};

struct PreferenceTriple {
  ItemId item = 0;
  int level = 0;  // 0 unrated, 1 below mean, 2 at/above mean
  std::int64_t timestamp = 0;
};

/// Oriented pair: `lower` has the lower preference level.
struct ItemPair {
  ItemId lower = 0;
  ItemId higher = 0;

  friend bool operator==(const ItemPair&, const ItemPair&) = default;
};

template <typename Scalar>
struct HyperplaneModel {
  UserId user = 0;
  Vector<Scalar> w;
};

/// Rated triples for the phi_t most recent of the user's events whose items
/// are in the space (ties by item id), followed by level-0 triples for every
/// space item she has not rated. Older rated items are left out entirely.
/// The binarization mean is taken over all of `user_events`.
template <typename Scalar>
std::vector<PreferenceTriple> build_preferences(std::span<const RatingEvent> user_events,
                                                const EmbeddingSpace<Scalar>& space,
                                                std::optional<std::size_t> phi_t) {
  if (user_events.empty()) throw CannotRank("user has no training ratings");
  const UserId user = user_events.front().user;
  std::int64_t sum = 0;
  for (const auto& ev : user_events) {
    if (ev.user != user) throw Error("build_preferences: events of more than one user");
    sum += ev.rating;
  }
  const double mean = static_cast<double>(sum) / static_cast<double>(user_events.size());

  std::vector<const RatingEvent*> usable;
  for (const auto& ev : user_events)
    if (space.contains(ev.item)) usable.push_back(&ev);
  if (usable.empty())
    throw CannotRank("user " + std::to_string(user) + " has no rated items in the space");
  std::sort(usable.begin(), usable.end(), [](const RatingEvent* a, const RatingEvent* b) {
    return a->timestamp != b->timestamp ? a->timestamp > b->timestamp : a->item > b->item;
  });
  if (phi_t && *phi_t < usable.size()) usable.resize(*phi_t);
  std::reverse(usable.begin(), usable.end());

  std::vector<PreferenceTriple> triples;
  triples.reserve(space.size());
  for (const auto* ev : usable)
    triples.push_back({ev->item, binarize(ev->rating, mean), ev->timestamp});

  std::unordered_set<ItemId> rated;
  for (const auto& ev : user_events) rated.insert(ev.item);
  for (const auto item : space.items())
    if (!rated.count(item)) triples.push_back({item, 0, 0});
  return triples;
}

/// Differently-leveled pairs over phi_i passes. Pairs of two rated items occur
/// in every pass; pairs with one unrated item are drawn independently per pass
/// with probability 1/phi_d. Each pass is shuffled.
std::vector<ItemPair> pair_stream(std::span<const PreferenceTriple> triples, int phi_i,
                                  double phi_d, std::uint64_t seed);

template <typename Scalar>
HyperplaneModel<Scalar> train_hyperplane(std::span<const ItemPair> pairs,
                                         const EmbeddingSpace<Scalar>& space,
                                         const RankerConfig& config, UserId user = 0) {
  config.validate();
  if (pairs.empty()) throw CannotRank("empty pair stream");
  const auto d = space.dims();

  std::vector<std::pair<Eigen::Index, Eigen::Index>> columns;
  columns.reserve(pairs.size());
  for (const auto& p : pairs) {
    const auto a = space.column(p.lower);
    const auto b = space.column(p.higher);
    if (!a || !b) throw Error("pair references an item outside the space");
    columns.emplace_back(*a, *b);
  }

  HyperplaneModel<Scalar> model;
  model.user = user;
  model.w.resize(d);
  Rng rng(config.seed);
  const double half_width = 0.5 / static_cast<double>(d);
  for (Eigen::Index r = 0; r < d; ++r)
    model.w[r] = static_cast<Scalar>((uniform01(rng) * 2.0 - 1.0) * half_width);

  const auto& vectors = space.vectors();
  auto& w = model.w;
  const double total = static_cast<double>(columns.size());
  for (std::size_t t = 0; t < columns.size(); ++t) {
    const auto alpha = static_cast<Scalar>(config.alpha0 * (1.0 - static_cast<double>(t) / total));
    const auto va = vectors.col(columns[t].first);
    const auto vb = vectors.col(columns[t].second);
    const Scalar g = sigmoid<Scalar>(w.dot(va) - w.dot(vb));
    w.noalias() += (g * alpha) * (vb - va);
  }
  return model;
}

/// score(i) = w . v_i, aligned with space.items().
template <typename Scalar>
Vector<Scalar> score_items(const HyperplaneModel<Scalar>& model,
                           const EmbeddingSpace<Scalar>& space) {
  if (model.w.size() != space.dims())
    throw Error("hyperplane has " + std::to_string(model.w.size()) + " dims, space has " +
                std::to_string(space.dims()));
  return space.vectors().transpose() * model.w;
}

template <typename Scalar>
std::vector<ItemId> recommend_topk(const HyperplaneModel<Scalar>& model,
                                   const EmbeddingSpace<Scalar>& space,
                                   const std::unordered_set<ItemId>& exclude, std::size_t k) {
  if (k == 0) throw Error("k must be at least 1");
  const Vector<Scalar> scores = score_items(model, space);
  return top_k<Scalar>(space.items(), std::span<const Scalar>(scores.data(), scores.size()),
                       exclude, k);
}

/// Full per-user pipeline: preferences, pairs, hyperplane.
template <typename Scalar>
HyperplaneModel<Scalar> train_user_ranker(std::span<const RatingEvent> user_events,
                                          const EmbeddingSpace<Scalar>& space,
                                          const RankerConfig& config) {
  config.validate();
  const auto triples = build_preferences(user_events, space, config.phi_t);
  const auto pairs = pair_stream(triples, config.phi_i, config.phi_d, config.seed);
  const UserId user = user_events.front().user;
  return train_hyperplane(std::span<const ItemPair>(pairs), space, config, user);
}

/// `user_id` line, then the d components of w on one line.
template <typename Scalar>
void write_hyperplane(std::ostream& out, const HyperplaneModel<Scalar>& model) {
  out << model.user << '\n';
  for (Eigen::Index r = 0; r < model.w.size(); ++r)
    out << (r ? " " : "") << format_real(model.w[r]);
  out << '\n';
}

}  // namespace deepspace
