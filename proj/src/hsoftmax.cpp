#include "deepspace/hsoftmax.hpp"

#include <algorithm>
#include <queue>
#include <tuple>

namespace deepspace {

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::vector<std::uint64_t> counts)
    : tokens_(std::move(tokens)), counts_(std::move(counts)) {
  if (tokens_.size() != counts_.size()) throw Error("vocabulary tokens/counts size mismatch");
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (counts_[i] == 0) throw Error("vocabulary token '" + tokens_[i] + "' has count 0");
    if (!index_.emplace(tokens_[i], i).second)
      throw Error("duplicate vocabulary token '" + tokens_[i] + "'");
  }
}

std::optional<std::size_t> Vocabulary::find(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Vocabulary::index_of(std::string_view token) const {
  if (const auto i = find(token)) return *i;
  throw Error("unknown token '" + std::string(token) + "'");
}

Vocabulary build_vocabulary(std::span<const Observation> observations) {
  std::vector<std::string> first_seen;
  std::vector<std::uint64_t> counts;
  std::unordered_map<std::string_view, std::size_t> index;
  for (const auto& obs : observations) {
    const auto [it, inserted] = index.try_emplace(obs.token, first_seen.size());
    if (inserted) {
      first_seen.push_back(obs.token);
      counts.push_back(0);
    }
    ++counts[it->second];
  }

  std::vector<std::size_t> order(first_seen.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });

  std::vector<std::string> tokens;
  std::vector<std::uint64_t> sorted_counts;
  tokens.reserve(order.size());
  sorted_counts.reserve(order.size());
  for (const auto i : order) {
    tokens.push_back(std::move(first_seen[i]));
    sorted_counts.push_back(counts[i]);
  }
  return Vocabulary(std::move(tokens), std::move(sorted_counts));
}

HuffmanTree build_huffman(std::span<const std::uint64_t> counts) {
  const std::size_t leaves = counts.size();
  if (leaves == 0) throw Error("cannot build a Huffman tree over an empty vocabulary");

  // Nodes 0..leaves-1 are leaves, leaves.. are internal in creation order.
  const std::size_t total = 2 * leaves - 1;
  std::vector<std::size_t> parent(total, 0);
  std::vector<std::uint8_t> bit(total, 0);

  using Entry = std::pair<std::uint64_t, std::size_t>;  // (count, node)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (std::size_t i = 0; i < leaves; ++i) heap.emplace(counts[i], i);

  for (std::size_t next = leaves; next < total; ++next) {
    const auto [c0, n0] = heap.top();
    heap.pop();
    const auto [c1, n1] = heap.top();
    heap.pop();
    parent[n0] = parent[n1] = next;
    bit[n0] = 0;
    bit[n1] = 1;
    heap.emplace(c0 + c1, next);
  }

  HuffmanTree tree;
  tree.internal_count = leaves - 1;
  tree.codes.resize(leaves);
  tree.paths.resize(leaves);
  const std::size_t root = total - 1;
  for (std::size_t leaf = 0; leaf < leaves; ++leaf) {
    auto& code = tree.codes[leaf];
    auto& path = tree.paths[leaf];
    for (std::size_t node = leaf; node != root; node = parent[node]) {
      code.push_back(bit[node]);
      path.push_back(static_cast<std::uint32_t>(parent[node] - leaves));
    }
    std::reverse(code.begin(), code.end());
    std::reverse(path.begin(), path.end());
  }
  return tree;
}

HuffmanTree build_huffman(const Vocabulary& vocab) { return build_huffman(vocab.counts()); }

}  // namespace deepspace
