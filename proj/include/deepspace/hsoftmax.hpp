#pragma once

// Hierarchical softmax over a Huffman-coded token vocabulary.
//
// Each token is a leaf; the path from the root visits internal nodes, each
// owning a trainable vector (a column of the node matrix). At an internal node
// the branch taken is code bit 0 with probability sigmoid(v . n) and bit 1
// with probability sigmoid(-v . n). The probability of a token is the product
// of branch probabilities along its path.

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "deepspace/corpus.hpp"
#include "deepspace/types.hpp"

namespace deepspace {

/// Dense token index with occurrence counts, ordered by descending count
/// (ties by first appearance).
class Vocabulary {
 public:
  Vocabulary() = default;
  /// Tokens and counts must already be in vocabulary order.
  Vocabulary(std::vector<std::string> tokens, std::vector<std::uint64_t> counts);

  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }
  const std::string& token(std::size_t index) const { return tokens_.at(index); }
  std::uint64_t count(std::size_t index) const { return counts_.at(index); }
  std::span<const std::uint64_t> counts() const noexcept { return counts_; }
  std::optional<std::size_t> find(std::string_view token) const;
  /// Like find(), but throws for unknown tokens.
  std::size_t index_of(std::string_view token) const;

 private:
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, std::size_t> index_;
};

Vocabulary build_vocabulary(std::span<const Observation> observations);

/// Codes and paths run root-first. Internal nodes are numbered by creation
/// order, so the root is internal_count - 1.
struct HuffmanTree {
  std::vector<std::vector<std::uint8_t>> codes;
  std::vector<std::vector<std::uint32_t>> paths;
  std::size_t internal_count = 0;

  std::size_t leaf_count() const noexcept { return codes.size(); }
};

/// Repeatedly merges the two lowest-count nodes (ties by creation index);
/// the first popped becomes the 0 child.
HuffmanTree build_huffman(std::span<const std::uint64_t> counts);
HuffmanTree build_huffman(const Vocabulary& vocab);

template <typename Scalar>
using NodeMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// One zero-initialized column per internal node.
template <typename Scalar>
NodeMatrix<Scalar> make_node_matrix(Eigen::Index dims, const HuffmanTree& tree) {
  return NodeMatrix<Scalar>::Zero(dims, static_cast<Eigen::Index>(tree.internal_count));
}

template <typename Scalar>
inline Scalar sigmoid(Scalar x) {
  return Scalar(1) / (Scalar(1) + std::exp(-x));
}

namespace detail {

inline void check_token(const HuffmanTree& tree, std::size_t token) {
  if (token >= tree.leaf_count())
    throw Error("token index " + std::to_string(token) + " outside vocabulary of " +
                std::to_string(tree.leaf_count()));
}

// log sigmoid(x) without overflow for large |x|.
template <typename Scalar>
Scalar log_sigmoid(Scalar x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

}  // namespace detail

template <typename VecDerived, typename NodeDerived>
typename VecDerived::Scalar hs_probability(const Eigen::MatrixBase<VecDerived>& v,
                                           std::size_t token, const HuffmanTree& tree,
                                           const Eigen::MatrixBase<NodeDerived>& nodes) {
  using Scalar = typename VecDerived::Scalar;
  detail::check_token(tree, token);
  const auto& path = tree.paths[token];
  const auto& code = tree.codes[token];
  Scalar p(1);
  for (std::size_t j = 0; j < path.size(); ++j) {
    const Scalar x = v.dot(nodes.col(path[j]));
    p *= sigmoid(code[j] == 0 ? x : -x);
  }
  return p;
}

/// -log hs_probability, evaluated in log space.
template <typename VecDerived, typename NodeDerived>
typename VecDerived::Scalar hs_neg_log_probability(const Eigen::MatrixBase<VecDerived>& v,
                                                   std::size_t token, const HuffmanTree& tree,
                                                   const Eigen::MatrixBase<NodeDerived>& nodes) {
  using Scalar = typename VecDerived::Scalar;
  detail::check_token(tree, token);
  const auto& path = tree.paths[token];
  const auto& code = tree.codes[token];
  Scalar loss(0);
  for (std::size_t j = 0; j < path.size(); ++j) {
    const Scalar x = v.dot(nodes.col(path[j]));
    loss -= detail::log_sigmoid(code[j] == 0 ? x : -x);
  }
  return loss;
}

/// One SGD step on -log p(token | v). The gradient for v is accumulated into
/// `grad` against the pre-update node vectors, the nodes are moved, and then v.
/// `grad` is scratch space of length dims; reusing it avoids an allocation.
template <typename Scalar>
void hs_train_step(Eigen::Ref<Vector<Scalar>> v, std::size_t token, const HuffmanTree& tree,
                   Eigen::Ref<NodeMatrix<Scalar>> nodes, Scalar alpha,
                   Eigen::Ref<Vector<Scalar>> grad) {
  detail::check_token(tree, token);
  const auto& path = tree.paths[token];
  const auto& code = tree.codes[token];
  grad.setZero();
  for (std::size_t j = 0; j < path.size(); ++j) {
    auto node = nodes.col(path[j]);
    // bit 0 routes positively: target 1
    const Scalar err = sigmoid(v.dot(node)) - Scalar(code[j] == 0 ? 1 : 0);
    grad.noalias() += err * node;
    node.noalias() -= (alpha * err) * v;
  }
  v.noalias() -= alpha * grad;
}

template <typename Scalar>
void hs_train_step(Eigen::Ref<Vector<Scalar>> v, std::size_t token, const HuffmanTree& tree,
                   Eigen::Ref<NodeMatrix<Scalar>> nodes, Scalar alpha) {
  Vector<Scalar> grad(v.size());
  hs_train_step<Scalar>(v, token, tree, nodes, alpha, grad);
}

}  // namespace deepspace
