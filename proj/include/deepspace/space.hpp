#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "deepspace/corpus.hpp"
#include "deepspace/hsoftmax.hpp"
#include "deepspace/real_format.hpp"
#include "deepspace/rng.hpp"
#include "deepspace/types.hpp"

namespace deepspace {

/// How a space was produced. `unknown` marks files without the tag, such as
/// exported vectors.
enum class Provenance { cf, cb, vsm, unknown };

const char* to_string(Provenance p) noexcept;
Provenance parse_provenance(std::string_view text);

/// Item vectors stored as the columns of a dims x items matrix, items in
/// ascending id order.
template <typename Scalar>
class EmbeddingSpace {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  EmbeddingSpace() = default;

  EmbeddingSpace(std::vector<ItemId> items, Matrix vectors, Provenance provenance)
      : items_(std::move(items)), vectors_(std::move(vectors)), provenance_(provenance) {
    if (static_cast<Eigen::Index>(items_.size()) != vectors_.cols())
      throw Error("space has " + std::to_string(items_.size()) + " items but " +
                  std::to_string(vectors_.cols()) + " vectors");
    if (!std::is_sorted(items_.begin(), items_.end())) {
      std::vector<Eigen::Index> order(items_.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
      std::sort(order.begin(), order.end(),
                [this](Eigen::Index a, Eigen::Index b) { return items_[a] < items_[b]; });
      std::vector<ItemId> sorted(items_.size());
      Matrix reordered(vectors_.rows(), vectors_.cols());
      for (std::size_t i = 0; i < order.size(); ++i) {
        sorted[i] = items_[order[i]];
        reordered.col(static_cast<Eigen::Index>(i)) = vectors_.col(order[i]);
      }
      items_ = std::move(sorted);
      vectors_ = std::move(reordered);
    }
    column_.reserve(items_.size());
    for (std::size_t i = 0; i < items_.size(); ++i)
      if (!column_.emplace(items_[i], static_cast<Eigen::Index>(i)).second)
        throw Error("duplicate item " + std::to_string(items_[i]) + " in space");
  }

  Eigen::Index dims() const noexcept { return vectors_.rows(); }
  std::size_t size() const noexcept { return items_.size(); }
  Provenance provenance() const noexcept { return provenance_; }
  const std::vector<ItemId>& items() const noexcept { return items_; }
  const Matrix& vectors() const noexcept { return vectors_; }

  std::optional<Eigen::Index> column(ItemId item) const {
    const auto it = column_.find(item);
    if (it == column_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(ItemId item) const { return column_.count(item) != 0; }

  auto vector(ItemId item) const {
    const auto c = column(item);
    if (!c) throw Error("item " + std::to_string(item) + " is not in the space");
    return vectors_.col(*c);
  }

  friend bool operator==(const EmbeddingSpace& a, const EmbeddingSpace& b) {
    return a.provenance_ == b.provenance_ && a.items_ == b.items_ &&
           a.vectors_.rows() == b.vectors_.rows() && a.vectors_.cols() == b.vectors_.cols() &&
           a.vectors_ == b.vectors_;
  }

 private:
  std::vector<ItemId> items_;
  Matrix vectors_;
  Provenance provenance_ = Provenance::unknown;
  std::unordered_map<ItemId, Eigen::Index> column_;
};

struct SpaceTrainConfig {
  Eigen::Index dims = 1000;
  int iterations = 20;
  double alpha0 = 0.025;
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

/// PV-DBOW with hierarchical softmax: each observation (item, token) is a
/// step that predicts the token from the item vector alone.
///
/// With one worker a fixed seed gives bit-identical spaces. With several,
/// workers update the shared item and node vectors without locks (Hogwild
/// style), so results vary run to run.
template <typename Scalar>
class SpaceTrainer {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  SpaceTrainer(std::span<const Observation> observations, const SpaceTrainConfig& config)
      : config_(config) {
    if (observations.empty()) throw Error("cannot train a space on an empty observation stream");
    if (config.dims <= 0) throw Error("space dimensionality must be positive");
    if (config.iterations < 1) throw Error("iterations must be at least 1");
    if (!(config.alpha0 > 0)) throw Error("learning rate must be positive");
    if (config.workers < 1) throw Error("workers must be at least 1");

    vocab_ = build_vocabulary(observations);
    tree_ = build_huffman(vocab_);

    for (const auto& obs : observations) items_.push_back(obs.item);
    std::sort(items_.begin(), items_.end());
    items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
    std::unordered_map<ItemId, std::uint32_t> column;
    for (std::size_t i = 0; i < items_.size(); ++i)
      column.emplace(items_[i], static_cast<std::uint32_t>(i));

    steps_.reserve(observations.size());
    for (const auto& obs : observations)
      steps_.push_back({column.at(obs.item), static_cast<std::uint32_t>(vocab_.index_of(obs.token))});

    const auto d = config.dims;
    vectors_.resize(d, static_cast<Eigen::Index>(items_.size()));
    Rng rng(config.seed);
    const double half_width = 0.5 / static_cast<double>(d);
    for (Eigen::Index c = 0; c < vectors_.cols(); ++c)
      for (Eigen::Index r = 0; r < d; ++r)
        vectors_(r, c) = static_cast<Scalar>((uniform01(rng) * 2.0 - 1.0) * half_width);
    nodes_ = make_node_matrix<Scalar>(d, tree_);
  }

  /// Runs all configured passes.
  void train() {
    const std::uint64_t total =
        static_cast<std::uint64_t>(config_.iterations) * static_cast<std::uint64_t>(steps_.size());
    std::vector<std::uint32_t> order(steps_.size());
    for (int pass = 0; pass < config_.iterations; ++pass) {
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::uint32_t>(i);
      Rng rng(mix_seed(config_.seed, static_cast<std::uint64_t>(pass) + 1));
      shuffle(order.begin(), order.end(), rng);
      const std::uint64_t base = static_cast<std::uint64_t>(pass) * steps_.size();
      if (config_.workers == 1)
        run_slice(order, base, total, nullptr);
      else
        run_parallel(order, base, total);
    }
  }

  /// Learning rate after `done` of `total` steps: linear decay, floored.
  double learning_rate(std::uint64_t done, std::uint64_t total) const noexcept {
    const double a =
        config_.alpha0 * (1.0 - static_cast<double>(done) / static_cast<double>(total));
    return std::max(a, config_.alpha0 * 1e-4);
  }

  /// Mean -log p(token | item) over the given observations.
  double mean_neg_log_likelihood(std::span<const Observation> observations) const {
    if (observations.empty()) return 0.0;
    double sum = 0;
    for (const auto& obs : observations) {
      const auto col = std::lower_bound(items_.begin(), items_.end(), obs.item) - items_.begin();
      sum += static_cast<double>(
          hs_neg_log_probability(vectors_.col(col), vocab_.index_of(obs.token), tree_, nodes_));
    }
    return sum / static_cast<double>(observations.size());
  }

  const Vocabulary& vocabulary() const noexcept { return vocab_; }
  const HuffmanTree& tree() const noexcept { return tree_; }
  const Matrix& nodes() const noexcept { return nodes_; }
  const Matrix& vectors() const noexcept { return vectors_; }
  const std::vector<ItemId>& items() const noexcept { return items_; }

  EmbeddingSpace<Scalar> space(Provenance provenance) const {
    return EmbeddingSpace<Scalar>(items_, vectors_, provenance);
  }

 private:
  struct Step {
    std::uint32_t column;
    std::uint32_t token;
  };

  static constexpr std::uint64_t kProgressBatch = 10000;

  // Exact per-step schedule when `progress` is null; otherwise the shared
  // counter is refreshed every kProgressBatch steps.
  void run_slice(std::span<const std::uint32_t> order, std::uint64_t base, std::uint64_t total,
                 std::atomic<std::uint64_t>* progress) {
    Vector<Scalar> grad(vectors_.rows());
    std::uint64_t done = base;
    std::uint64_t unreported = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (progress) {
        if (unreported == kProgressBatch) {
          done = progress->fetch_add(unreported) + unreported;
          unreported = 0;
        }
      } else {
        done = base + i;
      }
      const auto& step = steps_[order[i]];
      const auto alpha = static_cast<Scalar>(learning_rate(done + unreported, total));
      hs_train_step<Scalar>(vectors_.col(step.column), step.token, tree_, nodes_, alpha, grad);
      ++unreported;
    }
    if (progress) progress->fetch_add(unreported);
  }

  void run_parallel(std::span<const std::uint32_t> order, std::uint64_t base, std::uint64_t total) {
    std::atomic<std::uint64_t> progress{base};
    std::vector<std::thread> threads;
    const std::size_t n = order.size();
    const std::size_t workers = config_.workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = n * w / workers;
      const std::size_t end = n * (w + 1) / workers;
      threads.emplace_back([this, order, begin, end, base, total, &progress] {
        run_slice(order.subspan(begin, end - begin), base, total, &progress);
      });
    }
    for (auto& t : threads) t.join();
  }

  SpaceTrainConfig config_;
  Vocabulary vocab_;
  HuffmanTree tree_;
  std::vector<ItemId> items_;
  std::vector<Step> steps_;
  Matrix vectors_;
  Matrix nodes_;
};

template <typename Scalar = double>
EmbeddingSpace<Scalar> train_space(std::span<const Observation> observations,
                                   const SpaceTrainConfig& config,
                                   Provenance provenance = Provenance::cf) {
  SpaceTrainer<Scalar> trainer(observations, config);
  trainer.train();
  return trainer.space(provenance);
}

/// One dimension per profiled user (ascending id). An item's coordinate for
/// a user is her binarized rating of it, and the vector is scaled to unit
/// length. Items in `extra_items` without ratings get zero vectors.
template <typename Scalar = double>
EmbeddingSpace<Scalar> build_vsm_space(std::span<const RatingEvent> events,
                                       const ProfileMap& profiles,
                                       std::span<const ItemId> extra_items = {}) {
  std::unordered_map<UserId, Eigen::Index> row;
  for (const auto& [user, profile] : profiles)
    row.emplace(user, static_cast<Eigen::Index>(row.size()));

  std::vector<ItemId> items(extra_items.begin(), extra_items.end());
  for (const auto& ev : events) items.push_back(ev.item);
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());

  using Matrix = typename EmbeddingSpace<Scalar>::Matrix;
  Matrix vectors = Matrix::Zero(static_cast<Eigen::Index>(row.size()),
                                static_cast<Eigen::Index>(items.size()));
  for (const auto& ev : events) {
    const auto r = row.find(ev.user);
    if (r == row.end()) throw NoSuchUser(ev.user);
    const auto c = std::lower_bound(items.begin(), items.end(), ev.item) - items.begin();
    vectors(r->second, c) =
        static_cast<Scalar>(binarize(ev.rating, profiles.at(ev.user).mean_rating));
  }
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    const Scalar norm = vectors.col(c).norm();
    if (norm > Scalar(0)) vectors.col(c) /= norm;
  }
  return EmbeddingSpace<Scalar>(std::move(items), std::move(vectors), Provenance::vsm);
}

namespace detail {

template <typename Scalar>
void write_vector_lines(std::ostream& out, const EmbeddingSpace<Scalar>& space) {
  const auto& vectors = space.vectors();
  for (std::size_t i = 0; i < space.size(); ++i) {
    out << space.items()[i];
    for (Eigen::Index r = 0; r < vectors.rows(); ++r)
      out << ' ' << format_real(vectors(r, static_cast<Eigen::Index>(i)));
    out << '\n';
  }
}

inline std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const auto start = line.find_first_not_of(' ', pos);
    if (start == std::string_view::npos) break;
    const auto end = line.find(' ', start);
    fields.push_back(line.substr(start, end == std::string_view::npos ? end : end - start));
    pos = end == std::string_view::npos ? line.size() : end;
  }
  return fields;
}

std::int64_t parse_count(std::string_view text, const char* what);

}  // namespace detail

/// Header `item_count dims provenance`, then `item_id v_1 ... v_d` per item.
template <typename Scalar>
void write_space(std::ostream& out, const EmbeddingSpace<Scalar>& space) {
  out << space.size() << ' ' << space.dims() << ' ' << to_string(space.provenance()) << '\n';
  detail::write_vector_lines(out, space);
}

/// Header `item_count dims`, then the same data lines as write_space.
template <typename Scalar>
void write_vectors(std::ostream& out, const EmbeddingSpace<Scalar>& space) {
  out << space.size() << ' ' << space.dims() << '\n';
  detail::write_vector_lines(out, space);
}

/// Reads both the space format and the exported-vectors format.
template <typename Scalar = double>
EmbeddingSpace<Scalar> read_space(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("space file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = detail::split_spaces(line);
  if (header.size() != 2 && header.size() != 3)
    throw FormatError("space header must be 'item_count dims [provenance]'");
  const auto count = detail::parse_count(header[0], "item count");
  const auto dims = detail::parse_count(header[1], "dimensionality");
  const Provenance provenance =
      header.size() == 3 ? parse_provenance(header[2]) : Provenance::unknown;

  std::vector<ItemId> items;
  items.reserve(static_cast<std::size_t>(count));
  typename EmbeddingSpace<Scalar>::Matrix vectors(dims, count);
  for (std::int64_t i = 0; i < count; ++i) {
    if (!std::getline(in, line))
      throw FormatError("space file truncated: expected " + std::to_string(count) +
                        " vectors, found " + std::to_string(i));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = detail::split_spaces(line);
    if (static_cast<std::int64_t>(fields.size()) != dims + 1)
      throw FormatError("vector line " + std::to_string(i + 2) + " has " +
                        std::to_string(fields.size() == 0 ? 0 : fields.size() - 1) +
                        " values, expected " + std::to_string(dims));
    items.push_back(detail::parse_count(fields[0], "item id"));
    for (std::int64_t r = 0; r < dims; ++r)
      vectors(r, i) = parse_real<Scalar>(fields[static_cast<std::size_t>(r) + 1]);
  }
  while (std::getline(in, line))
    if (line.find_first_not_of(" \r") != std::string::npos)
      throw FormatError("space file has more vectors than its header declares");
  return EmbeddingSpace<Scalar>(std::move(items), std::move(vectors), provenance);
}

template <typename Scalar>
void save_space(const EmbeddingSpace<Scalar>& space, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_space(out, space);
  if (!out) throw Error("write failed: " + path.string());
}

template <typename Scalar>
void export_vectors(const EmbeddingSpace<Scalar>& space, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_vectors(out, space);
  if (!out) throw Error("write failed: " + path.string());
}

template <typename Scalar = double>
EmbeddingSpace<Scalar> load_space(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_space<Scalar>(in);
}

}  // namespace deepspace
