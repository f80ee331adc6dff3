#pragma once

// Independent reference computations for the tests. Nothing here calls the
// code paths it is used to check.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

/// Minimum sum(count_i * len_i) over all prefix-free binary codes, by
/// enumerating code-length vectors that satisfy Kraft's inequality. Lengths
/// are assigned nondecreasing against counts sorted descending, which loses
/// no optimum (swapping lengths between a more and a less frequent symbol
/// never helps).
inline std::uint64_t min_prefix_code_cost(std::vector<std::uint64_t> counts) {
  const std::size_t n = counts.size();
  if (n <= 1) return 0;
  std::sort(counts.rbegin(), counts.rend());
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  std::vector<int> len(n);
  // kraft is measured in units of 2^-max_len
  const int max_len = static_cast<int>(n) - 1;
  const std::uint64_t one = std::uint64_t{1} << max_len;
  std::function<void(std::size_t, int, std::uint64_t, std::uint64_t)> rec =
      [&](std::size_t i, int min_len, std::uint64_t kraft, std::uint64_t cost) {
        if (cost >= best) return;
        if (i == n) {
          best = cost;
          return;
        }
        for (int l = min_len; l <= max_len; ++l) {
          const std::uint64_t k = kraft + (one >> l);
          if (k > one) continue;
          rec(i + 1, l, k, cost + counts[i] * static_cast<std::uint64_t>(l));
        }
      };
  rec(0, 1, 0, 0);
  return best;
}

/// P(#A-wins >= n10) by enumerating all 2^n outcome assignments of the n
/// discordant targets, each equally likely under the null.
inline double mcnemar_brute_force(unsigned n10, unsigned n01) {
  const unsigned n = n10 + n01;
  std::uint64_t favourable = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask)
    if (static_cast<unsigned>(__builtin_popcountll(mask)) >= n10) ++favourable;
  return static_cast<double>(favourable) / static_cast<double>(std::uint64_t{1} << n);
}

/// Central-difference gradient of f at x.
inline Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

/// -log of the hierarchical-softmax probability written out directly from
/// a root-first code and path: product of sigmoid(+x) for bit 0 and
/// sigmoid(-x) for bit 1.
inline double hs_loss(const Eigen::VectorXd& v, const Eigen::MatrixXd& nodes,
                      const std::vector<std::uint8_t>& code, const std::vector<std::uint32_t>& path) {
  double loss = 0;
  for (std::size_t j = 0; j < path.size(); ++j) {
    const double x = v.dot(nodes.col(path[j]));
    const double s = code[j] == 0 ? x : -x;
    loss += std::log1p(std::exp(-s));
  }
  return loss;
}

inline double binomial_tail_exact(unsigned n, unsigned k) {
  // sum_{i>=k} C(n,i) / 2^n with C computed by Pascal's triangle in doubles
  std::vector<double> row{1.0};
  for (unsigned r = 1; r <= n; ++r) {
    std::vector<double> next(r + 1, 1.0);
    for (unsigned i = 1; i < r; ++i) next[i] = row[i - 1] + row[i];
    row = std::move(next);
  }
  double s = 0;
  for (unsigned i = k; i <= n; ++i) s += row[i];
  return std::ldexp(s, -static_cast<int>(n));
}

}  // namespace oracle
