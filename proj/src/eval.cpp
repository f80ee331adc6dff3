#include "deepspace/eval.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>

#include "deepspace/real_format.hpp"

namespace deepspace {

double recall_at_k(std::span<const HitRecord> hits) {
  if (hits.empty()) throw Error("recall over an empty target set");
  const auto n = std::count_if(hits.begin(), hits.end(), [](const HitRecord& h) { return h.hit; });
  return static_cast<double>(n) / static_cast<double>(hits.size());
}

double mcnemar_one_tailed(const ContingencyTable& table) {
  const std::uint64_t n = table.n01 + table.n10;
  if (n == 0) throw UndefinedTest("McNemar test needs at least one discordant pair");
  const std::uint64_t lo = table.n10;

  if (n <= 62) {
    // Exact integer tail over 2^n.
    std::uint64_t coeff = 1;  // C(n, i)
    std::uint64_t tail = 0;
    for (std::uint64_t i = 0; i <= n; ++i) {
      if (i >= lo) tail += coeff;
      if (i < n) coeff = coeff / (i + 1) * (n - i) + coeff % (i + 1) * (n - i) / (i + 1);
    }
    return std::ldexp(static_cast<double>(tail), -static_cast<int>(n));
  }

  // log-sum-exp over log C(n, i) - n log 2
  const double dn = static_cast<double>(n);
  const auto log_pmf = [dn](double i) {
    return std::lgamma(dn + 1) - std::lgamma(i + 1) - std::lgamma(dn - i + 1) - dn * std::log(2.0);
  };
  double peak = -INFINITY;
  for (std::uint64_t i = lo; i <= n; ++i) peak = std::max(peak, log_pmf(static_cast<double>(i)));
  double sum = 0;
  for (std::uint64_t i = lo; i <= n; ++i) sum += std::exp(log_pmf(static_cast<double>(i)) - peak);
  return std::min(1.0, std::exp(peak) * sum);
}

ContingencyTable contingency(std::span<const HitRecord> a, std::span<const HitRecord> b) {
  if (a.size() != b.size())
    throw ValidationError("result files cover different numbers of targets (" +
                          std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  ContingencyTable table;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].target != b[i].target)
      throw ValidationError("target " + std::to_string(i + 1) + " differs between result files");
    if (a[i].hit && b[i].hit)
      ++table.n11;
    else if (a[i].hit)
      ++table.n10;
    else if (b[i].hit)
      ++table.n01;
    else
      ++table.n00;
  }
  return table;
}

EvalResult evaluate_system(const Recommender& recommender, std::span<const UserItem> targets,
                           std::span<const RatingEvent> train, std::size_t k, unsigned workers) {
  if (k == 0) throw Error("k must be at least 1");
  std::map<UserId, std::unordered_set<ItemId>> rated;
  for (const auto& ev : train) rated[ev.user].insert(ev.item);

  std::map<UserId, std::vector<std::size_t>> by_user;
  for (std::size_t i = 0; i < targets.size(); ++i) by_user[targets[i].user].push_back(i);
  std::vector<UserId> users;
  for (const auto& [user, list] : by_user) users.push_back(user);

  enum class Outcome : std::uint8_t { miss, hit, skipped, cannot_rank };
  std::vector<Outcome> outcome(targets.size(), Outcome::miss);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto work = [&] {
    for (std::size_t u = next++; u < users.size(); u = next++) {
      const UserId user = users[u];
      const auto& indices = by_user.at(user);
      const auto seen = rated.find(user);
      if (seen == rated.end()) {
        for (const auto i : indices) outcome[i] = Outcome::skipped;
        continue;
      }
      try {
        const auto top = recommender(user, seen->second, k);
        for (const auto i : indices)
          outcome[i] = std::find(top.begin(), top.end(), targets[i].item) != top.end()
                           ? Outcome::hit
                           : Outcome::miss;
      } catch (const CannotRank&) {
        for (const auto i : indices) outcome[i] = Outcome::cannot_rank;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = users.size();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  EvalResult result;
  result.k = k;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    switch (outcome[i]) {
      case Outcome::skipped: ++result.skipped; continue;
      case Outcome::cannot_rank: ++result.cannot_rank; break;
      default: break;
    }
    result.hits.push_back({targets[i], outcome[i] == Outcome::hit});
  }
  if (result.hits.empty()) throw Error("no evaluable targets");
  result.recall = recall_at_k(result.hits);
  return result;
}

void write_results(std::ostream& out, const EvalResult& result) {
  for (const auto& h : result.hits)
    out << h.target.user << '\t' << h.target.item << '\t' << (h.hit ? 1 : 0) << '\n';
  out << "recall@" << result.k << '\t' << format_real(result.recall) << '\n';
}

void save_results(const EvalResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_results(out, result);
  if (!out) throw Error("write failed: " + path.string());
}

EvalResult read_results(std::istream& in) {
  EvalResult result;
  std::string raw;
  std::size_t line_no = 0;
  bool summary = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (summary) throw ParseError(line_no, "content after the recall summary line");
    const auto t1 = line.find('\t');
    if (t1 == std::string_view::npos) throw ParseError(line_no, "expected tab-separated fields");
    if (line.starts_with("recall@")) {
      const auto kf = line.substr(7, t1 - 7);
      if (std::from_chars(kf.data(), kf.data() + kf.size(), result.k).ptr != kf.data() + kf.size())
        throw ParseError(line_no, "bad k in summary");
      result.recall = parse_real<double>(line.substr(t1 + 1));
      summary = true;
      continue;
    }
    const auto t2 = line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos) throw ParseError(line_no, "expected user<TAB>item<TAB>hit");
    HitRecord h;
    const auto u = line.substr(0, t1);
    const auto i = line.substr(t1 + 1, t2 - t1 - 1);
    const auto f = line.substr(t2 + 1);
    if (u.empty() || i.empty() ||
        std::from_chars(u.data(), u.data() + u.size(), h.target.user).ptr != u.data() + u.size() ||
        std::from_chars(i.data(), i.data() + i.size(), h.target.item).ptr != i.data() + i.size())
      throw ParseError(line_no, "bad user or item id");
    if (f != "0" && f != "1") throw ParseError(line_no, "hit flag must be 0 or 1");
    h.hit = f == "1";
    result.hits.push_back(h);
  }
  if (!summary) throw FormatError("results file has no recall summary line");
  return result;
}

EvalResult load_results(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_results(in);
}

}  // namespace deepspace
