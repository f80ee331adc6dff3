// deepspace: split, train spaces, recommend, evaluate and compare.
//
// Exit codes: 0 success, 1 usage error, 2 data/format error, 3 cannot rank.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "deepspace/deepspace.hpp"

namespace fs = std::filesystem;
using namespace deepspace;

namespace {

constexpr int kUsage = 1;
constexpr int kData = 2;
constexpr int kCannotRank = 3;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct CorpusArgs {
  std::string ratings;
  std::string split;
  std::string holdout = "test";
  bool dedupe = false;
};

void add_corpus_flags(CLI::App* cmd, CorpusArgs& args, bool with_split = true) {
  cmd->add_option("--ratings", args.ratings, "MovieLens-format ratings file")->required();
  if (with_split) cmd->add_option("--split", args.split, "split export from 'split'")->required();
  cmd->add_flag("--dedupe", args.dedupe, "let repeated (user, item) lines overwrite earlier ones");
}

std::vector<RatingEvent> read_events(const CorpusArgs& args) {
  return load_ratings(args.ratings, args.dedupe ? DuplicatePolicy::last_wins : DuplicatePolicy::reject);
}

struct RankerArgs {
  std::string phi_t = "5";
  double phi_d = 20;
  int phi_i = 10;
  double alpha = 0.025;
};

void add_ranker_flags(CLI::App* cmd, RankerArgs& args) {
  cmd->add_option("--phi-t", args.phi_t, "most recent rated items used, or 'all'")->capture_default_str();
  cmd->add_option("--phi-d", args.phi_d, "downsampling divisor for unrated items")->capture_default_str();
  cmd->add_option("--phi-i", args.phi_i, "passes over the pair set")->capture_default_str();
  cmd->add_option("--alpha", args.alpha, "initial learning rate")->capture_default_str();
}

RankerConfig ranker_config(const RankerArgs& args, std::uint64_t seed) {
  RankerConfig cfg;
  if (args.phi_t == "all") {
    cfg.phi_t = std::nullopt;
  } else {
    try {
      const long long n = std::stoll(args.phi_t);
      if (n <= 0) throw std::invalid_argument("non-positive");
      cfg.phi_t = static_cast<std::size_t>(n);
    } catch (const std::exception&) {
      throw UsageError("--phi-t must be a positive integer or 'all'");
    }
  }
  cfg.phi_d = args.phi_d;
  cfg.phi_i = args.phi_i;
  cfg.alpha0 = args.alpha;
  cfg.seed = seed;
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

nlohmann::ordered_json ranker_json(const RankerConfig& cfg) {
  nlohmann::ordered_json j;
  j["phi_t"] = cfg.phi_t ? nlohmann::ordered_json(*cfg.phi_t) : nlohmann::ordered_json("all");
  j["phi_d"] = cfg.phi_d;
  j["phi_i"] = cfg.phi_i;
  j["alpha"] = cfg.alpha0;
  return j;
}

std::map<UserId, std::vector<RatingEvent>> group_by_user(std::span<const RatingEvent> events) {
  std::map<UserId, std::vector<RatingEvent>> out;
  for (const auto& ev : events) out[ev.user].push_back(ev);
  return out;
}

// ---------------------------------------------------------------- split

struct SplitArgs {
  CorpusArgs corpus;
  std::size_t every = 25;
  std::string out;
};

int run_split(const SplitArgs& args) {
  const auto events = read_events(args.corpus);
  if (args.every == 0) throw UsageError("--every must be positive");
  if (args.every > events.size())
    std::cerr << "warning: --every " << args.every << " exceeds the corpus size ("
              << events.size() << "); validation and test sets are empty\n";

  const auto split = build_split(events, mark_counts(events, args.every));
  fs::create_directories(args.out);
  const fs::path path = fs::path(args.out) / "split.tsv";
  save_split(split, path);

  RunManifest m;
  m.command = "split";
  m.version = tool_version();
  m.parameters["ratings"] = args.corpus.ratings;
  m.parameters["every"] = args.every;
  m.parameters["dedupe"] = args.corpus.dedupe;
  m.add_input(args.corpus.ratings);
  write_manifest(m, path);

  std::cout << "events\t" << events.size() << "\n"
            << "validation\t" << split.validation().size() << "\n"
            << "test\t" << split.test().size() << "\n"
            << "test_targets\t" << test_targets(split, events).size() << "\n"
            << "wrote\t" << path.string() << "\n";
  return 0;
}

// ---------------------------------------------------------- train-space

struct TrainArgs {
  CorpusArgs corpus;
  std::string mode;
  std::string reviews;
  Eigen::Index dims = 1000;
  std::optional<int> iters;
  double alpha = 0.025;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string out;
  bool dims_given = false;
};

int run_train_space(const TrainArgs& args) {
  const Holdout holdout = parse_holdout(args.corpus.holdout);
  if (args.mode != "cf" && args.mode != "cb" && args.mode != "vsm")
    throw UsageError("--mode must be cf, cb or vsm");
  if (args.mode == "cb" && args.reviews.empty()) throw UsageError("--mode cb requires --reviews");
  if (args.mode != "vsm" && args.dims <= 0) throw UsageError("--dims must be positive");

  const auto events = read_events(args.corpus);
  const auto split = load_split(args.corpus.split, events);
  const auto train = training_events(events, split, holdout);
  const auto profiles = build_profiles(train);

  RunManifest m;
  m.command = "train-space";
  m.version = tool_version();
  m.seed = args.seed;
  auto& p = m.parameters;
  p["mode"] = args.mode;
  p["holdout"] = to_string(holdout);
  p["ratings"] = args.corpus.ratings;
  p["split"] = args.corpus.split;
  p["ratings_sha256"] = sha256_file(args.corpus.ratings);
  p["split_sha256"] = sha256_file(args.corpus.split);
  p["dedupe"] = args.corpus.dedupe;
  m.add_input(args.corpus.ratings);
  m.add_input(args.corpus.split);

  EmbeddingSpace<double> space;
  if (args.mode == "vsm") {
    if (args.dims_given)
      std::cerr << "warning: --dims is ignored for --mode vsm (one dimension per user)\n";
    space = build_vsm_space<double>(train, profiles);
    p["dims"] = space.dims();
  } else {
    SpaceTrainConfig cfg;
    cfg.dims = args.dims;
    cfg.iterations = args.iters.value_or(args.mode == "cf" ? 20 : 10);
    cfg.alpha0 = args.alpha;
    cfg.seed = args.seed;
    cfg.workers = args.workers;
    if (cfg.iterations < 1) throw UsageError("--iters must be at least 1");
    if (!(cfg.alpha0 > 0)) throw UsageError("--alpha must be positive");
    if (cfg.workers < 1) throw UsageError("--workers must be at least 1");

    std::vector<Observation> obs;
    if (args.mode == "cf") {
      obs = ratings_to_observations(train, profiles);
    } else {
      obs = reviews_to_observations(load_reviews(args.reviews));
      p["reviews"] = args.reviews;
      m.add_input(args.reviews);
    }
    space = train_space<double>(obs, cfg, args.mode == "cf" ? Provenance::cf : Provenance::cb);
    p["dims"] = cfg.dims;
    p["iters"] = cfg.iterations;
    p["alpha"] = cfg.alpha0;
    p["workers"] = cfg.workers;
    p["observations"] = obs.size();
  }
  p["items"] = space.size();

  save_space(space, args.out);
  write_manifest(m, args.out);
  std::cout << "items\t" << space.size() << "\n"
            << "dims\t" << space.dims() << "\n"
            << "wrote\t" << args.out << "\n";
  return 0;
}

// ------------------------------------------------------------ recommend

struct RecommendArgs {
  CorpusArgs corpus;
  RankerArgs ranker;
  std::string space;
  UserId user = 0;
  std::size_t k = 10;
  std::uint64_t seed = 1;
};

int run_recommend(const RecommendArgs& args) {
  const Holdout holdout = parse_holdout(args.corpus.holdout);
  const auto cfg = ranker_config(args.ranker, args.seed);
  if (args.k == 0) throw UsageError("--k must be at least 1");

  const auto events = read_events(args.corpus);
  const auto split = load_split(args.corpus.split, events);
  const auto train = training_events(events, split, holdout);
  const auto space = load_space<double>(args.space);

  std::vector<RatingEvent> mine;
  std::unordered_set<ItemId> rated;
  for (const auto& ev : train)
    if (ev.user == args.user) {
      mine.push_back(ev);
      rated.insert(ev.item);
    }
  if (mine.empty()) throw CannotRank("user " + std::to_string(args.user) + " has no training ratings");

  const auto model = train_user_ranker(mine, space, cfg);
  const auto scores = score_items(model, space);
  for (const auto item : recommend_topk(model, space, rated, args.k))
    std::cout << item << '\t' << format_real(scores[*space.column(item)]) << '\n';
  return 0;
}

// ------------------------------------------------------------- evaluate

struct EvaluateArgs {
  CorpusArgs corpus;
  RankerArgs ranker;
  std::string system;
  std::string space;
  std::size_t k = 10;
  std::size_t neighbors = 60;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string out;
};

void check_space_provenance(const EvaluateArgs& args, Holdout holdout) {
  const auto m = read_manifest(args.space);
  const auto& p = m.parameters;
  if (m.command != "train-space" || !p.contains("holdout") || !p.contains("split_sha256"))
    throw FormatError("manifest of " + args.space + " does not describe a trained space");
  if (p["holdout"].get<std::string>() != to_string(holdout))
    throw FormatError("space " + args.space + " was trained for holdout '" +
                      p["holdout"].get<std::string>() + "' but evaluation uses '" +
                      to_string(holdout) + "'; retrain with --holdout " + to_string(holdout));
  if (p["split_sha256"].get<std::string>() != sha256_file(args.corpus.split))
    throw FormatError("space " + args.space + " was trained on a different split than " +
                      args.corpus.split);
  if (p.contains("ratings_sha256") &&
      p["ratings_sha256"].get<std::string>() != sha256_file(args.corpus.ratings))
    throw FormatError("space " + args.space + " was trained on a different ratings file than " +
                      args.corpus.ratings);
}

int run_evaluate(const EvaluateArgs& args) {
  const Holdout holdout = parse_holdout(args.corpus.holdout);
  if (args.k == 0) throw UsageError("--k must be at least 1");
  if (args.workers == 0) throw UsageError("--workers must be at least 1");

  const auto events = read_events(args.corpus);
  const auto split = load_split(args.corpus.split, events);
  const auto train = training_events(events, split, holdout);
  const auto targets = holdout_targets(split, events, holdout);

  RunManifest m;
  m.command = "evaluate";
  m.version = tool_version();
  m.seed = args.seed;
  auto& p = m.parameters;
  p["system"] = args.system;
  p["holdout"] = to_string(holdout);
  p["k"] = args.k;
  p["ratings"] = args.corpus.ratings;
  p["split"] = args.corpus.split;
  p["dedupe"] = args.corpus.dedupe;
  p["workers"] = args.workers;
  m.add_input(args.corpus.ratings);
  m.add_input(args.corpus.split);

  EvalResult result;
  if (args.system == "pop") {
    const PopularityModel model(train);
    result = evaluate_system(
        [&](UserId, const std::unordered_set<ItemId>& exclude, std::size_t k) {
          return popularity_topk(model, exclude, k);
        },
        targets, train, args.k, args.workers);
  } else if (args.system == "knn") {
    if (args.neighbors == 0) throw UsageError("--k-neighbors must be at least 1");
    const KnnModel model(train, args.neighbors);
    p["k_neighbors"] = args.neighbors;
    result = evaluate_system(
        [&](UserId user, const std::unordered_set<ItemId>& exclude, std::size_t k) {
          return knn_topk(model, user, exclude, k);
        },
        targets, train, args.k, args.workers);
  } else if (args.system == "ds") {
    if (args.space.empty()) throw UsageError("--system ds requires --space");
    const auto cfg = ranker_config(args.ranker, args.seed);
    check_space_provenance(args, holdout);
    const auto space = load_space<double>(args.space);
    const auto by_user = group_by_user(train);
    p["space"] = args.space;
    p["ranker"] = ranker_json(cfg);
    m.add_input(args.space);
    result = evaluate_system(
        [&](UserId user, const std::unordered_set<ItemId>& exclude, std::size_t k) {
          RankerConfig user_cfg = cfg;
          user_cfg.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(user));
          const auto model = train_user_ranker(by_user.at(user), space, user_cfg);
          return recommend_topk(model, space, exclude, k);
        },
        targets, train, args.k, args.workers);
  } else {
    throw UsageError("--system must be ds, pop or knn");
  }

  p["targets"] = result.hits.size();
  p["skipped"] = result.skipped;
  p["cannot_rank"] = result.cannot_rank;
  save_results(result, args.out);
  write_manifest(m, args.out);

  std::cout << "recall@" << args.k << '\t' << format_real(result.recall) << "\n"
            << "targets\t" << result.hits.size() << "\n"
            << "skipped\t" << result.skipped << "\n"
            << "cannot_rank\t" << result.cannot_rank << "\n";
  if (result.skipped)
    std::cerr << "warning: " << result.skipped << " target(s) skipped: user has no training ratings\n";
  return 0;
}

// -------------------------------------------------------------- mcnemar

int run_mcnemar(const std::string& a_path, const std::string& b_path) {
  const auto a = load_results(a_path);
  const auto b = load_results(b_path);
  const auto table = contingency(a.hits, b.hits);
  std::cout << "n11\t" << table.n11 << "\n"
            << "n10\t" << table.n10 << "\n"
            << "n01\t" << table.n01 << "\n"
            << "n00\t" << table.n00 << "\n";
  const double a_over_b = mcnemar_one_tailed(table);
  const double b_over_a = mcnemar_one_tailed({table.n00, table.n10, table.n01, table.n11});
  std::cout << "p(A>B)\t" << format_real(a_over_b) << "\n"
            << "p(B>A)\t" << format_real(b_over_a) << "\n";
  return 0;
}

// --------------------------------------------------------------- export

int run_export(const std::string& space_path, const std::string& out) {
  export_vectors(load_space<double>(space_path), out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic item spaces and per-user hyperplane ranking"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tool_version()));

  SplitArgs split_args;
  auto* split = app.add_subcommand("split", "sample validation/test sets");
  add_corpus_flags(split, split_args.corpus, false);
  split->add_option("--every", split_args.every, "mark every n-th rating")->capture_default_str();
  split->add_option("--out", split_args.out, "output directory")->required();

  TrainArgs train_args;
  auto* train = app.add_subcommand("train-space", "learn or build an item space");
  add_corpus_flags(train, train_args.corpus);
  train->add_option("--mode", train_args.mode, "cf, cb or vsm")->required();
  train->add_option("--reviews", train_args.reviews, "item_id<TAB>text review file (cb)");
  train->add_option("--holdout", train_args.corpus.holdout, "test or validation")->capture_default_str();
  auto* dims_opt = train->add_option("--dims", train_args.dims, "dimensionality")->capture_default_str();
  train->add_option("--iters", train_args.iters, "passes (default 20 cf, 10 cb)");
  train->add_option("--alpha", train_args.alpha, "initial learning rate")->capture_default_str();
  train->add_option("--seed", train_args.seed)->capture_default_str();
  train->add_option("--workers", train_args.workers)->capture_default_str();
  train->add_option("--out", train_args.out, "space file to write")->required();

  RecommendArgs rec_args;
  auto* rec = app.add_subcommand("recommend", "top-k items for one user");
  add_corpus_flags(rec, rec_args.corpus);
  add_ranker_flags(rec, rec_args.ranker);
  rec->add_option("--space", rec_args.space)->required();
  rec->add_option("--user", rec_args.user)->required();
  rec->add_option("--holdout", rec_args.corpus.holdout, "test or validation")->capture_default_str();
  rec->add_option("--k", rec_args.k)->capture_default_str();
  rec->add_option("--seed", rec_args.seed)->capture_default_str();

  EvaluateArgs eval_args;
  auto* eval = app.add_subcommand("evaluate", "Recall@k over held-out liked items");
  add_corpus_flags(eval, eval_args.corpus);
  add_ranker_flags(eval, eval_args.ranker);
  eval->add_option("--system", eval_args.system, "ds, pop or knn")->required();
  eval->add_option("--space", eval_args.space, "space file (ds)");
  eval->add_option("--holdout", eval_args.corpus.holdout, "test or validation")->capture_default_str();
  eval->add_option("--k", eval_args.k)->capture_default_str();
  eval->add_option("--k-neighbors", eval_args.neighbors, "UserKNN neighborhood")->capture_default_str();
  eval->add_option("--seed", eval_args.seed)->capture_default_str();
  eval->add_option("--workers", eval_args.workers)->capture_default_str();
  eval->add_option("--out", eval_args.out, "results file to write")->required();

  std::string result_a, result_b;
  auto* mcnemar = app.add_subcommand("mcnemar", "paired one-tailed McNemar test");
  mcnemar->add_option("RESULTS_A", result_a)->required();
  mcnemar->add_option("RESULTS_B", result_b)->required();

  std::string export_space, export_out;
  auto* exp = app.add_subcommand("export", "write vectors for external projection tools");
  exp->add_option("--space", export_space)->required();
  exp->add_option("--out", export_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }
  train_args.dims_given = dims_opt->count() > 0;

  try {
    if (*split) return run_split(split_args);
    if (*train) return run_train_space(train_args);
    if (*rec) return run_recommend(rec_args);
    if (*eval) return run_evaluate(eval_args);
    if (*mcnemar) return run_mcnemar(result_a, result_b);
    if (*exp) return run_export(export_space, export_out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const CannotRank& e) {
    std::cerr << "cannot rank: " << e.what() << "\n";
    return kCannotRank;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}
