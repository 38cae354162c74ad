#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "treeuniv/embed.hpp"
#include "treeuniv/error.hpp"
#include "treeuniv/expansion.hpp"
#include "treeuniv/games.hpp"
#include "treeuniv/generators.hpp"
#include "treeuniv/graph_io.hpp"
#include "treeuniv/tails.hpp"
#include "treeuniv/trees.hpp"

namespace treeuniv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNegative = 1;
inline constexpr int kExitError = 2;
inline constexpr int kSchemaVersion = 1;

struct Output {
  int code = kExitOk;
  std::string text;  // printed to stdout
};

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline RealParam parse_real(const std::string& s, const std::string& what) {
  const auto r = RealParam::parse(s);
  if (!(r.value() > 0)) throw InputError(what + " must be positive");
  return r;
}

inline nlohmann::json real_json(const RealParam& r) { return r.str(); }

// ---- gen ----------------------------------------------------------------

struct GenArgs {
  GenSpec spec;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "text";
};

inline bool is_stochastic(GenSpec::Kind k) { return k != GenSpec::Kind::Complete; }

inline Output cmd_gen(GenArgs a) {
  if (is_stochastic(a.spec.kind) && !a.seed) throw InputError("--seed is required for generator " + kind_name(a.spec.kind));
  a.spec.seed = a.seed.value_or(0);
  const Graph g = generate(a.spec);
  nlohmann::json prov = to_json(a.spec);
  prov["tool"] = "treeuniv gen";
  const std::string body = a.format == "json" ? write_graph_json(g, prov) : write_graph_text(g, prov);
  Output o;
  if (a.out.empty()) {
    o.text = body;
  } else {
    write_file(a.out, body);
    o.text = dump({{"written", a.out}, {"n", g.order()}, {"m", g.size()}, {"spec", prov}});
  }
  return o;
}

// ---- check --------------------------------------------------------------

struct CheckArgs {
  std::string graph;
  std::string d;
  std::string mode = "exact";
  std::size_t trials = 2000;
  std::optional<std::uint64_t> seed;
  double guard = kDefaultExactGuard;
};

inline Output cmd_check(const CheckArgs& a) {
  const auto d = parse_real(a.d, "d");
  const auto file = load_graph(a.graph);
  ExpanderVerdict v;
  if (a.mode == "exact") {
    v = check_expander_exact(file.graph, d, a.guard);
  } else if (a.mode == "sampled") {
    if (!a.seed) throw InputError("--seed is required in sampled mode");
    v = check_expander_sampled(file.graph, d, a.trials, *a.seed);
  } else {
    throw InputError("mode must be exact or sampled");
  }
  nlohmann::json j{{"schema_version", kSchemaVersion}, {"graph", a.graph}, {"n", file.graph.order()},
                   {"verdict", to_json(v)}};
  if (a.mode == "sampled") j["config"] = {{"trials", a.trials}, {"seed", *a.seed}};
  return {v.failed() ? kExitNegative : kExitOk, dump(j)};
}

// ---- embed --------------------------------------------------------------

struct EmbedArgs {
  std::string graph;
  std::string tree;
  std::string delta;
  std::string d;
  std::optional<std::size_t> tau_path;
  std::optional<std::size_t> tau_leaves;
  std::size_t max_backtracks = EmbedBudget{}.max_backtracks;
  std::size_t max_restarts = EmbedBudget{}.max_restarts;
  std::optional<std::uint64_t> seed;
  bool no_fallback = false;
};

inline Output cmd_embed(const EmbedArgs& a) {
  if (!a.seed) throw InputError("--seed is required for embed");
  const auto delta = parse_real(a.delta, "Delta");
  const auto d = parse_real(a.d, "d");
  const auto host = load_graph(a.graph).graph;
  const auto tree = parse_tree(read_file(a.tree));
  SpanningOptions opts;
  opts.tau_path = a.tau_path;
  opts.tau_leaves = a.tau_leaves;
  opts.budget.max_backtracks = a.max_backtracks;
  opts.budget.max_restarts = a.max_restarts;
  opts.budget.seed = *a.seed;
  opts.allow_fallback = !a.no_fallback;
  nlohmann::json j{{"schema_version", kSchemaVersion},
                   {"host", a.graph},
                   {"tree", a.tree},
                   {"config",
                    {{"delta", real_json(delta)},
                     {"d", real_json(d)},
                     {"seed", *a.seed},
                     {"max_backtracks", a.max_backtracks},
                     {"max_restarts", a.max_restarts},
                     {"fallback", !a.no_fallback}}}};
  try {
    const auto rep = embed_spanning_tree(host, tree, delta, d, opts);
    const bool valid = rep.ok && validate_embedding(rep.embedding, tree.graph(), host);
    auto rj = to_json(rep);
    if (!valid) rj.erase("embedding");
    j["report"] = rj;
    j["ok"] = valid;
    return {valid ? kExitOk : kExitNegative, dump(j)};
  } catch (const NoCaseError& e) {
    j["ok"] = false;
    j["report"] = {{"case", "NoCase"}, {"failed_stage", "classify"}, {"detail", e.what()},
                   {"witness", {{"longest_bare_path", e.longest_path},
                                {"longest_second_level_bare_path", e.longest_second_path},
                                {"leaves", e.leaf_count},
                                {"second_level_leaves", e.second_leaf_count}}}};
    return {kExitNegative, dump(j)};
  }
}

// ---- game ---------------------------------------------------------------

struct GameArgs {
  std::string graph;
  std::string d;
  std::string delta;
  std::size_t b = 1;
  std::string breaker = "random";
  std::string first = "maker";
  std::size_t trials = 1;
  std::size_t trees = 5;
  std::optional<std::uint64_t> seed;
  double family_guard = kDefaultGameGuard;
};

inline Output cmd_game(const GameArgs& a) {
  if (!a.seed) throw InputError("--seed is required for game");
  const auto d = parse_real(a.d, "d");
  const auto host = load_graph(a.graph).graph;
  const auto delta = a.delta.empty() ? RealParam::ratio(static_cast<std::int64_t>(std::max<std::size_t>(host.order(), 2) - 1), 1)
                                     : parse_real(a.delta, "Delta");
  if (a.first != "maker" && a.first != "breaker") throw InputError("--first must be maker or breaker");
  UniversalityOptions opts;
  opts.breaker = strategy_from_name(a.breaker);
  opts.first = a.first == "maker" ? Side::Maker : Side::Breaker;
  opts.family_guard = a.family_guard;
  const Rng base(*a.seed);
  nlohmann::json trials = nlohmann::json::array();
  std::size_t passes = 0;
  std::size_t embedded = 0;
  std::size_t attempted = 0;
  for (std::size_t t = 0; t < a.trials; ++t) {
    const Rng trial = base.split(t);
    std::vector<Tree> trees;
    for (std::size_t i = 0; i < a.trees; ++i) {
      trees.push_back(random_bounded_degree_tree(host.order(), delta, trial.split(1 + i).seed()));
    }
    const auto rep = universality_game(host, delta, d, a.b, trees, trial.split(0).seed(), opts);
    passes += rep.expander_pass() ? 1 : 0;
    embedded += rep.embedded();
    attempted += rep.trees.size();
    auto tj = to_json(rep);
    tj["trial"] = t;
    trials.push_back(tj);
  }
  nlohmann::json j{{"schema_version", kSchemaVersion},
                   {"graph", a.graph},
                   {"config",
                    {{"d", real_json(d)},
                     {"delta", real_json(delta)},
                     {"b", a.b},
                     {"breaker", a.breaker},
                     {"first_mover", a.first},
                     {"trials", a.trials},
                     {"trees_per_trial", a.trees},
                     {"seed", *a.seed}}},
                   {"expander_passes", passes},
                   {"embedding_successes", embedded},
                   {"embedding_attempts", attempted},
                   {"trials", trials}};
  return {passes == a.trials ? kExitOk : kExitNegative, dump(j)};
}

// ---- tailcheck ----------------------------------------------------------

struct TailArgs {
  std::string dist = "binomial";
  std::size_t n = 0;
  double p = 0.5;
  std::size_t m = 0;
  std::size_t l = 0;
  double eps = 0.5;
  std::size_t samples = 100000;
  std::optional<std::uint64_t> seed;
};

inline Output cmd_tailcheck(const TailArgs& a) {
  if (!a.seed) throw InputError("--seed is required for tailcheck");
  TailSpec s;
  if (a.dist == "binomial") {
    s.dist = TailDist::Binomial;
  } else if (a.dist == "hypergeometric") {
    s.dist = TailDist::Hypergeometric;
  } else {
    throw InputError("--dist must be binomial or hypergeometric");
  }
  s.n = a.n;
  s.p = a.p;
  s.marked = a.m;
  s.draws = a.l;
  s.eps = a.eps;
  s.samples = a.samples;
  s.seed = *a.seed;
  const auto r = run_tailcheck(s);
  nlohmann::json j = to_json(r);
  j["schema_version"] = kSchemaVersion;
  j["deviation"] = "relative";
  return {r.violation ? kExitNegative : kExitOk, dump(j)};
}

// ---- experiment ---------------------------------------------------------

enum class TreeSource { EnumerateAll, Sample, AlmostAll };

struct ExperimentConfig {
  std::string name;
  std::optional<GenSpec> gen;
  std::string graph_file;
  RealParam d;
  RealParam delta;
  TreeSource source = TreeSource::Sample;
  std::size_t count = 1;
  std::optional<std::size_t> tau_path;
  std::optional<std::size_t> tau_leaves;
  std::optional<double> multiplier;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  bool allow_fallback = true;
  std::size_t max_backtracks = EmbedBudget{}.max_backtracks;
  std::size_t max_restarts = EmbedBudget{}.max_restarts;
  std::string output;
};

inline RealParam json_real(const nlohmann::json& j, const std::string& what) {
  if (j.is_string()) return parse_real(j.get<std::string>(), what);
  if (j.is_number_integer()) return RealParam::ratio(j.get<std::int64_t>(), 1);
  if (j.is_number()) return parse_real(nlohmann::json(j.get<double>()).dump(), what);
  throw InputError(what + " must be a number or numeric string");
}

// "2 log n / log log n", rounded down, at least 2.
inline RealParam almost_all_delta(std::size_t n) {
  const double ln = std::log(static_cast<double>(n));
  const double v = n < 16 ? 2.0 : std::floor(2 * ln / std::log(ln));
  return RealParam::ratio(static_cast<std::int64_t>(std::max(2.0, v)), 1);
}

inline ExperimentConfig parse_experiment(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    c.name = j.value("name", std::string("experiment"));
    if (!j.contains("seed")) throw InputError("experiment config requires a seed");
    c.seed = j.at("seed").get<std::uint64_t>();
    const auto& host = j.at("host");
    if (host.contains("file")) {
      c.graph_file = host.at("file").get<std::string>();
    } else {
      c.gen = gen_spec_from_json(host);
    }
    c.d = json_real(j.at("d"), "d");
    const auto& trees = j.at("trees");
    const auto src = trees.at("source").get<std::string>();
    if (src == "enumerate_all") {
      c.source = TreeSource::EnumerateAll;
    } else if (src == "sample") {
      c.source = TreeSource::Sample;
    } else if (src == "almost_all") {
      c.source = TreeSource::AlmostAll;
    } else {
      throw InputError("unknown tree source: " + src);
    }
    c.count = trees.value("count", std::size_t{1});
    if (trees.contains("delta")) c.delta = json_real(trees.at("delta"), "Delta");
    if (j.contains("thresholds")) {
      const auto& th = j.at("thresholds");
      if (th.contains("tau_path")) c.tau_path = th.at("tau_path").get<std::size_t>();
      if (th.contains("tau_leaves")) c.tau_leaves = th.at("tau_leaves").get<std::size_t>();
      if (th.contains("multiplier")) c.multiplier = th.at("multiplier").get<double>();
    }
    c.trials = j.value("trials", std::size_t{1});
    c.allow_fallback = j.value("allow_fallback", true);
    if (j.contains("budget")) {
      c.max_backtracks = j.at("budget").value("max_backtracks", c.max_backtracks);
      c.max_restarts = j.at("budget").value("max_restarts", c.max_restarts);
    }
    c.output = j.value("output", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad experiment config: ") + e.what());
  }
  return c;
}

inline std::size_t host_order(const ExperimentConfig& c) {
  if (c.gen) return c.gen->kind == GenSpec::Kind::Doubled ? 2 * load_graph(c.gen->base).graph.order() : c.gen->n;
  return load_graph(c.graph_file).graph.order();
}

inline nlohmann::json resolved_json(const ExperimentConfig& c, std::size_t n, const RealParam& delta,
                                    const CaseThresholds& th) {
  nlohmann::json j;
  j["name"] = c.name;
  j["host"] = c.gen ? to_json(*c.gen) : nlohmann::json{{"file", c.graph_file}};
  j["n"] = n;
  j["d"] = c.d.str();
  j["delta"] = delta.str();
  j["trees"] = {{"source", c.source == TreeSource::EnumerateAll ? "enumerate_all"
                           : c.source == TreeSource::Sample    ? "sample"
                                                               : "almost_all"},
                {"count", c.count}};
  j["thresholds"] = {{"tau_path", th.path}, {"tau_leaves", th.leaves},
                     {"multiplier", c.multiplier ? nlohmann::json(*c.multiplier) : nlohmann::json(nullptr)}};
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["allow_fallback"] = c.allow_fallback;
  j["budget"] = {{"max_backtracks", c.max_backtracks}, {"max_restarts", c.max_restarts}};
  j["output"] = c.output;
  return j;
}

inline std::vector<Vertex> pruefer_of_index(std::size_t n, std::uint64_t index) {
  std::vector<Vertex> seq(n - 2);
  for (std::size_t i = seq.size(); i-- > 0;) {
    seq[i] = static_cast<Vertex>(index % n);
    index /= n;
  }
  return seq;
}

inline std::size_t worker_count() {
  const char* env = std::getenv("TREEUNIV_WORKERS");
  if (env == nullptr) return 1;
  try {
    const long v = std::stol(env);
    return v >= 1 ? static_cast<std::size_t>(v) : 1;
  } catch (const std::exception&) {
    return 1;
  }
}

inline const char* stage_cell(const SpanningReport& r, const std::string& name) {
  const char* cell = "-";
  for (const auto& s : r.stages) {
    if (s.stage == name) cell = s.ok ? "ok" : "fail";
  }
  return cell;
}

inline constexpr const char* kCsvHeader =
    "trial,host_seed,tree_index,tree_seed,n,max_degree,case,partition_verified,forest,hamilton,"
    "second_level_leaves,leaves,fallback,valid,failed_stage";

inline Output cmd_experiment(const std::string& config_path, const std::string& out_override) {
  auto c = parse_experiment(nlohmann::json::parse(read_file(config_path), nullptr, true, true));
  if (!out_override.empty()) c.output = out_override;
  const std::size_t n = host_order(c);
  if (c.source == TreeSource::EnumerateAll && (n < 3 || n > 9)) throw InputError("enumerate_all needs 3 <= n <= 9");
  RealParam delta = c.delta;
  if (c.source == TreeSource::AlmostAll) delta = almost_all_delta(n);
  if (c.source == TreeSource::EnumerateAll && !(delta.value() > 0)) {
    delta = RealParam::ratio(static_cast<std::int64_t>(n - 1), 1);
  }
  if (!(delta.value() > 0)) throw InputError("trees.delta is required for sampled trees");
  auto th = default_thresholds(delta, m_param(n, c.d));
  if (c.multiplier) {
    th.path = static_cast<std::size_t>(std::max(1.0, std::ceil(*c.multiplier * static_cast<double>(th.path))));
    th.leaves = static_cast<std::size_t>(std::max(1.0, std::ceil(*c.multiplier * static_cast<double>(th.leaves))));
  }
  if (c.tau_path) th.path = *c.tau_path;
  if (c.tau_leaves) th.leaves = *c.tau_leaves;

  const Rng base(c.seed);
  std::vector<Graph> hosts;
  std::vector<std::uint64_t> host_seeds;
  for (std::size_t t = 0; t < c.trials; ++t) {
    if (c.gen) {
      GenSpec s = *c.gen;
      s.seed = is_stochastic(s.kind) ? base.split(t).split(0).seed() : 0;
      host_seeds.push_back(s.seed);
      hosts.push_back(generate(s));
    } else {
      host_seeds.push_back(0);
      hosts.push_back(load_graph(c.graph_file).graph);
    }
  }
  std::uint64_t per_trial = c.count;
  if (c.source == TreeSource::EnumerateAll) {
    per_trial = 1;
    for (std::size_t i = 0; i + 2 < n; ++i) per_trial *= n;
  }
  const std::uint64_t jobs = per_trial * c.trials;
  std::vector<std::string> rows(jobs);
  std::vector<std::int64_t> micros(jobs);
  std::vector<char> success(jobs, 0);

  auto run_job = [&](std::uint64_t job) {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t trial = static_cast<std::size_t>(job / per_trial);
    const std::uint64_t idx = job % per_trial;
    const Rng tr = base.split(trial);
    std::uint64_t tree_seed = 0;
    Tree tree;
    if (c.source == TreeSource::EnumerateAll) {
      tree = tree_from_pruefer(pruefer_of_index(n, idx));
    } else {
      tree_seed = tr.split(1 + idx).seed();
      tree = random_bounded_degree_tree(n, delta, tree_seed);
    }
    SpanningOptions opts;
    opts.tau_path = th.path;
    opts.tau_leaves = th.leaves;
    opts.allow_fallback = c.allow_fallback;
    opts.budget.max_backtracks = c.max_backtracks;
    opts.budget.max_restarts = c.max_restarts;
    opts.budget.seed = tr.split(1000000 + idx).seed();
    const auto tree_delta = c.source == TreeSource::EnumerateAll
                                ? RealParam::ratio(static_cast<std::int64_t>(std::max<std::size_t>(tree.max_degree(), 1)), 1)
                                : delta;
    std::ostringstream row;
    row << trial << ',' << host_seeds[trial] << ',' << idx << ',' << tree_seed << ',' << n << ',' << tree.max_degree()
        << ',';
    try {
      const auto rep = embed_spanning_tree(hosts[trial], tree, tree_delta, c.d, opts);
      const bool valid = rep.ok && validate_embedding(rep.embedding, tree.graph(), hosts[trial]);
      success[job] = valid ? 1 : 0;
      row << rep.tree_case << ',' << (rep.partition_verified ? 1 : 0) << ',' << stage_cell(rep, "forest") << ','
          << stage_cell(rep, "hamilton") << ',' << stage_cell(rep, "second_level_leaves") << ','
          << stage_cell(rep, "leaves") << ',' << (rep.used_fallback ? rep.fallback : "-") << ',' << (valid ? 1 : 0)
          << ',' << (valid ? "-" : rep.failed_stage);
    } catch (const NoCaseError&) {
      row << "NoCase,0,-,-,-,-,-,0,classify";
    }
    rows[job] = row.str();
    micros[job] = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start).count();
  };

  const std::size_t workers = std::min<std::uint64_t>(worker_count(), std::max<std::uint64_t>(jobs, 1));
  if (workers <= 1) {
    for (std::uint64_t j = 0; j < jobs; ++j) run_job(j);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    std::mutex error_mutex;
    std::exception_ptr error;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t j = next++; j < jobs; j = next++) {
          try {
            run_job(j);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  std::size_t ok = 0;
  for (char s : success) ok += s ? 1 : 0;
  const auto resolved = resolved_json(c, n, delta, th);
  std::string csv = "# " + resolved.dump() + "\n" + kCsvHeader + "\n";
  for (const auto& r : rows) csv += r + "\n";
  nlohmann::json summary{{"schema_version", kSchemaVersion},
                         {"config", resolved},
                         {"rows", jobs},
                         {"successes", ok},
                         {"success_rate", jobs ? static_cast<double>(ok) / static_cast<double>(jobs) : 0.0}};
  if (!c.output.empty()) {
    const std::filesystem::path out(c.output);
    if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
    write_file(out.string(), csv);
    auto stem = out;
    stem.replace_extension();
    write_file(stem.string() + ".summary.json", dump(summary));
    std::string timing = "trial,tree_index,wall_us\n";
    for (std::uint64_t j = 0; j < jobs; ++j) {
      timing += std::to_string(j / per_trial) + "," + std::to_string(j % per_trial) + "," + std::to_string(micros[j]) + "\n";
    }
    write_file(stem.string() + ".timing.csv", timing);
    summary["csv"] = out.string();
  } else {
    summary["csv_inline"] = csv;
  }
  return {ok == jobs ? kExitOk : kExitNegative, dump(summary)};
}

// ---- entry point --------------------------------------------------------

inline void add_seed(CLI::App* app, std::optional<std::uint64_t>& seed) {
  app->add_option("--seed", seed, "64-bit RNG seed");
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"treeuniv: expanders, spanning trees and Maker-Breaker games"};
  app.require_subcommand(1);

  GenArgs gen;
  std::string gen_kind = "complete";
  auto* g = app.add_subcommand("gen", "generate a graph file");
  g->add_option("--kind", gen_kind, "gnp | regular | locally_sparse | doubled | complete")->required();
  g->add_option("--n", gen.spec.n, "number of vertices");
  g->add_option("--p", gen.spec.p, "edge probability");
  g->add_option("--r", gen.spec.r, "degree for regular graphs");
  g->add_option("--k", gen.spec.k, "set size for locally sparse graphs");
  g->add_option("--l", gen.spec.l, "edge slack for locally sparse graphs");
  g->add_option("--base", gen.spec.base, "base graph file for doubled graphs");
  g->add_option("--out", gen.out, "output path (stdout when omitted)");
  g->add_option("--format", gen.format, "text | json")->check(CLI::IsMember({"text", "json"}));
  add_seed(g, gen.seed);

  CheckArgs check;
  auto* c = app.add_subcommand("check", "check the expander property");
  c->add_option("--graph", check.graph, "graph file")->required();
  c->add_option("--d", check.d, "expansion parameter d")->required();
  c->add_option("--mode", check.mode, "exact | sampled")->check(CLI::IsMember({"exact", "sampled"}));
  c->add_option("--trials", check.trials, "samples per set size in sampled mode");
  c->add_option("--guard", check.guard, "maximum exact work");
  add_seed(c, check.seed);

  EmbedArgs embed;
  auto* e = app.add_subcommand("embed", "embed a spanning tree");
  e->add_option("--graph", embed.graph, "host graph file")->required();
  e->add_option("--tree", embed.tree, "tree file")->required();
  e->add_option("--delta", embed.delta, "maximum degree bound Delta")->required();
  e->add_option("--d", embed.d, "expansion parameter d")->required();
  e->add_option("--tau-path", embed.tau_path, "bare path threshold override");
  e->add_option("--tau-leaves", embed.tau_leaves, "leaf threshold override");
  e->add_option("--max-backtracks", embed.max_backtracks, "backtracking budget per restart");
  e->add_option("--max-restarts", embed.max_restarts, "restart budget");
  e->add_flag("--no-fallback", embed.no_fallback, "disable the whole-tree fallback search");
  add_seed(e, embed.seed);

  GameArgs game;
  auto* gm = app.add_subcommand("game", "play the Maker-Breaker universality game");
  gm->add_option("--graph", game.graph, "board graph file")->required();
  gm->add_option("--d", game.d, "expansion parameter d")->required();
  gm->add_option("--delta", game.delta, "maximum degree of sampled trees (default n-1)");
  gm->add_option("--b", game.b, "Breaker bias");
  gm->add_option("--breaker", game.breaker, "random | greedy | potential")
      ->check(CLI::IsMember({"random", "greedy", "potential"}));
  gm->add_option("--first", game.first, "maker | breaker")->check(CLI::IsMember({"maker", "breaker"}));
  gm->add_option("--trials", game.trials, "number of games");
  gm->add_option("--trees", game.trees, "sampled spanning trees per game");
  gm->add_option("--family-guard", game.family_guard, "largest winning-set family enumerated exactly");
  add_seed(gm, game.seed);

  std::string config;
  std::string exp_out;
  auto* x = app.add_subcommand("experiment", "run a configured experiment");
  x->add_option("--config", config, "experiment config (JSON)")->required();
  x->add_option("--out", exp_out, "CSV output path, overriding the config");

  TailArgs tail;
  auto* tc = app.add_subcommand("tailcheck", "Monte-Carlo check of a concentration bound");
  tc->add_option("--dist", tail.dist, "binomial | hypergeometric")->check(CLI::IsMember({"binomial", "hypergeometric"}));
  tc->add_option("--n", tail.n, "trials (binomial) or population (hypergeometric)")->required();
  tc->add_option("--p", tail.p, "success probability");
  tc->add_option("--m", tail.m, "marked items");
  tc->add_option("--l", tail.l, "draws");
  tc->add_option("--eps", tail.eps, "relative deviation in (0, 3/2]")->required();
  tc->add_option("--samples", tail.samples, "Monte-Carlo samples");
  add_seed(tc, tail.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& pe) {
    if (pe.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << pe.what() << "\n";
    return kExitError;
  }

  try {
    Output o;
    if (g->parsed()) {
      gen.spec.kind = kind_from_name(gen_kind);
      o = cmd_gen(gen);
    } else if (c->parsed()) {
      o = cmd_check(check);
    } else if (e->parsed()) {
      o = cmd_embed(embed);
    } else if (gm->parsed()) {
      o = cmd_game(game);
    } else if (x->parsed()) {
      o = cmd_experiment(config, exp_out);
    } else {
      o = cmd_tailcheck(tail);
    }
    out << o.text;
    return o.code;
  } catch (const InputError& ex) {
    err << "input error: " << ex.what() << "\n";
  } catch (const TooLargeError& ex) {
    err << "error: " << ex.what() << "\n";
  } catch (const BudgetExhausted& ex) {
    err << "error: " << ex.what() << "\n";
  } catch (const nlohmann::json::exception& ex) {
    err << "input error: " << ex.what() << "\n";
  } catch (const std::filesystem::filesystem_error& ex) {
    err << "io error: " << ex.what() << "\n";
  }
  return kExitError;
}

}  // namespace treeuniv::cli
