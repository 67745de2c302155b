// fairtopk: command-line front end for fair top-k ranking.
//
// Exit codes: 0 ok, 1 unfair/infeasible verdict, 2 usage error, 3 data error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "fairtopk/adjustment.hpp"
#include "fairtopk/baselines.hpp"
#include "fairtopk/csv.hpp"
#include "fairtopk/experiment.hpp"
#include "fairtopk/fair_ranker.hpp"
#include "fairtopk/fairness_test.hpp"
#include "fairtopk/metrics.hpp"

namespace {

using namespace fairtopk;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitVerdict = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

const char* const kExitCodeHelp =
    "Exit codes: 0 ok, 1 unfair or infeasible verdict, 2 usage error, 3 data error.";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// Rounded to six decimals so JSON matches the CSV rendering.
double round6(double v) { return std::stod(fixed6(v)); }

std::optional<std::filesystem::path> cache_directory() {
  if (const char* dir = std::getenv("FAIR_TOPK_CACHE_DIR"); dir && *dir) return std::filesystem::path(dir);
  if (const char* home = std::getenv("HOME"); home && *home) {
    return std::filesystem::path(home) / ".cache" / "fair_topk";
  }
  return std::nullopt;
}

AdjustmentCache& adjustment_cache() {
  static AdjustmentCache cache(cache_directory());
  return cache;
}

MTableCache& mtable_cache() {
  static MTableCache cache(cache_directory());
  return cache;
}

void print_json(const ordered_json& j) { std::cout << j.dump(2) << '\n'; }

ordered_json adjustment_json(const AdjustmentResult& r) {
  return {{"k", r.k},
          {"p", round6(r.p)},
          {"alpha", round6(r.alpha_target)},
          {"alpha_adj", round6(r.alpha_adj)},
          {"achieved_rejection", round6(r.achieved_rejection)},
          {"feasible", r.feasible}};
}

void warn_infeasible(const AdjustmentResult& r) {
  std::cerr << "fairtopk: no alpha_adj reaches rejection " << fixed6(r.alpha_target) << " for k=" << r.k
            << ", p=" << fixed6(r.p) << "; closest conservative value " << fixed6(r.alpha_adj)
            << " gives " << fixed6(r.achieved_rejection) << '\n';
}

void check_unit(const char* name, double v) {
  if (!(v > 0.0 && v < 1.0)) throw UsageError(std::string("--") + name + " must lie in (0, 1)");
}

struct ColumnOptions {
  std::string id = "id";
  std::string score = "score";
  std::string protected_column = "protected";
  std::string protected_value = "1";
  bool lower_is_better = false;

  void attach(CLI::App* cmd, bool with_score_direction) {
    cmd->add_option("--id-column", id, "Candidate id column (row number if absent)")->capture_default_str();
    cmd->add_option("--score-column", score, "Score column")->capture_default_str();
    cmd->add_option("--protected-column", protected_column, "Group membership column")->capture_default_str();
    cmd->add_option("--protected-value", protected_value, "Value marking the protected group")
        ->capture_default_str();
    if (with_score_direction) cmd->add_flag("--lower-is-better", lower_is_better, "Negate scores before ranking");
  }

  DatasetSpec spec(const std::string& path) const {
    DatasetSpec s;
    s.path = path;
    s.id_column = id;
    s.score_column = score;
    s.protected_column = protected_column;
    s.protected_value = protected_value;
    s.higher_is_better = !lower_is_better;
    return s;
  }
};

template <class Fn>
auto with_input(const std::string& path, Fn&& fn) {
  if (path == "-") return fn(std::cin);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open '" + path + "'");
  return fn(in);
}

// mtable ---------------------------------------------------------------------

struct MTableArgs {
  int k = 0;
  double p = 0, alpha = 0.1;
  bool adjust = false, json = false;
};

int cmd_mtable(const MTableArgs& a) {
  check_unit("p", a.p);
  check_unit("alpha", a.alpha);
  if (a.k < 1) throw UsageError("--k must be >= 1");
  std::optional<AdjustmentResult> adj;
  double alpha_adj = a.alpha;
  if (a.adjust) {
    adj = adjustment_cache().get(a.k, a.p, a.alpha);
    alpha_adj = adj->alpha_adj;
  }
  const auto table = mtable_cache().get(a.k, a.p, alpha_adj);
  if (a.json) {
    ordered_json j{{"k", a.k}, {"p", round6(a.p)}, {"alpha", round6(a.alpha)}, {"alpha_adj", round6(alpha_adj)}};
    if (adj) j["feasible"] = adj->feasible;
    j["minima"] = std::vector<int>(table->minima().begin(), table->minima().end());
    print_json(j);
  } else {
    write_mtable_csv(std::cout, *table);
  }
  if (adj && !adj->feasible) {
    warn_infeasible(*adj);
    return kExitVerdict;
  }
  return kExitOk;
}

// adjust ---------------------------------------------------------------------

struct AdjustArgs {
  int k = 0;
  double p = 0, alpha = 0.1;
  bool json = false;
};

int cmd_adjust(const AdjustArgs& a) {
  check_unit("p", a.p);
  check_unit("alpha", a.alpha);
  if (a.k < 1) throw UsageError("--k must be >= 1");
  const AdjustmentResult r = adjustment_cache().get(a.k, a.p, a.alpha);
  if (a.json) {
    print_json(adjustment_json(r));
  } else {
    std::cout << "k,p,alpha,alpha_adj,achieved_rejection,feasible\n"
              << r.k << ',' << fixed6(r.p) << ',' << fixed6(r.alpha_target) << ',' << fixed6(r.alpha_adj)
              << ',' << fixed6(r.achieved_rejection) << ',' << (r.feasible ? "true" : "false") << '\n';
  }
  if (!r.feasible) {
    warn_infeasible(r);
    return kExitVerdict;
  }
  return kExitOk;
}

// verify ---------------------------------------------------------------------

struct VerifyArgs {
  std::string input;
  double p = 0, alpha = 0.1;
  bool raw = false, adjusted = false, strict = false, json = false;
  ColumnOptions columns;
};

int cmd_verify(const VerifyArgs& a) {
  check_unit("p", a.p);
  check_unit("alpha", a.alpha);
  if (a.raw && a.adjusted) throw UsageError("--raw and --adjusted are mutually exclusive");
  const DatasetSpec spec = a.columns.spec(a.input);
  const RankedSequence ranking = with_input(a.input, [&](std::istream& in) { return load_ranking(in, spec); });
  const int k = static_cast<int>(ranking.size());

  std::optional<AdjustmentResult> adj;
  double alpha_adj = a.alpha;
  if (!a.raw) {
    adj = adjustment_cache().get(k, a.p, a.alpha);
    alpha_adj = adj->alpha_adj;
    if (!adj->feasible) warn_infeasible(*adj);
  }
  const auto table = mtable_cache().get(k, a.p, alpha_adj);
  const FairnessVerdict v = verify_ranked_group_fairness(ranking, *table);
  int protected_count = 0;
  for (const auto& e : ranking) protected_count += e.is_protected ? 1 : 0;

  if (a.json) {
    ordered_json j{{"k", k},
                   {"p", round6(a.p)},
                   {"alpha", round6(a.alpha)},
                   {"alpha_adj", round6(alpha_adj)},
                   {"fair", v.fair},
                   {"protected", protected_count}};
    if (adj) j["adjustment_feasible"] = adj->feasible;
    if (!v.fair) {
      j["first_violation"] = v.first_violation;
      j["required"] = v.required;
      j["observed"] = v.observed;
      j["deficit"] = v.deficit();
    }
    print_json(j);
  } else {
    std::cout << "k,p,alpha_adj,fair,first_violation,required,observed,deficit\n"
              << k << ',' << fixed6(a.p) << ',' << fixed6(alpha_adj) << ',' << (v.fair ? "true" : "false") << ','
              << v.first_violation << ',' << v.required << ',' << v.observed << ',' << v.deficit() << '\n';
  }
  if (!v.fair) {
    std::cerr << "fairtopk: unfair at prefix " << v.first_violation << ": " << v.observed
              << " protected, at least " << v.required << " required\n";
    if (a.strict) return kExitVerdict;
  }
  return kExitOk;
}

// rank -----------------------------------------------------------------------

struct RankArgs {
  std::string input, method = "fair";
  int k = 0;
  double p = 0, alpha = 0.1;
  std::uint64_t seed = 0;
  bool raw = false, strict = false, json = false;
  ColumnOptions columns;
};

int cmd_rank(const RankArgs& a) {
  if (a.k < 1) throw UsageError("--k must be >= 1");
  const DatasetSpec spec = a.columns.spec(a.input);
  const CandidatePool pool = with_input(a.input, [&](std::istream& in) { return load_candidates(in, spec); });
  if (static_cast<std::size_t>(a.k) > pool.size()) {
    throw UsageError("--k " + std::to_string(a.k) + " exceeds pool size " + std::to_string(pool.size()));
  }

  RankedSequence ranking;
  std::optional<FairRanking> fair;
  std::optional<AdjustmentResult> adj;
  double alpha_adj = a.alpha;
  if (a.method == "fair") {
    check_unit("p", a.p);
    check_unit("alpha", a.alpha);
    if (!a.raw) {
      adj = adjustment_cache().get(a.k, a.p, a.alpha);
      alpha_adj = adj->alpha_adj;
      if (!adj->feasible) warn_infeasible(*adj);
    }
    const auto table = mtable_cache().get(a.k, a.p, alpha_adj);
    try {
      fair = fair_topk(pool, *table, FairRankingOptions{a.strict});
    } catch (const InsufficientProtectedError& e) {
      std::cerr << "fairtopk: " << e.what() << '\n';
      return kExitVerdict;
    }
    ranking = fair->entries;
    if (!fair->fully_satisfied()) {
      std::cerr << "fairtopk: protected candidates exhausted; ranking meets the table only up to prefix "
                << fair->satisfied_up_to << '\n';
    }
  } else if (a.method == "colorblind") {
    ranking = color_blind_topk(pool, a.k);
  } else {
    if (pool.protected_count() == 0 || pool.protected_count() == pool.size()) {
      throw LoadError("feldman repair needs both groups in the pool");
    }
    ranking = color_blind_topk(feldman_repair(pool).pool, a.k);
  }
  // Report original scores, whatever ordered the ranking.
  for (auto& e : ranking) {
    e.score = pool[*pool.index_of(e.id)].score;
    if (a.columns.lower_is_better) e.score = -e.score;
  }

  if (a.json) {
    ordered_json j{{"method", a.method}, {"k", a.k}};
    if (a.method == "fair") {
      j["p"] = round6(a.p);
      j["alpha_adj"] = round6(alpha_adj);
      j["satisfied_up_to"] = fair->satisfied_up_to;
    }
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < ranking.size(); ++i) {
      rows.push_back({{"rank", i + 1}, {"id", ranking[i].id}, {"score", ranking[i].score},
                      {"protected", ranking[i].is_protected}});
    }
    j["ranking"] = std::move(rows);
    print_json(j);
  } else {
    std::cout << "rank,id,score,protected\n";
    for (std::size_t i = 0; i < ranking.size(); ++i) {
      write_csv_row(std::cout, {std::to_string(i + 1), ranking[i].id, format_real(ranking[i].score),
                                ranking[i].is_protected ? "1" : "0"});
    }
  }
  return kExitOk;
}

// simulate -------------------------------------------------------------------

struct SimulateArgs {
  int k = 0;
  double p = 0, alpha_adj = 0;
  std::optional<double> p_test;
  std::int64_t trials = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool json = false;
};

int cmd_simulate(const SimulateArgs& a) {
  if (a.k < 1) throw UsageError("--k must be >= 1");
  if (a.trials < 1) throw UsageError("--trials must be >= 1");
  check_unit("p", a.p);
  check_unit("alpha-adj", a.alpha_adj);
  const double p_test = a.p_test.value_or(a.p);
  check_unit("p-test", p_test);
  const SimulationResult r = simulate_rejection_rate(a.k, a.p, p_test, a.alpha_adj, a.trials, a.seed, a.threads);
  if (a.json) {
    print_json({{"k", a.k},
                {"p", round6(a.p)},
                {"p_test", round6(p_test)},
                {"alpha_adj", round6(a.alpha_adj)},
                {"trials", r.trials},
                {"rejections", r.rejections},
                {"rejection_rate", round6(r.rate)},
                {"stderr", round6(r.std_error)}});
  } else {
    std::cout << "k,p,p_test,alpha_adj,trials,rejections,rejection_rate,stderr\n"
              << a.k << ',' << fixed6(a.p) << ',' << fixed6(p_test) << ',' << fixed6(a.alpha_adj) << ','
              << r.trials << ',' << r.rejections << ',' << fixed6(r.rate) << ',' << fixed6(r.std_error) << '\n';
  }
  return kExitOk;
}

// experiment / curve / prepare -----------------------------------------------

struct ExperimentArgs {
  std::string config;
  unsigned threads = 1;
  bool json = false;
};

int cmd_experiment(const ExperimentArgs& a) {
  const DatasetSpec spec = load_dataset_spec(a.config);
  const ExperimentReport report = run_experiment(spec, &adjustment_cache(), a.threads);
  if (a.json) {
    ordered_json rows = ordered_json::array();
    for (const auto& row : report.rows) {
      const auto& r = row.report;
      rows.push_back({{"dataset", row.dataset},
                      {"method", row.method},
                      {"p", round6(row.p)},
                      {"alpha_adj", round6(row.alpha_adj)},
                      {"adjustment_feasible", row.adjustment_feasible},
                      {"pct_protected_output", round6(100.0 * r.protected_share)},
                      {"ndcg", round6(r.ndcg)},
                      {"ordering_utility_loss", round6(r.ordering_utility_loss)},
                      {"rank_drop", r.max_rank_drop},
                      {"selection_utility_loss", round6(r.selection_utility_loss)}});
    }
    print_json(rows);
  } else {
    write_report_csv(std::cout, report);
  }
  return kExitOk;
}

struct CurveArgs {
  int k = 0;
  std::string p_grid, alpha_grid;
  std::int64_t trials = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

int cmd_curve(const CurveArgs& a) {
  if (a.k < 1) throw UsageError("--k must be >= 1");
  const auto ps = parse_real_list(a.p_grid);
  const auto alphas = parse_real_list(a.alpha_grid);
  for (double p : ps) check_unit("p-grid", p);
  for (double x : alphas) check_unit("alpha-adj-grid", x);
  write_curve_csv(std::cout, emit_curve_data(a.k, ps, alphas, a.trials, a.seed, a.threads));
  return kExitOk;
}

struct PrepareArgs {
  std::string input, output;
  XingColumns xing;
};

template <class Fn>
int with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return kExitOk;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write '" + path + "'");
  fn(out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fair top-k ranking: ranked group fairness tests, adjusted significance, fair re-ranking "
               "and utility metrics."};
  app.footer(std::string(kExitCodeHelp) +
             "\nFAIR_TOPK_CACHE_DIR sets the mtable/adjustment cache directory (default ~/.cache/fair_topk).");
  app.require_subcommand(1);

  MTableArgs mt;
  auto* mtable = app.add_subcommand("mtable", "Print minimum protected counts for prefixes 1..k");
  mtable->add_option("--k", mt.k, "Ranking length")->required();
  mtable->add_option("--p", mt.p, "Target minimum protected proportion")->required();
  mtable->add_option("--alpha", mt.alpha, "Significance (per prefix unless --adjust)")->capture_default_str();
  mtable->add_flag("--adjust", mt.adjust, "Treat --alpha as overall target and adjust it for k; exit 1 if infeasible");
  mtable->add_flag("--json", mt.json, "JSON instead of CSV (position,minimum)");
  mtable->footer(kExitCodeHelp);

  AdjustArgs ad;
  auto* adjust = app.add_subcommand("adjust", "Per-prefix significance giving overall type-I error alpha");
  adjust->add_option("--k", ad.k, "Ranking length")->required();
  adjust->add_option("--p", ad.p, "Target minimum protected proportion")->required();
  adjust->add_option("--alpha", ad.alpha, "Overall significance target")->capture_default_str();
  adjust->add_flag("--json", ad.json, "JSON instead of CSV");
  adjust->footer(std::string(kExitCodeHelp) +
                 " Exit 1 when no alpha_adj reaches the target; the conservative fallback is still printed.");

  VerifyArgs vf;
  auto* verify = app.add_subcommand("verify", "Test a ranking (CSV, best first) for ranked group fairness");
  verify->add_option("input", vf.input, "Ranking CSV, '-' for stdin")->required();
  verify->add_option("--p", vf.p, "Target minimum protected proportion")->required();
  verify->add_option("--alpha", vf.alpha, "Significance")->capture_default_str();
  verify->add_flag("--adjusted", vf.adjusted, "Adjust --alpha for the ranking length (default)");
  verify->add_flag("--raw", vf.raw, "Use --alpha directly as the per-prefix significance");
  verify->add_flag("--strict", vf.strict, "Exit 1 when the ranking is unfair");
  verify->add_flag("--json", vf.json, "JSON instead of CSV");
  vf.columns.attach(verify, false);
  verify->footer(std::string(kExitCodeHelp) + " Without --strict an unfair verdict exits 0.");

  RankArgs rk;
  auto* rank = app.add_subcommand("rank", "Build a top-k ranking from a candidate CSV");
  rank->add_option("input", rk.input, "Candidate CSV, '-' for stdin")->required();
  rank->add_option("--k", rk.k, "Ranking length")->required();
  rank->add_option("--p", rk.p, "Target minimum protected proportion (fair method)");
  rank->add_option("--alpha", rk.alpha, "Significance, adjusted for k unless --raw")->capture_default_str();
  rank->add_option("--method", rk.method, "fair, colorblind or feldman")
      ->check(CLI::IsMember({"fair", "colorblind", "feldman"}))
      ->capture_default_str();
  rank->add_option("--seed", rk.seed, "Accepted for reproducible pipelines; all methods are deterministic");
  rank->add_flag("--raw", rk.raw, "Use --alpha directly as the per-prefix significance");
  rank->add_flag("--strict", rk.strict, "Exit 1 instead of filling the tail when protected candidates run out");
  rank->add_flag("--json", rk.json, "JSON instead of CSV (rank,id,score,protected)");
  rk.columns.attach(rank, true);
  rank->footer(kExitCodeHelp);

  SimulateArgs sm;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo rejection rate of the test on generated rankings");
  simulate->add_option("--k", sm.k, "Ranking length")->required();
  simulate->add_option("--p", sm.p, "Protected probability of the generator")->required();
  simulate->add_option("--p-test", sm.p_test, "Proportion used by the test (default --p)");
  simulate->add_option("--alpha-adj", sm.alpha_adj, "Per-prefix significance")->required();
  simulate->add_option("--trials", sm.trials, "Number of rankings")->capture_default_str();
  simulate->add_option("--seed", sm.seed, "RNG seed")->capture_default_str();
  simulate->add_option("--threads", sm.threads, "Worker threads, 0 = all cores; output does not depend on it")
      ->capture_default_str();
  simulate->add_flag("--json", sm.json, "JSON instead of CSV");
  simulate->footer(kExitCodeHelp);

  ExperimentArgs ex;
  auto* experiment = app.add_subcommand("experiment", "Run color-blind, fair and Feldman-repair rankings over a p grid");
  experiment->add_option("--config", ex.config, "Dataset config (key = value lines)")->required();
  experiment->add_option("--threads", ex.threads, "Parallel p values")->capture_default_str();
  experiment->add_flag("--json", ex.json, "JSON instead of CSV");
  experiment->footer(std::string(kExitCodeHelp) +
                     " Config keys: name, path, id_column, score_column, protected_column, protected_value,"
                     " higher_is_better, k, p_grid (a,b,c or start:stop:step), alpha.");

  CurveArgs cv;
  auto* curve = app.add_subcommand("curve", "Analytic and simulated rejection over p and alpha_adj grids (CSV)");
  curve->add_option("--k", cv.k, "Ranking length")->required();
  curve->add_option("--p-grid", cv.p_grid, "p values: a,b,c or start:stop:step")->required();
  curve->add_option("--alpha-adj-grid", cv.alpha_grid, "alpha_adj values: a,b,c or start:stop:step")->required();
  curve->add_option("--trials", cv.trials, "Simulated rankings per point")->capture_default_str();
  curve->add_option("--seed", cv.seed, "RNG seed")->capture_default_str();
  curve->add_option("--threads", cv.threads, "Worker threads, 0 = all cores")->capture_default_str();
  curve->footer(kExitCodeHelp);

  PrepareArgs pr;
  auto* prepare = app.add_subcommand("prepare", "Convert raw datasets to candidate CSVs");
  prepare->require_subcommand(1);
  prepare->footer(kExitCodeHelp);
  auto* xing = prepare->add_subcommand("xing", "Add score = (work months + education months) * views");
  xing->add_option("input", pr.input, "Profile CSV")->required();
  xing->add_option("-o,--output", pr.output, "Output CSV (default stdout)");
  xing->add_option("--work-column", pr.xing.work_months)->capture_default_str();
  xing->add_option("--education-column", pr.xing.education_months)->capture_default_str();
  xing->add_option("--views-column", pr.xing.views)->capture_default_str();
  xing->footer(kExitCodeHelp);
  auto* german = prepare->add_subcommand("german", "UCI Statlog german.data to CSV with sex/age group columns");
  german->add_option("input", pr.input, "Raw german.data (space separated)")->required();
  german->add_option("-o,--output", pr.output, "Output CSV (default stdout)");
  german->footer(kExitCodeHelp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*mtable) return cmd_mtable(mt);
    if (*adjust) return cmd_adjust(ad);
    if (*verify) return cmd_verify(vf);
    if (*rank) {
      if (rk.method == "fair" && !rank->count("--p")) throw UsageError("--p is required for --method fair");
      return cmd_rank(rk);
    }
    if (*simulate) return cmd_simulate(sm);
    if (*experiment) return cmd_experiment(ex);
    if (*curve) return cmd_curve(cv);
    if (*xing) {
      return with_input(pr.input, [&](std::istream& in) {
        return with_output(pr.output, [&](std::ostream& out) { prepare_xing(in, out, pr.xing); });
      });
    }
    if (*german) {
      return with_input(pr.input, [&](std::istream& in) {
        return with_output(pr.output, [&](std::ostream& out) { prepare_german_credit(in, out); });
      });
    }
  } catch (const UsageError& e) {
    std::cerr << "fairtopk: " << e.what() << '\n';
    return kExitUsage;
  } catch (const LoadError& e) {
    std::cerr << "fairtopk: " << e.what() << '\n';
    return kExitData;
  } catch (const CsvError& e) {
    std::cerr << "fairtopk: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "fairtopk: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "fairtopk: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
