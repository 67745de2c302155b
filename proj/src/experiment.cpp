#include "fairtopk/experiment.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <istream>
#include <ostream>
#include <sstream>

#include "fairtopk/baselines.hpp"
#include "fairtopk/csv.hpp"
#include "fairtopk/fair_ranker.hpp"

namespace fairtopk {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return errno == 0 && end == t.c_str() + t.size() && std::isfinite(out);
}

bool parse_bool(const std::string& text, bool& out) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return out = true, true;
  if (t == "false" || t == "0" || t == "no") return out = false, true;
  return false;
}

bool matches_protected(const std::string& field, const std::string& value) {
  const std::string f = trim(field);
  if (f == value) return true;
  double a, b;
  return parse_double(f, a) && parse_double(value, b) && a == b;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  const std::string t = trim(text);
  if (t.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ':')) {
      double v;
      if (!parse_double(item, v)) throw LoadError("bad number '" + item + "' in range '" + t + "'");
      parts.push_back(v);
    }
    if (parts.size() != 3 || parts[2] <= 0.0) throw LoadError("range must be start:stop:step");
    const long steps = std::lround(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    for (long i = 0; i <= steps; ++i) out.push_back(std::round((parts[0] + i * parts[2]) * 1e9) / 1e9);
    return out;
  }
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    double v;
    if (!parse_double(item, v)) throw LoadError("bad number '" + item + "' in list '" + t + "'");
    out.push_back(v);
  }
  return out;
}

DatasetSpec parse_dataset_spec(std::istream& in, const std::filesystem::path& base_dir) {
  DatasetSpec spec;
  std::string line;
  std::size_t line_no = 0;
  bool have_path = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw LoadError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto fail = [&](const std::string& why) {
      return LoadError("config line " + std::to_string(line_no) + ": " + key + ": " + why);
    };
    double number;
    if (key == "name") {
      spec.name = value;
    } else if (key == "path") {
      spec.path = std::filesystem::path(value);
      if (spec.path.is_relative() && !base_dir.empty()) spec.path = base_dir / spec.path;
      have_path = true;
    } else if (key == "id_column") {
      spec.id_column = value;
    } else if (key == "score_column") {
      spec.score_column = value;
    } else if (key == "protected_column") {
      spec.protected_column = value;
    } else if (key == "protected_value") {
      spec.protected_value = value;
    } else if (key == "higher_is_better") {
      if (!parse_bool(value, spec.higher_is_better)) throw fail("expected true/false");
    } else if (key == "k") {
      if (!parse_double(value, number) || number < 1 || number != std::floor(number)) {
        throw fail("expected a positive integer");
      }
      spec.k = static_cast<int>(number);
    } else if (key == "p_grid") {
      spec.p_grid = parse_real_list(value);
    } else if (key == "alpha") {
      if (!parse_double(value, spec.alpha)) throw fail("expected a number");
    } else {
      throw fail("unknown key");
    }
  }
  if (!have_path) throw LoadError("config: missing 'path'");
  if (spec.k < 1) throw LoadError("config: missing or invalid 'k'");
  if (spec.p_grid.empty()) throw LoadError("config: missing 'p_grid'");
  for (double p : spec.p_grid) {
    if (!(p > 0.0 && p < 1.0)) throw LoadError("config: p_grid values must lie in (0, 1)");
  }
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) throw LoadError("config: alpha must lie in (0, 1)");
  return spec;
}

DatasetSpec load_dataset_spec(const std::filesystem::path& config_file) {
  std::ifstream in(config_file);
  if (!in) throw LoadError("cannot open config '" + config_file.string() + "'");
  return parse_dataset_spec(in, config_file.parent_path());
}

CandidatePool load_candidates(std::istream& in, const DatasetSpec& spec) {
  CsvTable csv;
  try {
    csv = read_csv(in);
  } catch (const CsvError& e) {
    throw LoadError(e.what());
  }
  std::size_t score_col, prot_col;
  try {
    score_col = csv.column(spec.score_column);
    prot_col = csv.column(spec.protected_column);
  } catch (const CsvError& e) {
    throw LoadError(e.what());
  }
  const bool has_id = csv.has_column(spec.id_column);
  const std::size_t id_col = has_id ? csv.column(spec.id_column) : 0;
  if (csv.rows.empty()) throw LoadError("dataset has no rows");

  std::vector<Candidate> candidates;
  candidates.reserve(csv.rows.size());
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    double score;
    if (!parse_double(row[score_col], score)) {
      throw LoadError("unparseable score '" + row[score_col] + "'", r + 1);
    }
    Candidate c;
    c.id = has_id ? trim(row[id_col]) : std::to_string(r + 1);
    c.score = spec.higher_is_better ? score : -score;
    c.is_protected = matches_protected(row[prot_col], spec.protected_value);
    candidates.push_back(std::move(c));
  }
  try {
    return CandidatePool(std::move(candidates));
  } catch (const std::invalid_argument& e) {
    throw LoadError(e.what());
  }
}

CandidatePool load_candidates(const DatasetSpec& spec) {
  std::ifstream in(spec.path, std::ios::binary);
  if (!in) throw LoadError("cannot open dataset '" + spec.path.string() + "'");
  return load_candidates(in, spec);
}

void write_candidates_csv(std::ostream& out, const CandidatePool& pool) {
  out << "id,score,protected\n";
  for (const auto& c : pool.candidates()) {
    write_csv_row(out, {c.id, format_real(c.score), c.is_protected ? "1" : "0"});
  }
}

RankedSequence load_ranking(std::istream& in, const DatasetSpec& spec) {
  CsvTable csv;
  std::size_t prot_col;
  try {
    csv = read_csv(in);
    prot_col = csv.column(spec.protected_column);
  } catch (const CsvError& e) {
    throw LoadError(e.what());
  }
  const bool has_id = csv.has_column(spec.id_column);
  const bool has_score = csv.has_column(spec.score_column);
  RankedSequence out;
  out.reserve(csv.rows.size());
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    RankedEntry e;
    e.id = has_id ? trim(row[csv.column(spec.id_column)]) : std::to_string(r + 1);
    e.is_protected = matches_protected(row[prot_col], spec.protected_value);
    if (has_score) {
      const auto& field = row[csv.column(spec.score_column)];
      if (!parse_double(field, e.score)) throw LoadError("unparseable score '" + field + "'", r + 1);
      if (!spec.higher_is_better) e.score = -e.score;
    }
    out.push_back(std::move(e));
  }
  if (out.empty()) throw LoadError("ranking has no rows");
  return out;
}

ExperimentReport run_experiment(const DatasetSpec& spec, const CandidatePool& pool,
                                AdjustmentCache* cache, unsigned threads) {
  if (static_cast<std::size_t>(spec.k) > pool.size()) {
    throw LoadError("k=" + std::to_string(spec.k) + " exceeds dataset size " + std::to_string(pool.size()));
  }
  const RankedSequence color_blind = color_blind_topk(pool, spec.k);
  const UtilityReport color_blind_report = evaluate_ranking(color_blind, pool);

  RankedSequence feldman;
  UtilityReport feldman_report;
  const bool feldman_possible = pool.protected_count() > 0 && pool.protected_count() < pool.size();
  if (feldman_possible) {
    feldman = color_blind_topk(feldman_repair(pool).pool, spec.k);
    // Ranking order comes from repaired scores; metrics use the original ones.
    for (auto& e : feldman) e.score = pool[*pool.index_of(e.id)].score;
    feldman_report = evaluate_ranking(feldman, pool);
  }

  const auto cell = [&](double p) {
    const AdjustmentResult adj = cache ? cache->get(spec.k, p, spec.alpha)
                                       : adjust_significance(spec.k, p, spec.alpha);
    const FairRanking fair = fair_topk(pool, spec.k, p, adj.alpha_adj);
    std::vector<ExperimentRow> rows;
    rows.push_back({spec.name, "color-blind", p, adj.alpha_adj, adj.feasible, color_blind_report});
    rows.push_back({spec.name, "fair", p, adj.alpha_adj, adj.feasible, evaluate_ranking(fair.entries, pool)});
    if (feldman_possible) {
      rows.push_back({spec.name, "feldman", p, adj.alpha_adj, adj.feasible, feldman_report});
    }
    return rows;
  };

  std::vector<std::vector<ExperimentRow>> cells(spec.p_grid.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < spec.p_grid.size(); ++i) cells[i] = cell(spec.p_grid[i]);
  } else {
    std::vector<std::future<std::vector<ExperimentRow>>> pending;
    for (double p : spec.p_grid) pending.push_back(std::async(std::launch::async, cell, p));
    for (std::size_t i = 0; i < pending.size(); ++i) cells[i] = pending[i].get();
  }

  ExperimentReport report;
  for (auto& rows : cells) {
    for (auto& row : rows) report.rows.push_back(std::move(row));
  }
  return report;
}

ExperimentReport run_experiment(const DatasetSpec& spec, AdjustmentCache* cache, unsigned threads) {
  return run_experiment(spec, load_candidates(spec), cache, threads);
}

void write_report_csv(std::ostream& out, const ExperimentReport& report) {
  out << "dataset,method,p,pct_protected_output,ndcg,ordering_utility_loss,rank_drop,"
         "selection_utility_loss\n";
  for (const auto& row : report.rows) {
    const auto& r = row.report;
    write_csv_row(out, {row.dataset, row.method, fixed6(row.p), fixed6(100.0 * r.protected_share),
                        fixed6(r.ndcg), fixed6(r.ordering_utility_loss),
                        std::to_string(r.max_rank_drop), fixed6(r.selection_utility_loss)});
  }
}

std::vector<CurveRow> emit_curve_data(int k, const std::vector<double>& p_grid,
                                      const std::vector<double>& alpha_adj_grid,
                                      std::int64_t trials, std::uint64_t seed, unsigned threads) {
  std::vector<CurveRow> rows;
  for (double alpha_adj : alpha_adj_grid) {
    for (double p : p_grid) {
      CurveRow row;
      row.k = k;
      row.p = p;
      row.alpha_adj = alpha_adj;
      row.analytic_rejection = rejection_probability(k, p, alpha_adj);
      const auto sim = simulate_rejection_rate(k, p, p, alpha_adj, trials, seed, threads);
      row.simulated_rejection = sim.rate;
      row.std_error = sim.std_error;
      rows.push_back(row);
    }
  }
  return rows;
}

void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows) {
  out << "k,p,alpha_adj,analytic_rejection,simulated_rejection,stderr\n";
  for (const auto& r : rows) {
    write_csv_row(out, {std::to_string(r.k), fixed6(r.p), fixed6(r.alpha_adj),
                        fixed6(r.analytic_rejection), fixed6(r.simulated_rejection),
                        fixed6(r.std_error)});
  }
}

void prepare_xing(std::istream& in, std::ostream& out, const XingColumns& columns) {
  CsvTable csv;
  try {
    csv = read_csv(in);
  } catch (const CsvError& e) {
    throw LoadError(e.what());
  }
  std::size_t work, edu, views;
  try {
    work = csv.column(columns.work_months);
    edu = csv.column(columns.education_months);
    views = csv.column(columns.views);
  } catch (const CsvError& e) {
    throw LoadError(e.what());
  }
  const bool has_score = csv.has_column("score");
  const std::size_t score_col = has_score ? csv.column("score") : csv.header.size();
  auto header = csv.header;
  if (!has_score) header.push_back("score");
  write_csv_row(out, header);
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    auto row = csv.rows[r];
    double w, e, v;
    if (!parse_double(row[work], w) || !parse_double(row[edu], e) || !parse_double(row[views], v)) {
      throw LoadError("non-numeric work/education/views value", r + 1);
    }
    if (has_score) {
      row[score_col] = format_real((w + e) * v);
    } else {
      row.push_back(format_real((w + e) * v));
    }
    write_csv_row(out, row);
  }
}

void prepare_german_credit(std::istream& raw, std::ostream& out) {
  struct Row {
    double duration, amount;
    std::string sex;
    int age, risk;
  };
  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(raw, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::istringstream fields(line);
    std::vector<std::string> f;
    for (std::string tok; fields >> tok;) f.push_back(tok);
    if (f.size() != 21) throw LoadError("expected 21 attributes, found " + std::to_string(f.size()), line_no);
    Row r;
    double age, risk;
    if (!parse_double(f[1], r.duration) || !parse_double(f[4], r.amount) || !parse_double(f[12], age) ||
        !parse_double(f[20], risk)) {
      throw LoadError("non-numeric attribute", line_no);
    }
    r.sex = f[8];
    r.age = static_cast<int>(age);
    r.risk = static_cast<int>(risk);
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw LoadError("german credit file has no rows");
  const auto range = [&](auto member) {
    double lo = rows[0].*member, hi = lo;
    for (const auto& r : rows) lo = std::min(lo, r.*member), hi = std::max(hi, r.*member);
    return std::pair{lo, hi - lo};
  };
  const auto [dur_lo, dur_span] = range(&Row::duration);
  const auto [amt_lo, amt_span] = range(&Row::amount);

  out << "id,duration_months,credit_amount,sex,female,age,age_lt_25,age_lt_35,credit_risk,score\n";
  char buf[256];
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    // A92: female divorced/separated/married, A95: female single
    const bool female = r.sex == "A92" || r.sex == "A95";
    const double score = (r.duration - dur_lo) / dur_span + (r.amount - amt_lo) / amt_span;
    std::snprintf(buf, sizeof buf, "%zu,%.0f,%.0f,%s,%d,%d,%d,%d,%d,%s\n", i + 1, r.duration,
                  r.amount, r.sex.c_str(), female ? 1 : 0, r.age, r.age < 25 ? 1 : 0,
                  r.age < 35 ? 1 : 0, r.risk, format_real(score).c_str());
    out << buf;
  }
}

}  // namespace fairtopk
