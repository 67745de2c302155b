#pragma once
// Dataset loading, the experiment protocol (color-blind, fair top-k and quantile
// repair at each target proportion), report and curve serialization, and
// dataset preparation helpers.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairtopk/adjustment.hpp"
#include "fairtopk/candidates.hpp"
#include "fairtopk/metrics.hpp"

namespace fairtopk {

// Data problems: missing file or column, unparseable value, empty pool.
class LoadError : public std::runtime_error {
 public:
  LoadError(const std::string& what, std::size_t row = 0)
      : std::runtime_error(row ? "row " + std::to_string(row) + ": " + what : what), row_(row) {}
  std::size_t row() const { return row_; }  // 1-based data row, 0 when not row-specific

 private:
  std::size_t row_;
};

struct DatasetSpec {
  std::string name = "dataset";
  std::filesystem::path path;
  std::string id_column = "id";  // row numbers are used when the column is absent
  std::string score_column = "score";
  std::string protected_column = "protected";
  std::string protected_value = "1";
  bool higher_is_better = true;
  int k = 0;
  std::vector<double> p_grid;
  double alpha = 0.1;
};

// `key = value` lines, '#' comments. Relative paths resolve against the
// config file's directory. Throws LoadError on unknown keys or bad values.
DatasetSpec parse_dataset_spec(std::istream& in, const std::filesystem::path& base_dir = {});
DatasetSpec load_dataset_spec(const std::filesystem::path& config_file);

CandidatePool load_candidates(const DatasetSpec& spec);
CandidatePool load_candidates(std::istream& csv, const DatasetSpec& spec);

// Writes `id,score,protected` (protected as 0/1), scores with round-trip precision.
void write_candidates_csv(std::ostream& out, const CandidatePool& pool);

// A ranking read back from CSV in row order (columns id, protected, optional score).
RankedSequence load_ranking(std::istream& csv, const DatasetSpec& spec);

struct ExperimentRow {
  std::string dataset;
  std::string method;  // color-blind | fair | feldman
  double p = 0.0;
  double alpha_adj = 0.0;
  bool adjustment_feasible = true;
  UtilityReport report;
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;
};

ExperimentReport run_experiment(const DatasetSpec& spec, const CandidatePool& pool,
                                AdjustmentCache* cache = nullptr, unsigned threads = 1);
ExperimentReport run_experiment(const DatasetSpec& spec, AdjustmentCache* cache = nullptr,
                                unsigned threads = 1);

// dataset,method,p,pct_protected_output,ndcg,ordering_utility_loss,rank_drop,selection_utility_loss
void write_report_csv(std::ostream& out, const ExperimentReport& report);

struct CurveRow {
  int k = 0;
  double p = 0.0;
  double alpha_adj = 0.0;
  double analytic_rejection = 0.0;
  double simulated_rejection = 0.0;
  double std_error = 0.0;
};

std::vector<CurveRow> emit_curve_data(int k, const std::vector<double>& p_grid,
                                      const std::vector<double>& alpha_adj_grid,
                                      std::int64_t trials, std::uint64_t seed,
                                      unsigned threads = 0);
void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows);

struct XingColumns {
  std::string work_months = "work_experience_months";
  std::string education_months = "education_months";
  std::string views = "views";
};

// Copies the CSV and appends (or overwrites) `score` =
// (work months + education months) * views.
void prepare_xing(std::istream& in, std::ostream& out, const XingColumns& columns = {});

// UCI Statlog german.data (space separated, 20 attributes + class) to a
// headered CSV with id, duration_months, credit_amount, sex, female, age,
// age_lt_25, age_lt_35, credit_risk and score = minmax(duration) + minmax(amount).
void prepare_german_credit(std::istream& raw, std::ostream& out);

// "0.1,0.2" or "0.1:0.7:0.1" (inclusive range).
std::vector<double> parse_real_list(const std::string& text);

}  // namespace fairtopk
