#pragma once
// Type-I error of the ranked group fairness test under the fair generative
// model, and the adjusted per-prefix significance that brings it to a target.

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <tuple>
#include <vector>

#include "fairtopk/fairness_test.hpp"

namespace fairtopk {

// Block-by-block success recursion over the count distribution.
struct RecursionTrace {
  double rejection = 0.0;               // total mass removed by failed block checks
  std::vector<double> surviving_mass;   // sum of the success vector after each block
};

RecursionTrace fairness_recursion(const MTable& table);

// Probability that a ranking whose positions are independently protected
// with probability p fails the test defined by (p, alpha_adj) at some prefix
// of length <= k. O(k * m(k)).
double rejection_probability(int k, double p, double alpha_adj);
double rejection_probability(const MTable& table);

struct AdjustmentResult {
  int k = 0;
  double p = 0.0;
  double alpha_target = 0.0;
  double alpha_adj = 0.0;  // conservative fallback when !feasible
  double achieved_rejection = 0.0;
  bool feasible = false;
  int search_iterations = 0;
};

struct AdjustmentTolerances {
  double converged = 1e-4;     // |rejection - target| accepted during the search
  double feasible = 1e-3;      // closest bracket within this is still reported feasible
  double min_width = 1e-6;     // stop bisecting below this interval width
  double lower_bound = 1e-10;  // search interval is (lower_bound, alpha_target]
};

// Bisection on alpha_adj in (lower_bound, alpha_target]. When no value gets
// within tolerances.feasible of the target, returns the largest alpha_adj
// with rejection <= target and feasible = false.
AdjustmentResult adjust_significance(int k, double p, double alpha_target,
                                     const AdjustmentTolerances& tolerances = {});

// Independent-tests correction, used only as a reference bound.
double sidak_alpha(double alpha, int k);

struct SimulationResult {
  double rate = 0.0;
  double std_error = 0.0;
  std::int64_t trials = 0;
  std::int64_t rejections = 0;
};

// Monte Carlo estimate: `trials` synthetic rankings drawn with p_generator,
// tested with (p_test, alpha_adj). Trial t uses an RNG seeded from
// (seed, t), so the result does not depend on `threads` (0 = hardware).
SimulationResult simulate_rejection_rate(int k, double p_generator, double p_test,
                                         double alpha_adj, std::int64_t trials,
                                         std::uint64_t seed, unsigned threads = 0);

// Thread-safe memo of adjust_significance keyed by (k, p, alpha) at six
// decimals, optionally persisted to <directory>/adjustments.csv with columns
// k,p,alpha,alpha_adj,achieved_rejection,feasible.
class AdjustmentCache {
 public:
  explicit AdjustmentCache(std::optional<std::filesystem::path> directory = std::nullopt);

  AdjustmentResult get(int k, double p, double alpha);

  static constexpr const char* kFileName = "adjustments.csv";

 private:
  using Key = std::tuple<int, std::int64_t, std::int64_t>;
  static Key key_of(int k, double p, double alpha);
  void append_to_disk(const AdjustmentResult& result);

  std::optional<std::filesystem::path> directory_;
  std::mutex mutex_;
  std::map<Key, AdjustmentResult> results_;
};

}  // namespace fairtopk
