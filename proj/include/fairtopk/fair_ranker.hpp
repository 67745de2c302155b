#pragma once
// Utility-maximizing top-k selection under ranked group fairness and
// in-group monotonicity, plus the score-only (color-blind) reference.

#include <stdexcept>

#include "fairtopk/candidates.hpp"
#include "fairtopk/fairness_test.hpp"

namespace fairtopk {

// Raised in strict mode when the protected supply runs out before the table is met.
class InsufficientProtectedError : public std::runtime_error {
 public:
  InsufficientProtectedError(const std::string& what, int satisfied_up_to)
      : std::runtime_error(what), satisfied_up_to_(satisfied_up_to) {}
  int satisfied_up_to() const { return satisfied_up_to_; }

 private:
  int satisfied_up_to_;
};

struct FairRankingOptions {
  bool strict = false;
};

struct FairRanking {
  RankedSequence entries;
  MTable mtable_used;
  int satisfied_up_to = 0;  // longest prefix meeting the table

  bool fully_satisfied() const { return satisfied_up_to == static_cast<int>(entries.size()); }
};

// Top-k by score descending, ties by ascending id. Throws std::domain_error
// when k exceeds the pool size.
RankedSequence color_blind_topk(const CandidatePool& pool, int k);

// The k best candidates of one group (or of all), best first, in O(n + k log k).
std::vector<std::size_t> best_k_indices(const CandidatePool& pool, int k,
                                        std::optional<bool> group = std::nullopt);

// Greedy construction: at each position take the best protected candidate
// if the table requires one, otherwise the better of the two group heads,
// preferring the protected head on equal scores. If the protected supply runs
// out, the tail is filled from the other group and satisfied_up_to marks the
// last compliant prefix (strict mode throws instead).
FairRanking fair_topk(const CandidatePool& pool, const MTable& table,
                      const FairRankingOptions& options = {});
FairRanking fair_topk(const CandidatePool& pool, int k, double p, double alpha_adj,
                      const FairRankingOptions& options = {});

}  // namespace fairtopk
