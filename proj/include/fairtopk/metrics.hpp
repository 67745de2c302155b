#pragma once
// Cost-of-fairness metrics: ranked/selection/ordering utility (on scores
// min-max normalized over the whole pool), maximum rank drop and NDCG.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairtopk/candidates.hpp"

namespace fairtopk {

// Scores of a pool mapped to [0, 1] with the pool's min and max. A constant
// pool maps every score to 1.
class NormalizedScores {
 public:
  explicit NormalizedScores(const CandidatePool& pool);
  double operator()(double raw) const;

 private:
  double min_ = 0.0;
  double range_ = 0.0;
};

// Utility of one candidate: (lowest normalized score ranked above it) minus
// (its own normalized score) when that is negative, else 0. Candidates missing
// from the ranking sit at rank |ranking| + 1. Throws std::domain_error for an
// unknown id.
double ranked_utility(std::string_view id, std::span<const RankedEntry> ranking,
                      const CandidatePool& pool);

struct UtilityExtreme {
  double utility = 0.0;   // <= 0
  std::string candidate;  // who attains it; empty when utility is 0
};

// Worst utility among candidates left out of the ranking.
UtilityExtreme selection_utility(std::span<const RankedEntry> ranking, const CandidatePool& pool);

struct OrderingUtility {
  double utility = 0.0;  // <= 0
  std::string candidate;
  int max_rank_drop = 0;  // positions lost vs. the color-blind order by `candidate`
};

// Worst utility among ranked candidates, and the rank drop of whoever attains it.
OrderingUtility ordering_utility(std::span<const RankedEntry> ranking, const CandidatePool& pool);

// sum_i q(ranking_i) / log2(i + 1) over the first k positions, divided by the
// same sum for the color-blind top-k. Normalized scores.
double ndcg(std::span<const RankedEntry> ranking, const CandidatePool& pool, int k);

struct UtilityReport {
  double protected_share = 0.0;
  double ndcg = 1.0;
  double ordering_utility_loss = 0.0;
  double selection_utility_loss = 0.0;
  int max_rank_drop = 0;
  std::string worst_ordering_candidate;
  std::string worst_selection_candidate;
};

UtilityReport evaluate_ranking(std::span<const RankedEntry> ranking, const CandidatePool& pool);

}  // namespace fairtopk
