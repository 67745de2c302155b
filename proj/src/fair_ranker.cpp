#include "fairtopk/fair_ranker.hpp"

#include <algorithm>
#include <numeric>

namespace fairtopk {

std::vector<std::size_t> best_k_indices(const CandidatePool& pool, int k,
                                        std::optional<bool> group) {
  std::vector<std::size_t> idx;
  idx.reserve(group ? (*group ? pool.protected_count() : pool.size() - pool.protected_count())
                    : pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (!group || pool[i].is_protected == *group) idx.push_back(i);
  }
  const auto better = [&pool](std::size_t a, std::size_t b) { return ranks_before(pool[a], pool[b]); };
  const std::size_t keep = std::min(idx.size(), static_cast<std::size_t>(std::max(k, 0)));
  if (keep < idx.size()) {
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end(), better);
    idx.resize(keep);
  }
  std::sort(idx.begin(), idx.end(), better);
  return idx;
}

RankedSequence color_blind_topk(const CandidatePool& pool, int k) {
  if (k < 0 || static_cast<std::size_t>(k) > pool.size()) {
    throw std::domain_error("color-blind: k=" + std::to_string(k) + " exceeds pool size " +
                            std::to_string(pool.size()));
  }
  RankedSequence out;
  out.reserve(static_cast<std::size_t>(k));
  for (std::size_t i : best_k_indices(pool, k)) out.push_back(to_entry(pool[i]));
  return out;
}

FairRanking fair_topk(const CandidatePool& pool, const MTable& table,
                      const FairRankingOptions& options) {
  const int k = table.k();
  if (k < 1) throw std::domain_error("fair_topk: k must be at least 1");
  if (static_cast<std::size_t>(k) > pool.size()) {
    throw std::domain_error("fair_topk: k=" + std::to_string(k) + " exceeds pool size " +
                            std::to_string(pool.size()));
  }

  const std::vector<std::size_t> prot = best_k_indices(pool, k, true);
  const std::vector<std::size_t> other = best_k_indices(pool, k, false);
  std::size_t next_prot = 0;
  std::size_t next_other = 0;

  FairRanking out{{}, table, k};
  out.entries.reserve(static_cast<std::size_t>(k));
  int taken_prot = 0;
  bool violated = false;

  for (int position = 1; position <= k; ++position) {
    const bool prot_left = next_prot < prot.size();
    const bool other_left = next_other < other.size();
    bool take_prot;
    if (taken_prot < table.at(position)) {
      take_prot = prot_left;
      if (!prot_left && !violated) {
        violated = true;
        out.satisfied_up_to = position - 1;
        if (options.strict) {
          throw InsufficientProtectedError(
              "fair_topk: protected candidates exhausted at position " + std::to_string(position),
              position - 1);
        }
      }
    } else if (prot_left && other_left) {
      take_prot = pool[prot[next_prot]].score >= pool[other[next_other]].score;
    } else {
      take_prot = prot_left;
    }
    const std::size_t chosen = take_prot ? prot[next_prot++] : other[next_other++];
    if (take_prot) ++taken_prot;
    out.entries.push_back(to_entry(pool[chosen]));
  }
  return out;
}

FairRanking fair_topk(const CandidatePool& pool, int k, double p, double alpha_adj,
                      const FairRankingOptions& options) {
  return fair_topk(pool, compute_mtable(k, p, alpha_adj), options);
}

}  // namespace fairtopk
