#include "fairtopk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "fairtopk/fair_ranker.hpp"
#include "fairtopk/kernels.hpp"

namespace fairtopk {

NormalizedScores::NormalizedScores(const CandidatePool& pool) {
  if (pool.empty()) return;
  const auto [lo, hi] = std::minmax_element(
      pool.candidates().begin(), pool.candidates().end(),
      [](const Candidate& a, const Candidate& b) { return a.score < b.score; });
  min_ = lo->score;
  range_ = hi->score - lo->score;
}

double NormalizedScores::operator()(double raw) const {
  if (range_ <= 0.0) return 1.0;
  return (raw - min_) / range_;
}

namespace {

std::unordered_set<std::string_view> ranked_ids(std::span<const RankedEntry> ranking) {
  std::unordered_set<std::string_view> ids;
  ids.reserve(ranking.size() * 2);
  for (const auto& e : ranking) ids.insert(e.id);
  return ids;
}

double pool_score(const CandidatePool& pool, std::string_view id) {
  const auto idx = pool.index_of(id);
  if (!idx) throw std::domain_error("unknown candidate id '" + std::string(id) + "'");
  return pool[*idx].score;
}

}  // namespace

double ranked_utility(std::string_view id, std::span<const RankedEntry> ranking,
                      const CandidatePool& pool) {
  const NormalizedScores norm(pool);
  const double own = norm(pool_score(pool, id));
  double lowest_above = std::numeric_limits<double>::infinity();
  for (const auto& e : ranking) {
    if (e.id == id) break;
    lowest_above = std::min(lowest_above, norm(pool_score(pool, e.id)));
  }
  return lowest_above < own ? lowest_above - own : 0.0;
}

UtilityExtreme selection_utility(std::span<const RankedEntry> ranking, const CandidatePool& pool) {
  const NormalizedScores norm(pool);
  double lowest_ranked = std::numeric_limits<double>::infinity();
  for (const auto& e : ranking) lowest_ranked = std::min(lowest_ranked, norm(pool_score(pool, e.id)));

  const auto included = ranked_ids(ranking);
  const Candidate* best_excluded = nullptr;
  for (const auto& c : pool.candidates()) {
    if (included.count(c.id)) continue;
    if (!best_excluded || ranks_before(c, *best_excluded)) best_excluded = &c;
  }
  UtilityExtreme out;
  if (best_excluded && lowest_ranked < norm(best_excluded->score)) {
    out.utility = lowest_ranked - norm(best_excluded->score);
    out.candidate = best_excluded->id;
  }
  return out;
}

OrderingUtility ordering_utility(std::span<const RankedEntry> ranking, const CandidatePool& pool) {
  const NormalizedScores norm(pool);
  OrderingUtility out;
  double lowest_above = std::numeric_limits<double>::infinity();
  std::size_t worst_position = 0;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    const double own = norm(pool_score(pool, ranking[i].id));
    if (lowest_above < own && lowest_above - own < out.utility) {
      out.utility = lowest_above - own;
      out.candidate = ranking[i].id;
      worst_position = i + 1;
    }
    lowest_above = std::min(lowest_above, own);
  }
  if (worst_position == 0) return out;

  // Color-blind position over the whole pool: candidates ranked strictly before it.
  const Candidate& worst = pool[*pool.index_of(out.candidate)];
  std::size_t color_blind_position = 1;
  for (const auto& c : pool.candidates()) {
    if (ranks_before(c, worst)) ++color_blind_position;
  }
  out.max_rank_drop = std::max<int>(
      0, static_cast<int>(worst_position) - static_cast<int>(color_blind_position));
  return out;
}

double ndcg(std::span<const RankedEntry> ranking, const CandidatePool& pool, int k) {
  if (k < 1) throw std::domain_error("ndcg: k must be at least 1");
  const NormalizedScores norm(pool);
  const std::size_t len = std::min(ranking.size(), static_cast<std::size_t>(k));
  std::vector<double> weights(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = 1.0 / std::log2(i + 2.0);

  std::vector<double> gains(len);
  for (std::size_t i = 0; i < len; ++i) gains[i] = norm(pool_score(pool, ranking[i].id));

  const auto ideal_ids = best_k_indices(pool, k);
  std::vector<double> ideal(ideal_ids.size());
  for (std::size_t i = 0; i < ideal.size(); ++i) ideal[i] = norm(pool[ideal_ids[i]].score);

  const double denom = kernels::dot(ideal, weights);
  if (denom <= 0.0) return 1.0;
  return std::clamp(kernels::dot(gains, weights) / denom, 0.0, 1.0);
}

UtilityReport evaluate_ranking(std::span<const RankedEntry> ranking, const CandidatePool& pool) {
  UtilityReport report;
  if (ranking.empty()) return report;
  const auto protected_in_ranking =
      std::count_if(ranking.begin(), ranking.end(), [](const RankedEntry& e) { return e.is_protected; });
  report.protected_share = static_cast<double>(protected_in_ranking) / static_cast<double>(ranking.size());
  report.ndcg = ndcg(ranking, pool, static_cast<int>(ranking.size()));
  const auto order = ordering_utility(ranking, pool);
  report.ordering_utility_loss = 0.0 - order.utility;
  report.max_rank_drop = order.max_rank_drop;
  report.worst_ordering_candidate = order.candidate;
  const auto selection = selection_utility(ranking, pool);
  report.selection_utility_loss = 0.0 - selection.utility;
  report.worst_selection_candidate = selection.candidate;
  return report;
}

}  // namespace fairtopk
