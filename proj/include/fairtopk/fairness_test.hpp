#pragma once
// Ranked group fairness: minimum-count tables (mtables), their block
// structure, and the per-prefix binomial test applied to a ranking.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <tuple>
#include <vector>

#include "fairtopk/candidates.hpp"

namespace fairtopk {

// Minimum number of protected candidates required in every prefix of a
// ranking of length k, for target proportion p and per-prefix significance
// alpha_adj.
class MTable {
 public:
  // Throws std::invalid_argument unless minima is a valid table: starts at 0
  // or 1, never decreases, grows by at most one per position, minima[i] <= i.
  MTable(double p, double alpha_adj, std::vector<int> minima);

  int k() const { return static_cast<int>(minima_.size()); }
  double p() const { return p_; }
  double alpha_adj() const { return alpha_adj_; }

  // Required count for the prefix of the given length, 1 <= position <= k.
  int at(int position) const { return minima_[static_cast<std::size_t>(position - 1)]; }
  std::span<const int> minima() const { return minima_; }
  int required_total() const { return minima_.empty() ? 0 : minima_.back(); }

  // Table for the first `length` positions.
  MTable prefix(int length) const;

  friend bool operator==(const MTable&, const MTable&) = default;

 private:
  double p_;
  double alpha_adj_;
  std::vector<int> minima_;
};

struct BlockDecomposition {
  std::vector<int> inverse;  // inverse[i-1]: first position requiring i protected
  std::vector<int> blocks;   // blocks[i-1] = inverse[i-1] - inverse[i-2], inverse[-1] = 0
};

struct FairnessVerdict {
  bool fair = true;
  int first_violation = 0;  // 1-based prefix length, 0 when fair
  int required = 0;         // mtable entry at the violating prefix
  int observed = 0;         // protected count in that prefix
  int deficit() const { return required - observed; }
};

// m(i) = smallest x with F(x; i, p) > alpha_adj for every 1 <= i <= k.
MTable compute_mtable(int k, double p, double alpha_adj);

BlockDecomposition decompose_blocks(const MTable& table);

// F(protected_count; k, p) > alpha.
bool fair_representation(int protected_count, int k, double p, double alpha);

// Single pass over the flags; flags.size() must not exceed table.k().
template <class FlagRange>
FairnessVerdict verify_protected_flags(const FlagRange& flags, const MTable& table) {
  FairnessVerdict verdict;
  int position = 0;
  int count = 0;
  for (const auto flag : flags) {
    ++position;
    if (flag) ++count;
    const int required = table.at(position);
    if (count < required) {
      verdict.fair = false;
      verdict.first_violation = position;
      verdict.required = required;
      verdict.observed = count;
      return verdict;
    }
  }
  return verdict;
}

FairnessVerdict verify_ranked_group_fairness(std::span<const RankedEntry> ranking,
                                             const MTable& table);
FairnessVerdict verify_ranked_group_fairness(std::span<const RankedEntry> ranking, double p,
                                             double alpha_adj);

// Largest alpha for which every prefix passes the unadjusted test:
// min over prefixes i of F(count_i; i, p).
double ranked_group_fairness_measure(std::span<const RankedEntry> ranking, double p);

// CSV with header `position,minimum`, positions 1-based.
void write_mtable_csv(std::ostream& out, const MTable& table);
MTable read_mtable_csv(std::istream& in, double p, double alpha_adj);

// Thread-safe store of mtables keyed by (k, p, alpha_adj) rounded to six
// decimals. Tables are computed at the rounded parameters so a cached entry is
// a pure function of its key. With a directory, entries are persisted as
// mtable_k<k>_p<p>_a<alpha>.csv and reloaded on later misses.
class MTableCache {
 public:
  explicit MTableCache(std::optional<std::filesystem::path> directory = std::nullopt);

  std::shared_ptr<const MTable> get(int k, double p, double alpha_adj);

  static std::string file_name(int k, double p, double alpha_adj);
  static double canonical(double value);

  const std::optional<std::filesystem::path>& directory() const { return directory_; }

 private:
  using Key = std::tuple<int, std::int64_t, std::int64_t>;

  std::optional<std::filesystem::path> directory_;
  mutable std::shared_mutex mutex_;
  std::map<Key, std::shared_ptr<const MTable>> tables_;
};

}  // namespace fairtopk
