#pragma once
// Domain types: candidates, candidate pools and ranked sequences.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fairtopk {

struct Candidate {
  std::string id;
  double score = 0.0;  // qualification q_i, higher is better
  bool is_protected = false;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

// One position of a ranking. Positions are implicit (index + 1).
struct RankedEntry {
  std::string id;
  bool is_protected = false;
  double score = 0.0;

  friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

using RankedSequence = std::vector<RankedEntry>;

// Ascending id order used to break score ties. Two all-digit ids compare by
// numeric value, anything else compares lexicographically.
bool id_less(std::string_view a, std::string_view b);

// Score descending, then id ascending.
inline bool ranks_before(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  return id_less(a.id, b.id);
}

// Immutable set of candidates with unique ids and finite scores.
class CandidatePool {
 public:
  CandidatePool() = default;
  // Throws std::invalid_argument on duplicate ids or non-finite scores.
  explicit CandidatePool(std::vector<Candidate> candidates);

  std::span<const Candidate> candidates() const { return candidates_; }
  std::size_t size() const { return candidates_.size(); }
  bool empty() const { return candidates_.empty(); }
  const Candidate& operator[](std::size_t i) const { return candidates_[i]; }

  std::size_t protected_count() const { return protected_count_; }
  std::optional<std::size_t> index_of(std::string_view id) const;

 private:
  std::vector<Candidate> candidates_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t protected_count_ = 0;
};

inline RankedEntry to_entry(const Candidate& c) { return {c.id, c.is_protected, c.score}; }

}  // namespace fairtopk
