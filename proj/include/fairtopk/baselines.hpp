#pragma once
// Reference methods: quantile-matching score repair and the synthetic
// fair-ranking generator used to calibrate the significance adjustment.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fairtopk/candidates.hpp"

namespace fairtopk {

struct ScoreRepair {
  std::string id;
  double original = 0.0;
  double repaired = 0.0;
};

struct RepairedPool {
  CandidatePool pool;                // protected scores replaced
  std::vector<ScoreRepair> repairs;  // one entry per protected candidate, ascending original order
};

// Each protected candidate with within-group quantile F_p(i) = rank/|P|
// (ranks 1-based, ascending score, ties by id) takes the score of the
// non-protected candidate at 1-based ascending rank ceil(F_p(i) * |N|).
// Throws std::domain_error when either group is empty.
RepairedPool feldman_repair(const CandidatePool& pool);

// splitmix64 finalizer applied to (seed, stream); gives each trial or worker
// an independent deterministic RNG seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Protected/non-protected labels of a synthetic fair ranking: each position
// is protected independently with probability p.
void generate_protected_flags(int k, double p, std::mt19937_64& rng, std::vector<char>& flags);

// Synthetic ranking of length k drawn from unbounded protected and
// non-protected pools. Ids are "p<j>" / "n<j>" (j-th best of the group) and
// scores descend with position (score = k - position + 1).
RankedSequence yang_stoyanovich_generate(int k, double p, std::uint64_t seed);

}  // namespace fairtopk
