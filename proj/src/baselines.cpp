#include "fairtopk/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace fairtopk {

RepairedPool feldman_repair(const CandidatePool& pool) {
  std::vector<std::size_t> prot;
  std::vector<std::size_t> nonprot;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    (pool[i].is_protected ? prot : nonprot).push_back(i);
  }
  if (prot.empty() || nonprot.empty()) {
    throw std::domain_error("feldman repair: both groups must be non-empty");
  }
  const auto ascending = [&pool](std::size_t a, std::size_t b) {
    if (pool[a].score != pool[b].score) return pool[a].score < pool[b].score;
    return id_less(pool[a].id, pool[b].id);
  };
  std::sort(prot.begin(), prot.end(), ascending);
  std::sort(nonprot.begin(), nonprot.end(), ascending);

  std::vector<Candidate> repaired(pool.candidates().begin(), pool.candidates().end());
  RepairedPool out;
  out.repairs.reserve(prot.size());
  const std::size_t np = prot.size();
  const std::size_t nn = nonprot.size();
  for (std::size_t r = 1; r <= np; ++r) {
    const std::size_t idx = prot[r - 1];
    const std::size_t match = (r * nn + np - 1) / np;  // ceil(r/|P| * |N|), 1-based
    const double score = pool[nonprot[match - 1]].score;
    out.repairs.push_back({pool[idx].id, pool[idx].score, score});
    repaired[idx].score = score;
  }
  out.pool = CandidatePool(std::move(repaired));
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void generate_protected_flags(int k, double p, std::mt19937_64& rng, std::vector<char>& flags) {
  flags.resize(static_cast<std::size_t>(k));
  for (auto& f : flags) f = unit_uniform(rng) < p ? 1 : 0;
}

RankedSequence yang_stoyanovich_generate(int k, double p, std::uint64_t seed) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("generator: p must lie in (0, 1)");
  if (k < 0) throw std::domain_error("generator: k must be non-negative");
  std::mt19937_64 rng(derive_seed(seed, 0));
  std::vector<char> flags;
  generate_protected_flags(k, p, rng, flags);
  RankedSequence out;
  out.reserve(flags.size());
  int next_protected = 1;
  int next_other = 1;
  for (int i = 0; i < k; ++i) {
    const bool prot = flags[static_cast<std::size_t>(i)] != 0;
    std::string id = prot ? "p" + std::to_string(next_protected++)
                          : "n" + std::to_string(next_other++);
    out.push_back({std::move(id), prot, static_cast<double>(k - i)});
  }
  return out;
}

}  // namespace fairtopk
