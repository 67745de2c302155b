#include "fairtopk/candidates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fairtopk {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string_view strip_leading_zeros(std::string_view s) {
  while (s.size() > 1 && s.front() == '0') s.remove_prefix(1);
  return s;
}

}  // namespace

bool id_less(std::string_view a, std::string_view b) {
  if (all_digits(a) && all_digits(b)) {
    const auto na = strip_leading_zeros(a);
    const auto nb = strip_leading_zeros(b);
    if (na.size() != nb.size()) return na.size() < nb.size();
    if (na != nb) return na < nb;
  }
  return a < b;
}

CandidatePool::CandidatePool(std::vector<Candidate> candidates)
    : candidates_(std::move(candidates)) {
  index_.reserve(candidates_.size());
  for (std::size_t i = 0; i < candidates_.size(); ++i) {
    const auto& c = candidates_[i];
    if (!std::isfinite(c.score)) {
      throw std::invalid_argument("candidate '" + c.id + "' has a non-finite score");
    }
    if (!index_.emplace(candidates_[i].id, i).second) {
      throw std::invalid_argument("duplicate candidate id '" + c.id + "'");
    }
    if (c.is_protected) ++protected_count_;
  }
}

std::optional<std::size_t> CandidatePool::index_of(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

}  // namespace fairtopk
