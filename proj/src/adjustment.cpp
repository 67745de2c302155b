#include "fairtopk/adjustment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "fairtopk/baselines.hpp"
#include "fairtopk/binomial.hpp"
#include "fairtopk/compensated_sum.hpp"
#include "fairtopk/csv.hpp"
#include "fairtopk/kernels.hpp"

namespace fairtopk {

RecursionTrace fairness_recursion(const MTable& table) {
  RecursionTrace trace;
  const BlockDecomposition decomposition = decompose_blocks(table);
  const std::size_t required = decomposition.blocks.size();
  if (required == 0) return trace;

  // success[i]: probability of exactly i protected so far (last slot absorbs
  // counts >= m(k)), restricted to paths that met every block minimum.
  std::vector<double> success(required + 1, 0.0);
  std::vector<double> next(required + 1, 0.0);
  std::vector<double> suffix(required + 2, 0.0);
  success[0] = 1.0;
  std::unordered_map<int, std::vector<double>> pmf_by_size;
  CompensatedSum rejected;
  trace.surviving_mass.reserve(required);

  for (std::size_t j = 1; j <= required; ++j) {
    const int block = decomposition.blocks[j - 1];
    auto [it, inserted] = pmf_by_size.try_emplace(block);
    if (inserted) it->second = binomial_pmf_vector(BinomialParams(block, table.p()));
    const std::vector<double>& pmf = it->second;

    const std::size_t low = j - 1;  // entries below j-1 are already zero
    suffix[required + 1] = 0.0;
    for (std::size_t t = required + 1; t-- > low;) suffix[t] = suffix[t + 1] + success[t];

    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < pmf.size(); ++i) {
      const double weight = pmf[i];
      if (weight == 0.0) continue;
      if (low + i >= required) {
        next[required] += weight * suffix[low];
        continue;
      }
      const std::size_t len = required - i - low;
      kernels::axpy(std::span<double>(next.data() + low + i, len),
                    std::span<const double>(success.data() + low, len), weight);
      next[required] += weight * suffix[low + len];
    }
    rejected += next[j - 1];
    next[j - 1] = 0.0;
    std::swap(success, next);

    CompensatedSum mass;
    for (std::size_t t = j; t <= required; ++t) mass += success[t];
    trace.surviving_mass.push_back(mass.value());
  }
  trace.rejection = std::clamp(rejected.value(), 0.0, 1.0);
  return trace;
}

double rejection_probability(const MTable& table) { return fairness_recursion(table).rejection; }

double rejection_probability(int k, double p, double alpha_adj) {
  return rejection_probability(compute_mtable(k, p, alpha_adj));
}

double sidak_alpha(double alpha, int k) { return 1.0 - std::pow(1.0 - alpha, 1.0 / k); }

namespace {

struct Probe {
  double alpha_adj = 0.0;
  double rejection = 0.0;
  bool set = false;
};

}  // namespace

AdjustmentResult adjust_significance(int k, double p, double alpha_target,
                                     const AdjustmentTolerances& tol) {
  if (k < 1) throw std::domain_error("adjust: k must be at least 1");
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("adjust: p must lie in (0, 1)");
  if (!(alpha_target > 0.0 && alpha_target < 1.0)) {
    throw std::domain_error("adjust: alpha must lie in (0, 1)");
  }

  AdjustmentResult result;
  result.k = k;
  result.p = p;
  result.alpha_target = alpha_target;

  const auto evaluate = [&](double alpha_adj) {
    ++result.search_iterations;
    return rejection_probability(k, p, alpha_adj);
  };

  const auto finish = [&](double alpha_adj, double rejection, bool feasible) {
    // Prefer the six-decimal value when it selects the same table.
    const double rounded = MTableCache::canonical(alpha_adj);
    if (rounded > 0.0 && rounded < 1.0 && rounded != alpha_adj &&
        compute_mtable(k, p, rounded) == compute_mtable(k, p, alpha_adj)) {
      alpha_adj = rounded;
    }
    result.alpha_adj = alpha_adj;
    result.achieved_rejection = rejection;
    result.feasible = feasible;
    return result;
  };

  const double top = evaluate(alpha_target);
  if (std::fabs(top - alpha_target) <= tol.converged) return finish(alpha_target, top, true);
  if (top < alpha_target) {
    // Even the uncorrected test rejects too rarely; nothing in range crosses the target.
    return finish(alpha_target, top, std::fabs(top - alpha_target) <= tol.feasible);
  }

  Probe below;  // rejection <= target
  Probe above{alpha_target, top, true};
  double lo = tol.lower_bound;
  double hi = alpha_target;
  while (hi - lo > tol.min_width) {
    const double mid = 0.5 * (lo + hi);
    const double r = evaluate(mid);
    if (std::fabs(r - alpha_target) <= tol.converged) return finish(mid, r, true);
    if (r <= alpha_target) {
      lo = mid;
      below = {mid, r, true};
    } else {
      hi = mid;
      above = {mid, r, true};
    }
  }
  if (!below.set) below = {lo, evaluate(lo), true};

  const double gap_below = alpha_target - below.rejection;
  const double gap_above = above.rejection - alpha_target;
  if (std::min(gap_below, gap_above) <= tol.feasible) {
    return gap_below <= gap_above ? finish(below.alpha_adj, below.rejection, true)
                                  : finish(above.alpha_adj, above.rejection, true);
  }
  return finish(below.alpha_adj, below.rejection, false);
}

SimulationResult simulate_rejection_rate(int k, double p_generator, double p_test,
                                         double alpha_adj, std::int64_t trials,
                                         std::uint64_t seed, unsigned threads) {
  if (trials < 1) throw std::domain_error("simulate: trials must be at least 1");
  if (!(p_generator > 0.0 && p_generator < 1.0)) {
    throw std::domain_error("simulate: generator p must lie in (0, 1)");
  }
  const MTable table = compute_mtable(k, p_test, alpha_adj);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::int64_t>(threads, trials));
  std::vector<std::int64_t> rejections(threads, 0);

  const auto work = [&](unsigned worker) {
    std::vector<char> flags;
    const std::int64_t begin = trials * worker / threads;
    const std::int64_t end = trials * (worker + 1) / threads;
    std::int64_t local = 0;
    for (std::int64_t t = begin; t < end; ++t) {
      std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
      generate_protected_flags(k, p_generator, rng, flags);
      if (!verify_protected_flags(flags, table).fair) ++local;
    }
    rejections[worker] = local;
  };

  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }

  SimulationResult out;
  out.trials = trials;
  for (auto r : rejections) out.rejections += r;
  out.rate = static_cast<double>(out.rejections) / static_cast<double>(trials);
  out.std_error = std::sqrt(out.rate * (1.0 - out.rate) / static_cast<double>(trials));
  return out;
}

AdjustmentCache::Key AdjustmentCache::key_of(int k, double p, double alpha) {
  return {k, std::llround(p * 1e6), std::llround(alpha * 1e6)};
}

AdjustmentCache::AdjustmentCache(std::optional<std::filesystem::path> directory)
    : directory_(std::move(directory)) {
  if (!directory_) return;
  std::error_code ec;
  std::filesystem::create_directories(*directory_, ec);
  if (ec) {
    directory_.reset();
    return;
  }
  std::ifstream in(*directory_ / kFileName);
  if (!in) return;
  try {
    const CsvTable csv = read_csv(in);
    const auto ck = csv.column("k");
    const auto cp = csv.column("p");
    const auto ca = csv.column("alpha");
    const auto cadj = csv.column("alpha_adj");
    const auto crej = csv.column("achieved_rejection");
    const auto cfeas = csv.column("feasible");
    for (const auto& row : csv.rows) {
      AdjustmentResult r;
      r.k = std::stoi(row[ck]);
      r.p = std::stod(row[cp]);
      r.alpha_target = std::stod(row[ca]);
      r.alpha_adj = std::stod(row[cadj]);
      r.achieved_rejection = std::stod(row[crej]);
      r.feasible = row[cfeas] == "1" || row[cfeas] == "true";
      results_[key_of(r.k, r.p, r.alpha_target)] = r;
    }
  } catch (const std::exception&) {
    results_.clear();  // corrupt cache file: start over in memory
  }
}

void AdjustmentCache::append_to_disk(const AdjustmentResult& r) {
  if (!directory_) return;
  const auto path = *directory_ / kFileName;
  const bool fresh = !std::filesystem::exists(path);
  std::ofstream out(path, std::ios::app);
  if (!out) return;
  if (fresh) out << "k,p,alpha,alpha_adj,achieved_rejection,feasible\n";
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%.17g,%.17g,%d\n", r.k, r.p, r.alpha_target,
                r.alpha_adj, r.achieved_rejection, r.feasible ? 1 : 0);
  out << buf;
}

AdjustmentResult AdjustmentCache::get(int k, double p, double alpha) {
  const Key key = key_of(k, p, alpha);
  {
    std::lock_guard lock(mutex_);
    if (const auto it = results_.find(key); it != results_.end()) return it->second;
  }
  const AdjustmentResult computed = adjust_significance(k, p, alpha);
  std::lock_guard lock(mutex_);
  const auto [it, inserted] = results_.emplace(key, computed);
  if (inserted) append_to_disk(computed);
  return it->second;
}

}  // namespace fairtopk
