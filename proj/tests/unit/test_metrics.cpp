#include <doctest.h>

#include <cmath>
#include <random>

#include "fairtopk/fair_ranker.hpp"
#include "fairtopk/metrics.hpp"

using namespace fairtopk;

namespace {

// Pool whose scores already span [0, 1] so normalization is the identity.
CandidatePool unit_pool(std::vector<Candidate> extra) {
  extra.push_back({"lo", 0.0, false});
  extra.push_back({"hi", 1.0, false});
  return CandidatePool(std::move(extra));
}

RankedSequence entries(const CandidatePool& pool, const std::vector<std::string>& order) {
  RankedSequence r;
  for (const auto& id : order) r.push_back(to_entry(pool[*pool.index_of(id)]));
  return r;
}

CandidatePool small_instance() {
  return CandidatePool({{"np0.9", 0.9, false}, {"np0.8", 0.8, false}, {"np0.7", 0.7, false},
                        {"np0.6", 0.6, false}, {"p0.5", 0.5, true},   {"p0.4", 0.4, true}});
}

}  // namespace

TEST_CASE("normalization") {
  const NormalizedScores n(CandidatePool({{"a", 2, false}, {"b", 6, true}}));
  CHECK(n(2) == 0.0);
  CHECK(n(6) == 1.0);
  CHECK(n(3) == doctest::Approx(0.25));
  const NormalizedScores flat(CandidatePool({{"a", 5, false}, {"b", 5, true}}));
  CHECK(flat(5) == 1.0);
}

TEST_CASE("ranked utility examples") {
  const auto pool = unit_pool({{"a", 0.9, false}, {"b", 0.5, false}, {"c", 0.8, false}, {"x", 0.6, false}});
  const auto r = entries(pool, {"a", "b", "c"});
  CHECK(ranked_utility("c", r, pool) == doctest::Approx(-0.3));
  CHECK(ranked_utility("a", r, pool) == 0.0);
  CHECK(ranked_utility("b", r, pool) == 0.0);
  CHECK(ranked_utility("x", r, pool) == doctest::Approx(-0.1));
  CHECK(ranked_utility("lo", r, pool) == 0.0);
  CHECK_THROWS_AS(ranked_utility("nobody", r, pool), std::domain_error);
  const auto sorted = entries(pool, {"hi", "a", "c", "x", "b"});
  for (const auto& e : sorted) CHECK(ranked_utility(e.id, sorted, pool) == 0.0);
}

TEST_CASE("selection utility examples") {
  const auto pool = small_instance();
  CHECK(selection_utility(color_blind_topk(pool, 4), pool).utility == 0.0);
  const auto fair = fair_topk(pool, 4, 0.5, 0.1).entries;
  // Normalized over [0.4, 0.9]: (0.5 - 0.6) / 0.5.
  const auto s = selection_utility(fair, pool);
  CHECK(s.utility == doctest::Approx(-0.2));
  CHECK(s.candidate == "np0.6");

  const auto u = unit_pool({{"a", 0.9, false}, {"b", 0.5, true}, {"x", 0.6, false}});
  const auto r = entries(u, {"hi", "a", "b"});
  CHECK(selection_utility(r, u).utility == doctest::Approx(-0.1));
  CHECK(selection_utility(r, u).candidate == "x");
  CHECK(selection_utility(entries(u, {"hi", "a", "x"}), u).utility == 0.0);
}

TEST_CASE("ordering utility and rank drop examples") {
  const auto pool = unit_pool({{"p0.5", 0.5, true}, {"np0.9", 0.9, false}});
  const auto o = ordering_utility(entries(pool, {"p0.5", "np0.9"}), pool);
  CHECK(o.utility == doctest::Approx(-0.4));
  CHECK(o.candidate == "np0.9");
  // np0.9 sits second in the color-blind order (after hi) and fourth here.
  CHECK(ordering_utility(entries(pool, {"hi", "p0.5", "lo", "np0.9"}), pool).max_rank_drop == 2);

  const auto two = CandidatePool({{"p", 0.5, true}, {"n", 0.9, false}});
  const auto two_o = ordering_utility(entries(two, {"p", "n"}), two);
  CHECK(two_o.utility == doctest::Approx(-1.0));
  CHECK(two_o.max_rank_drop == 1);

  const auto inst = small_instance();
  const auto fair = ordering_utility(fair_topk(inst, 4, 0.5, 0.1).entries, inst);
  CHECK(fair.utility == 0.0);
  CHECK(fair.max_rank_drop == 0);
}

TEST_CASE("ndcg examples") {
  const auto pool = CandidatePool({{"a", 0.5, false}, {"b", 1.0, true}, {"z", 0.0, false}});
  const double expected = (0.5 + 1.0 / std::log2(3.0)) / (1.0 + 0.5 / std::log2(3.0));
  CHECK(ndcg(entries(pool, {"a", "b"}), pool, 2) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(0.8597).epsilon(1e-4));
  CHECK(ndcg(entries(pool, {"b", "a"}), pool, 2) == doctest::Approx(1.0));
  CHECK(ndcg(entries(pool, {"b"}), pool, 1) == doctest::Approx(1.0));
}

TEST_CASE("color-blind report is the identity point") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Candidate> c;
    const int n = 2 + static_cast<int>(rng() % 500);
    for (int i = 0; i < n; ++i) c.push_back({std::to_string(i), u(rng), rng() % 3 == 0});
    const CandidatePool pool(std::move(c));
    const int k = 1 + static_cast<int>(rng() % n);
    const auto rep = evaluate_ranking(color_blind_topk(pool, k), pool);
    CHECK(rep.ndcg == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.ordering_utility_loss == 0.0);
    CHECK(rep.selection_utility_loss == 0.0);
    CHECK(rep.max_rank_drop == 0);
    CHECK_FALSE(std::signbit(rep.ordering_utility_loss));
  }
}

TEST_CASE("metric ranges and monotone degradation in p") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Candidate> c;
    const int n = 200 + static_cast<int>(rng() % 800);
    for (int i = 0; i < n; ++i) {
      const bool prot = rng() % 10 < 4;
      c.push_back({std::to_string(i), nd(rng) - (prot ? 0.8 : 0.0), prot});
    }
    const CandidatePool pool(std::move(c));
    const int k = 20 + static_cast<int>(rng() % 150);
    double prev_ndcg = 2.0;
    for (double p = 0.1; p < 0.95; p += 0.1) {
      const auto rep = evaluate_ranking(fair_topk(pool, k, p, 0.05).entries, pool);
      CHECK(rep.ndcg >= 0.0);
      CHECK(rep.ndcg <= 1.0 + 1e-12);
      CHECK(rep.ordering_utility_loss >= 0.0);
      CHECK(rep.selection_utility_loss >= 0.0);
      CHECK(rep.max_rank_drop >= 0);
      CHECK(rep.protected_share >= 0.0);
      CHECK(rep.protected_share <= 1.0);
      CHECK(rep.ndcg <= prev_ndcg + 1e-12);
      prev_ndcg = rep.ndcg;
    }
  }
}
