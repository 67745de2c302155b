#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fairtopk/kernels.hpp"

using namespace fairtopk::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Vector variants may contract a*b+c into one rounding; allow a few ulps.
bool close(double a, double b, double scale) { return std::abs(a - b) <= 1e-14 * std::max(1.0, scale); }

}  // namespace

TEST_CASE("scalar kernels reference semantics") {
  const auto& k = scalar_kernels();
  std::vector<double> dst{1, 2, 3}, src{1, 1, 2};
  k.axpy(dst.data(), src.data(), 3, 0.5);
  CHECK(dst == std::vector<double>{1.5, 2.5, 4.0});

  std::vector<double> out(4);
  const std::vector<double> dist{0.25, 0.5, 0.25};
  k.lattice_step(out.data(), dist.data(), 3, 0.5, 0.5);
  CHECK(out == std::vector<double>{0.125, 0.375, 0.375, 0.125});

  CHECK(k.dot(src.data(), dst.data(), 3) == doctest::Approx(1.5 + 2.5 + 8.0));
  CHECK(k.dot(src.data(), dst.data(), 0) == 0.0);
}

TEST_CASE("available kernels start with scalar and include the active one") {
  const auto all = available_kernels();
  REQUIRE(!all.empty());
  CHECK(all.front() == &scalar_kernels());
  bool found = false;
  for (const auto* k : all) found = found || k == &active_kernels();
  CHECK(found);
  MESSAGE("active kernels: " << active_kernels().name);
}

TEST_CASE("vector variants match scalar on every length and alignment") {
  std::mt19937_64 rng(7);
  const auto& ref = scalar_kernels();
  for (const auto* variant : available_kernels()) {
    CAPTURE(variant->name);
    for (std::size_t n = 0; n <= 70; ++n) {
      for (std::size_t offset = 0; offset < 3; ++offset) {
        auto a = random_vector(n + offset, rng);
        auto b = random_vector(n + offset, rng);
        auto d1 = random_vector(n + offset + 1, rng);
        auto d2 = d1;

        ref.axpy(d1.data() + offset, a.data() + offset, n, 0.37);
        variant->axpy(d2.data() + offset, a.data() + offset, n, 0.37);
        for (std::size_t i = 0; i < d1.size(); ++i) REQUIRE(close(d1[i], d2[i], 1.0));

        std::vector<double> l1(n + 1 + offset, -9.0), l2 = l1;
        ref.lattice_step(l1.data() + offset, a.data() + offset, n, 0.7, 0.3);
        variant->lattice_step(l2.data() + offset, a.data() + offset, n, 0.7, 0.3);
        for (std::size_t i = 0; i < l1.size(); ++i) REQUIRE(close(l1[i], l2[i], 1.0));

        const double r1 = ref.dot(a.data() + offset, b.data() + offset, n);
        const double r2 = variant->dot(a.data() + offset, b.data() + offset, n);
        REQUIRE(close(r1, r2, static_cast<double>(n)));
      }
    }
  }
}

TEST_CASE("lattice step preserves probability mass") {
  for (const auto* variant : available_kernels()) {
    std::vector<double> dist{1.0};
    for (int step = 0; step < 500; ++step) {
      std::vector<double> next(dist.size() + 1);
      variant->lattice_step(next.data(), dist.data(), dist.size(), 0.6, 0.4);
      dist.swap(next);
    }
    double total = 0.0;
    for (double x : dist) total += x;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("span wrappers dispatch to the active table") {
  std::vector<double> a{1, 2, 3, 4, 5}, b{5, 4, 3, 2, 1};
  CHECK(dot(a, b) == doctest::Approx(35.0));
  axpy(a, b, 2.0);
  CHECK(a == std::vector<double>{11, 10, 9, 8, 7});
  std::vector<double> out(6);
  lattice_step(out, b, 1.0, 0.0);
  CHECK(out == std::vector<double>{5, 4, 3, 2, 1, 0});
}
