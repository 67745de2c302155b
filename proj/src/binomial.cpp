#include "fairtopk/binomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fairtopk/compensated_sum.hpp"

namespace fairtopk {

BinomialParams::BinomialParams(int trials, double success_prob)
    : trials_(trials), success_prob_(success_prob) {
  if (trials < 0) throw std::domain_error("binomial: trials must be non-negative");
  if (!(success_prob > 0.0 && success_prob < 1.0)) {
    throw std::domain_error("binomial: success probability must lie in (0, 1), got " +
                            std::to_string(success_prob));
  }
}

std::vector<double> binomial_pmf_vector(const BinomialParams& params) {
  const int n = params.trials();
  const double p = params.success_prob();
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
  if (n == 0) {
    pmf[0] = 1.0;
    return pmf;
  }

  const int mode = std::min(n, static_cast<int>(std::floor((n + 1) * p)));
  const double log_mode = std::lgamma(n + 1.0) - std::lgamma(mode + 1.0) -
                          std::lgamma(n - mode + 1.0) + mode * std::log(p) +
                          (n - mode) * std::log1p(-p);
  pmf[mode] = std::exp(log_mode);

  const double odds = p / (1.0 - p);
  for (int x = mode; x < n; ++x) {
    const double next = pmf[x] * (static_cast<double>(n - x) / (x + 1)) * odds;
    if (next == 0.0) break;
    pmf[x + 1] = next;
  }
  for (int x = mode; x > 0; --x) {
    const double prev = pmf[x] * (static_cast<double>(x) / (n - x + 1)) / odds;
    if (prev == 0.0) break;
    pmf[x - 1] = prev;
  }

  CompensatedSum total;
  for (double v : pmf) total += v;
  const double scale = 1.0 / total.value();
  for (double& v : pmf) v *= scale;
  return pmf;
}

namespace {

void check_support(int x, const BinomialParams& params) {
  if (x < 0 || x > params.trials()) {
    throw std::domain_error("binomial: x=" + std::to_string(x) + " outside [0, " +
                            std::to_string(params.trials()) + "]");
  }
}

}  // namespace

double binomial_pmf(int x, const BinomialParams& params) {
  check_support(x, params);
  return binomial_pmf_vector(params)[x];
}

double binomial_cdf(int x, const BinomialParams& params) {
  check_support(x, params);
  if (x == params.trials()) return 1.0;
  const auto pmf = binomial_pmf_vector(params);
  CompensatedSum acc;
  for (int j = 0; j <= x; ++j) acc += pmf[j];
  return std::clamp(acc.value(), 0.0, 1.0);
}

int binomial_percent_point(double alpha, const BinomialParams& params) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("binomial: alpha must lie in (0, 1)");
  }
  const auto pmf = binomial_pmf_vector(params);
  CompensatedSum acc;
  for (int x = 0; x < params.trials(); ++x) {
    acc += pmf[x];
    if (acc.value() > alpha) return x;
  }
  return params.trials();
}

}  // namespace fairtopk
