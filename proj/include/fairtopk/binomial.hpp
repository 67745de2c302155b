#pragma once
// Binomial distribution primitives: pmf, lower-tail cdf and the percent point
// (inverse cdf) used to derive minimum protected counts.

#include <vector>

namespace fairtopk {

// Parameters of Bin(trials, success_prob). Construction validates
// trials >= 0 and 0 < success_prob < 1 (std::domain_error otherwise).
class BinomialParams {
 public:
  BinomialParams(int trials, double success_prob);

  int trials() const { return trials_; }
  double success_prob() const { return success_prob_; }

 private:
  int trials_;
  double success_prob_;
};

// Pr(X = x). Throws std::domain_error when x is outside [0, trials].
double binomial_pmf(int x, const BinomialParams& params);

// F(x) = Pr(X <= x). Throws std::domain_error when x is outside [0, trials].
double binomial_cdf(int x, const BinomialParams& params);

// Smallest x in [0, trials] with F(x) > alpha. Requires 0 < alpha < 1.
int binomial_percent_point(double alpha, const BinomialParams& params);

// Full probability mass vector (length trials + 1).
//
// Seeded at the mode in log space and filled outwards with the ratio
// recurrence pmf(x+1) = pmf(x) * (n-x)/(x+1) * p/(1-p), so nothing overflows
// and only the far tails underflow. The vector is renormalized with a
// compensated sum so the support adds to one.
std::vector<double> binomial_pmf_vector(const BinomialParams& params);

}  // namespace fairtopk
