#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace tesslab::stats {

/// Probability vector over {0, ..., K} plus explicit tail mass beyond K.
struct DiscreteDistribution {
  std::vector<double> p;
  double tail = 0.0;

  double total() const;
  double mean() const;
  int max_k() const { return static_cast<int>(p.size()) - 1; }
};

/// Poisson pmf up to k_max (stable in log space for means up to ~1e3).
DiscreteDistribution poisson_pmf(double mean, int k_max);

/// Exact law of a sum of independent Bernoulli variables (convolution DP).
DiscreteDistribution bernoulli_sum_distribution(std::span<const double> probs);

/// Exact joint law of category-occupancy counts (T_1, ..., T_K) for
/// independent trials with per-trial category probabilities; trial i has
/// P(X_i = j) = probs[i][j-1] for j in 1..K (remaining mass is category 0).
/// Row-major joint table over {0..n}^K. Throws when the table would exceed
/// the state cap.
struct JointDistribution {
  int K = 0;
  int size_per_dim = 0;       // n + 1
  std::vector<double> table;  // row-major, index = sum_j t_j * (n+1)^(K-j)

  double at(std::span<const int> t) const;
  DiscreteDistribution marginal(int j) const;
};

JointDistribution multinomial_occupancy_distribution(const std::vector<std::vector<double>>& probs,
                                                     std::size_t state_cap = 200'000'000);

/// Product of independent Poisson laws on the same joint grid.
JointDistribution product_of_poissons(std::span<const double> means, int size_per_dim);

/// l1 distance between joint tables on the same grid.
double joint_l1(const JointDistribution& a, const JointDistribution& b);

/// Total-variation distance (1/2 l1, tails folded into a final bucket).
double tv_distance(const DiscreteDistribution& a, const DiscreteDistribution& b);
double l1_distance(const DiscreteDistribution& a, const DiscreteDistribution& b);

struct TestReport {
  std::string name;
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  double distance = 0.0;
  double threshold = 0.0;
  bool pass = true;
  std::uint64_t seed = 0;
  long sample_size = 0;

  std::string to_json() const;
};

/// Pearson chi-square goodness of fit of observed counts against a reference
/// distribution; bins are pooled from the tail until every expected count
/// reaches `min_expected`. Throws when fewer than two pooled bins remain.
TestReport chi_square_gof(std::span<const long> counts, const DiscreteDistribution& reference,
                          double min_expected = 5.0, double p_floor = 1e-3);

/// Two-sample chi-square on a common binning.
TestReport chi_square_two_sample(std::span<const long> counts_a, std::span<const long> counts_b,
                                 double min_expected = 5.0, double p_floor = 1e-3);

/// Independence diagnostics for paired counts: Pearson correlation with its
/// 1/sqrt(n) standard error, plus a pooled contingency chi-square.
struct IndependenceReport {
  double correlation = 0.0;
  double corr_stderr = 0.0;
  TestReport contingency;
};

IndependenceReport independence_test(std::span<const int> first, std::span<const int> second,
                                     double p_floor = 1e-3);

/// Pearson correlation of two equal-length samples.
double correlation(std::span<const double> a, std::span<const double> b);

/// Regularized upper incomplete gamma Q(a, x) (chi-square tail probability
/// is Q(df/2, x/2)).
double gamma_q(double a, double x);

/// Histogram with fixed bin edges [lo + i*w, lo + (i+1)*w), overflow and
/// underflow folded into the end bins.
struct Histogram {
  double lo = 0.0;
  double width = 1.0;
  std::vector<long> counts;

  static Histogram with_bins(double lo, double hi, int bins);
  void add(double x);
  long total() const;
};

}  // namespace tesslab::stats
