#include "tesslab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace tesslab::stats {

double DiscreteDistribution::total() const {
  return std::accumulate(p.begin(), p.end(), 0.0) + tail;
}

double DiscreteDistribution::mean() const {
  double m = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) m += static_cast<double>(k) * p[k];
  return m;
}

DiscreteDistribution poisson_pmf(double mean, int k_max) {
  if (mean < 0.0) throw std::invalid_argument("poisson_pmf: negative mean");
  DiscreteDistribution d;
  d.p.resize(static_cast<std::size_t>(k_max) + 1, 0.0);
  if (mean == 0.0) {
    d.p[0] = 1.0;
    return d;
  }
  double cum = 0.0;
  for (int k = 0; k <= k_max; ++k) {
    const double log_p = k * std::log(mean) - mean - std::lgamma(k + 1.0);
    d.p[static_cast<std::size_t>(k)] = std::exp(log_p);
    cum += d.p[static_cast<std::size_t>(k)];
  }
  d.tail = std::max(0.0, 1.0 - cum);
  return d;
}

DiscreteDistribution bernoulli_sum_distribution(std::span<const double> probs) {
  DiscreteDistribution d;
  d.p.assign(probs.size() + 1, 0.0);
  d.p[0] = 1.0;
  std::size_t support = 0;
  for (const double pi : probs) {
    if (pi < 0.0 || pi > 1.0) throw std::invalid_argument("bernoulli_sum: probability outside [0,1]");
    for (std::size_t k = support + 1; k-- > 0;) {
      d.p[k + 1] += d.p[k] * pi;
      d.p[k] *= (1.0 - pi);
    }
    ++support;
  }
  return d;
}

double JointDistribution::at(std::span<const int> t) const {
  std::size_t idx = 0;
  for (int j = 0; j < K; ++j) idx = idx * static_cast<std::size_t>(size_per_dim) + static_cast<std::size_t>(t[static_cast<std::size_t>(j)]);
  return table[idx];
}

DiscreteDistribution JointDistribution::marginal(int j) const {
  DiscreteDistribution d;
  d.p.assign(static_cast<std::size_t>(size_per_dim), 0.0);
  std::size_t stride = 1;
  for (int axis = K - 1; axis > j; --axis) stride *= static_cast<std::size_t>(size_per_dim);
  for (std::size_t idx = 0; idx < table.size(); ++idx) {
    const std::size_t t_j = (idx / stride) % static_cast<std::size_t>(size_per_dim);
    d.p[t_j] += table[idx];
  }
  return d;
}

JointDistribution multinomial_occupancy_distribution(const std::vector<std::vector<double>>& probs,
                                                     std::size_t state_cap) {
  if (probs.empty()) throw std::invalid_argument("multinomial_occupancy: no trials");
  const int K = static_cast<int>(probs.front().size());
  const int n = static_cast<int>(probs.size());
  const int dim = n + 1;
  std::size_t states = 1;
  for (int j = 0; j < K; ++j) {
    states *= static_cast<std::size_t>(dim);
    if (states > state_cap) throw std::length_error("multinomial_occupancy: state space exceeds cap");
  }
  JointDistribution joint;
  joint.K = K;
  joint.size_per_dim = dim;
  joint.table.assign(states, 0.0);
  joint.table[0] = 1.0;

  std::vector<std::size_t> strides(static_cast<std::size_t>(K));
  std::size_t s = 1;
  for (int j = K - 1; j >= 0; --j) {
    strides[static_cast<std::size_t>(j)] = s;
    s *= static_cast<std::size_t>(dim);
  }

  std::vector<double> next(states);
  for (int trial = 0; trial < n; ++trial) {
    const auto& row = probs[static_cast<std::size_t>(trial)];
    if (static_cast<int>(row.size()) != K)
      throw std::invalid_argument("multinomial_occupancy: ragged probability rows");
    double p0 = 1.0;
    for (double pj : row) p0 -= pj;
    if (p0 < -1e-12) throw std::invalid_argument("multinomial_occupancy: probabilities exceed 1");
    p0 = std::max(p0, 0.0);
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t idx = 0; idx < states; ++idx) {
      const double mass = joint.table[idx];
      if (mass == 0.0) continue;
      next[idx] += mass * p0;
      for (int j = 0; j < K; ++j) {
        const std::size_t t_j = (idx / strides[static_cast<std::size_t>(j)]) % static_cast<std::size_t>(dim);
        if (static_cast<int>(t_j) < n) next[idx + strides[static_cast<std::size_t>(j)]] += mass * row[static_cast<std::size_t>(j)];
      }
    }
    joint.table.swap(next);
  }
  return joint;
}

JointDistribution product_of_poissons(std::span<const double> means, int size_per_dim) {
  JointDistribution joint;
  joint.K = static_cast<int>(means.size());
  joint.size_per_dim = size_per_dim;
  std::vector<DiscreteDistribution> marg;
  marg.reserve(means.size());
  for (double m : means) marg.push_back(poisson_pmf(m, size_per_dim - 1));
  std::size_t states = 1;
  for (int j = 0; j < joint.K; ++j) states *= static_cast<std::size_t>(size_per_dim);
  joint.table.assign(states, 0.0);
  for (std::size_t idx = 0; idx < states; ++idx) {
    double prod = 1.0;
    std::size_t rest = idx;
    for (int j = joint.K - 1; j >= 0; --j) {
      const std::size_t t_j = rest % static_cast<std::size_t>(size_per_dim);
      rest /= static_cast<std::size_t>(size_per_dim);
      prod *= marg[static_cast<std::size_t>(j)].p[t_j];
    }
    joint.table[idx] = prod;
  }
  return joint;
}

double joint_l1(const JointDistribution& a, const JointDistribution& b) {
  if (a.table.size() != b.table.size()) throw std::invalid_argument("joint_l1: mismatched grids");
  double l1 = 0.0;
  for (std::size_t i = 0; i < a.table.size(); ++i) l1 += std::abs(a.table[i] - b.table[i]);
  // Mass outside the grid (only the Poisson side has any) counts fully.
  const double ta = 1.0 - std::accumulate(a.table.begin(), a.table.end(), 0.0);
  const double tb = 1.0 - std::accumulate(b.table.begin(), b.table.end(), 0.0);
  return l1 + std::abs(ta) + std::abs(tb);
}

double l1_distance(const DiscreteDistribution& a, const DiscreteDistribution& b) {
  const std::size_t n = std::max(a.p.size(), b.p.size());
  double l1 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double pa = k < a.p.size() ? a.p[k] : 0.0;
    const double pb = k < b.p.size() ? b.p[k] : 0.0;
    l1 += std::abs(pa - pb);
  }
  return l1 + std::abs(a.tail - b.tail);
}

double tv_distance(const DiscreteDistribution& a, const DiscreteDistribution& b) {
  return 0.5 * l1_distance(a, b);
}

namespace {

/// Regularized lower incomplete gamma P(a, x) by series expansion.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < 1000; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/// Regularized upper incomplete gamma Q(a, x) by continued fraction.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: domain");
  if (x == 0.0) return 1.0;
  return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

std::string TestReport::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["statistic"] = statistic;
  j["df"] = df;
  j["p_value"] = p_value;
  j["distance"] = distance;
  j["threshold"] = threshold;
  j["pass"] = pass;
  j["seed"] = seed;
  j["sample_size"] = sample_size;
  return j.dump();
}

namespace {

/// Pool (observed, expected) pairs from the right tail until each expected
/// count reaches the minimum.
void pool_bins(std::vector<double>& obs, std::vector<double>& expd, double min_expected) {
  // Fold from the right.
  while (expd.size() > 1 && expd.back() < min_expected) {
    expd[expd.size() - 2] += expd.back();
    obs[obs.size() - 2] += obs.back();
    expd.pop_back();
    obs.pop_back();
  }
  // Then from the left.
  std::size_t start = 0;
  while (start + 1 < expd.size() && expd[start] < min_expected) {
    expd[start + 1] += expd[start];
    obs[start + 1] += obs[start];
    ++start;
  }
  obs.erase(obs.begin(), obs.begin() + static_cast<std::ptrdiff_t>(start));
  expd.erase(expd.begin(), expd.begin() + static_cast<std::ptrdiff_t>(start));
}

}  // namespace

TestReport chi_square_gof(std::span<const long> counts, const DiscreteDistribution& reference,
                          double min_expected, double p_floor) {
  const long n = std::accumulate(counts.begin(), counts.end(), 0L);
  if (n < 50) throw std::invalid_argument("chi_square_gof: needs at least 50 observations");
  const std::size_t bins = std::max(counts.size(), reference.p.size());
  std::vector<double> obs(bins, 0.0), expd(bins, 0.0);
  for (std::size_t k = 0; k < bins; ++k) {
    obs[k] = k < counts.size() ? static_cast<double>(counts[k]) : 0.0;
    const double pk = k < reference.p.size() ? reference.p[k] : 0.0;
    expd[k] = static_cast<double>(n) * pk;
  }
  expd.back() += static_cast<double>(n) * reference.tail;
  pool_bins(obs, expd, min_expected);
  if (obs.size() < 2) throw std::invalid_argument("chi_square_gof: insufficient data after pooling");
  double stat = 0.0;
  for (std::size_t k = 0; k < obs.size(); ++k) {
    const double diff = obs[k] - expd[k];
    stat += diff * diff / expd[k];
  }
  TestReport rep;
  rep.name = "chi_square_gof";
  rep.statistic = stat;
  rep.df = static_cast<double>(obs.size() - 1);
  rep.p_value = gamma_q(0.5 * rep.df, 0.5 * stat);
  rep.threshold = p_floor;
  rep.pass = rep.p_value > p_floor;
  rep.sample_size = n;
  return rep;
}

TestReport chi_square_two_sample(std::span<const long> counts_a, std::span<const long> counts_b,
                                 double min_expected, double p_floor) {
  const std::size_t bins = std::max(counts_a.size(), counts_b.size());
  const double na = static_cast<double>(std::accumulate(counts_a.begin(), counts_a.end(), 0L));
  const double nb = static_cast<double>(std::accumulate(counts_b.begin(), counts_b.end(), 0L));
  if (na <= 0.0 || nb <= 0.0) throw std::invalid_argument("chi_square_two_sample: empty sample");
  std::vector<double> oa(bins, 0.0), ob(bins, 0.0);
  for (std::size_t k = 0; k < bins; ++k) {
    oa[k] = k < counts_a.size() ? static_cast<double>(counts_a[k]) : 0.0;
    ob[k] = k < counts_b.size() ? static_cast<double>(counts_b[k]) : 0.0;
  }
  // Pool on the combined expected counts.
  std::vector<double> pooled(bins);
  for (std::size_t k = 0; k < bins; ++k) pooled[k] = oa[k] + ob[k];
  // Merge adjacent bins until each pooled bin holds enough mass for both
  // samples' expectations.
  std::vector<double> pa, pb;
  double acc_a = 0.0, acc_b = 0.0, acc = 0.0;
  const double need = min_expected * (na + nb) / std::min(na, nb);
  for (std::size_t k = 0; k < bins; ++k) {
    acc_a += oa[k];
    acc_b += ob[k];
    acc += pooled[k];
    if (acc >= need || k + 1 == bins) {
      pa.push_back(acc_a);
      pb.push_back(acc_b);
      acc_a = acc_b = acc = 0.0;
    }
  }
  if (pa.size() >= 2 && pa.back() + pb.back() < need) {
    pa[pa.size() - 2] += pa.back();
    pb[pb.size() - 2] += pb.back();
    pa.pop_back();
    pb.pop_back();
  }
  if (pa.size() < 2) throw std::invalid_argument("chi_square_two_sample: insufficient data after pooling");
  double stat = 0.0;
  for (std::size_t k = 0; k < pa.size(); ++k) {
    const double tot = pa[k] + pb[k];
    const double ea = tot * na / (na + nb);
    const double eb = tot * nb / (na + nb);
    stat += (pa[k] - ea) * (pa[k] - ea) / ea + (pb[k] - eb) * (pb[k] - eb) / eb;
  }
  TestReport rep;
  rep.name = "chi_square_two_sample";
  rep.statistic = stat;
  rep.df = static_cast<double>(pa.size() - 1);
  rep.p_value = gamma_q(0.5 * rep.df, 0.5 * stat);
  rep.threshold = p_floor;
  rep.pass = rep.p_value > p_floor;
  rep.sample_size = static_cast<long>(na + nb);
  return rep;
}

double correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("correlation: bad input");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
    sab += (a[i] - ma) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

IndependenceReport independence_test(std::span<const int> first, std::span<const int> second,
                                     double p_floor) {
  if (first.size() != second.size() || first.size() < 500)
    throw std::invalid_argument("independence_test: needs >= 500 paired replicates");
  std::vector<double> a(first.begin(), first.end());
  std::vector<double> b(second.begin(), second.end());
  IndependenceReport rep;
  rep.correlation = correlation(a, b);
  rep.corr_stderr = 1.0 / std::sqrt(static_cast<double>(first.size()));

  // Contingency chi-square over the (pooled) joint table.
  const int cap = 4;  // pool counts >= cap into one category
  const int dim = cap + 1;
  std::vector<double> table(static_cast<std::size_t>(dim) * dim, 0.0);
  std::vector<double> row(static_cast<std::size_t>(dim), 0.0), col(static_cast<std::size_t>(dim), 0.0);
  for (std::size_t i = 0; i < first.size(); ++i) {
    const int x = std::min(first[i], cap);
    const int y = std::min(second[i], cap);
    table[static_cast<std::size_t>(x) * dim + static_cast<std::size_t>(y)] += 1.0;
    row[static_cast<std::size_t>(x)] += 1.0;
    col[static_cast<std::size_t>(y)] += 1.0;
  }
  const double n = static_cast<double>(first.size());
  double stat = 0.0;
  int used_rows = 0, used_cols = 0;
  for (int x = 0; x < dim; ++x)
    if (row[static_cast<std::size_t>(x)] > 0.0) ++used_rows;
  for (int y = 0; y < dim; ++y)
    if (col[static_cast<std::size_t>(y)] > 0.0) ++used_cols;
  for (int x = 0; x < dim; ++x) {
    for (int y = 0; y < dim; ++y) {
      const double e = row[static_cast<std::size_t>(x)] * col[static_cast<std::size_t>(y)] / n;
      if (e <= 0.0) continue;
      const double o = table[static_cast<std::size_t>(x) * dim + static_cast<std::size_t>(y)];
      stat += (o - e) * (o - e) / e;
    }
  }
  rep.contingency.name = "independence_contingency";
  rep.contingency.statistic = stat;
  rep.contingency.df = static_cast<double>((used_rows - 1) * (used_cols - 1));
  rep.contingency.p_value = rep.contingency.df > 0.0 ? gamma_q(0.5 * rep.contingency.df, 0.5 * stat) : 1.0;
  rep.contingency.threshold = p_floor;
  rep.contingency.pass = rep.contingency.p_value > p_floor;
  rep.contingency.sample_size = static_cast<long>(first.size());
  return rep;
}

Histogram Histogram::with_bins(double lo, double hi, int bins) {
  Histogram h;
  h.lo = lo;
  h.width = (hi - lo) / bins;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  return h;
}

void Histogram::add(double x) {
  const int bins = static_cast<int>(counts.size());
  int idx = static_cast<int>(std::floor((x - lo) / width));
  idx = std::clamp(idx, 0, bins - 1);
  ++counts[static_cast<std::size_t>(idx)];
}

long Histogram::total() const { return std::accumulate(counts.begin(), counts.end(), 0L); }

}  // namespace tesslab::stats
