#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace evoset {

struct SampleMoments {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased

  double std_error() const;
};

SampleMoments moments(std::span<const double> xs);

/// Running Welford accumulator.
class MomentAccumulator {
 public:
  void add(double x);
  void merge(const MomentAccumulator& other);
  SampleMoments result() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// sup_x |F_n(x) - F(x)| for the empirical CDF of `xs`.
double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf);

/// Asymptotic Kolmogorov p-value with the Stephens small-sample correction.
double ks_pvalue(double statistic, std::size_t n);

/// Total-variation distance between two probability vectors of equal length.
double tv_distance(std::span<const double> p, std::span<const double> q);

}  // namespace evoset
