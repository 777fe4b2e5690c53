#include "evoset/stats.hpp"

#include <algorithm>
#include <cmath>

#include "evoset/error.hpp"

namespace evoset {

double SampleMoments::std_error() const {
  return count == 0 ? 0.0 : std::sqrt(variance / static_cast<double>(count));
}

void MomentAccumulator::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double total = static_cast<double>(n_ + other.n_);
  const double delta = other.mean_ - mean_;
  mean_ += delta * static_cast<double>(other.n_) / total;
  m2_ += other.m2_ + delta * delta * static_cast<double>(n_) * static_cast<double>(other.n_) / total;
  n_ += other.n_;
}

SampleMoments MomentAccumulator::result() const {
  SampleMoments m;
  m.count = n_;
  m.mean = mean_;
  m.variance = n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  return m;
}

SampleMoments moments(std::span<const double> xs) {
  MomentAccumulator acc;
  for (double x : xs) acc.add(x);
  return acc.result();
}

double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  if (xs.empty()) fail(ErrorCode::kInvalidArgument, "KS statistic of an empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_pvalue(double statistic, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * statistic;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::fabs(term) < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) fail(ErrorCode::kInvalidArgument, "TV distance of unequal supports");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += std::fabs(p[i] - q[i]);
  return 0.5 * total;
}

}  // namespace evoset
