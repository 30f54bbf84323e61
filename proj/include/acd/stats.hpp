#pragma once

#include <cstdint>
#include <utility>

namespace acd {

// Streaming mean/variance (Welford) with an associative merge (Chan et al.).
class RunningStats {
 public:
  void add(double x);
  void merge(const RunningStats& other);

  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;  // unbiased; 0 when count < 2
  double stddev() const;
  double standard_error() const;  // stddev / sqrt(count)

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct Interval {
  double lo;
  double hi;
};

// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z);

// Standard error of an empirical proportion, sqrt(p(1-p)/n).
double proportion_standard_error(std::int64_t successes, std::int64_t trials);

// Neumaier-compensated sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace acd
