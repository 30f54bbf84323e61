#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "acd/errors.hpp"
#include "acd/rng.hpp"
#include "acd/sequential.hpp"
#include "acd/stats.hpp"

using namespace acd;
using objective::Params;

TEST_CASE("zero steps records the initial value") {
  Params p{10, 1.0 / 18.0, 1.0, 1.0};
  const auto traj = sequential::run_sequential(p, 0, 1);
  REQUIRE(traj.f_values.size() == 1);
  CHECK(traj.f_values[0] == doctest::Approx((1.0 - p.eps) * 10 / 2.0));
  CHECK(traj.s_values[0] == 10.0);
  CHECK(traj.s1_values[0] == 5.0);
  CHECK(traj.sm1_values[0] == 5.0);
}

TEST_CASE("hand-evaluated first step") {
  Params p{2, 0.1, 1.0, 1.0};
  const std::vector<std::int64_t> coords{0};
  const auto traj = sequential::run_with_choices(p, coords);
  // x = (-1, 1), grad_1 = 0.9 * -1 + 0.1 * 0 = -0.9, so x_1 becomes -0.1.
  // f(-0.1, 1) = 0.45 * 1.01 + 0.05 * 0.81.
  CHECK(traj.f_values[1] == doctest::Approx(0.45 * 1.01 + 0.05 * 0.81).epsilon(1e-15));
  CHECK(traj.sm1_values[1] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(traj.s1_values[1] == 1.0);
}

TEST_CASE("huge step divisor freezes the point") {
  Params p{8, 1.0 / 18.0, 1e15, 1.0};
  const auto traj = sequential::run_sequential(p, 100, 4);
  for (double f : traj.f_values) CHECK(f == doctest::Approx(traj.f_values[0]).epsilon(1e-12));
}

TEST_CASE("sum identity and monotone decrease") {
  Params p{50, 1.0 / 18.0, 1.0, 1.0};
  const auto traj = sequential::run_sequential(p, 5000, 9);
  for (std::size_t t = 0; t < traj.f_values.size(); ++t) {
    CHECK(traj.s_values[t] == doctest::Approx(traj.s1_values[t] + traj.sm1_values[t]).epsilon(1e-14));
    if (t > 0) CHECK(traj.f_values[t] <= traj.f_values[t - 1] + 1e-12);
  }
}

TEST_CASE("incremental sums survive the periodic recompute") {
  Params p{6, 0.05, 1.0, 1.0};
  const std::int64_t steps = sequential::kRecomputeInterval + 10;
  std::vector<std::int64_t> coords(static_cast<std::size_t>(steps));
  for (std::int64_t t = 0; t < steps; ++t) coords[static_cast<std::size_t>(t)] = sequential::coordinate_at(6, 2, 0, t + 1);
  const auto a = sequential::run_with_choices(p, coords);
  const auto b = sequential::run_sequential(p, steps, 2);
  CHECK(a.f_values == b.f_values);
}

TEST_CASE("expected sum curve and bounds") {
  Params p{100, 1.0 / 18.0, 1.0, 1.0};
  const auto e = sequential::expected_sum_curve(p, 100);
  CHECK(e[0] == 100.0);
  CHECK(e[100] == doctest::Approx(100.0 * std::pow(1.0 - (17.0 / 18.0) / 100.0, 100)).epsilon(1e-13));

  const auto b = sequential::rate_bounds(p, 300);
  const double f0 = (17.0 / 18.0) * 100 / 2.0;
  CHECK(b.lower[0] == doctest::Approx(f0));
  CHECK(b.upper[0] == doctest::Approx(f0));
  CHECK(b.lower[300] == doctest::Approx(std::pow(1.0 - 17.0 / 900.0, 300) * f0).epsilon(1e-13));
  CHECK(b.upper[300] == doctest::Approx(std::pow(1.0 - 17.0 / 5400.0, 300) * f0).epsilon(1e-13));
  for (std::size_t t = 1; t < b.lower.size(); ++t) {
    CHECK(b.lower[t] <= b.upper[t]);
    CHECK(b.lower[t] / b.upper[t] <= b.lower[t - 1] / b.upper[t - 1] * (1 + 1e-14));
  }
}

TEST_CASE("one-step expectation of S") {
  // From a fixed non-initial state, E[S(t+1) - S(t)] = -(1-eps)/(n gamma) S(t).
  Params p{20, 1.0 / 18.0, 1.5, 1.0};
  CounterRng rng(77, 0, Stream::state);
  std::vector<double> x(20);
  for (auto& v : x) v = rng.uniform(-1.0, 1.0);
  const double sum = std::accumulate(x.begin(), x.end(), 0.0);
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += (j % 2 == 1) ? x[j] : -x[j];

  RunningStats step;
  for (int k = 0; k < 100000; ++k) {
    const auto j = static_cast<std::size_t>(rng.below(20));
    const double d = -objective::partial_gradient_from_sum(p, x[j], sum) / p.gamma;
    step.add((j % 2 == 1) ? d : -d);
  }
  const double expected = -(1.0 - p.eps) / (20.0 * p.gamma) * s;
  CHECK(std::abs(step.mean() - expected) <= 4.0 * step.standard_error());
}

TEST_CASE("parity-preserving relabeling gives the same trajectory") {
  Params p{12, 1.0 / 18.0, 1.0, 1.0};
  // Even indices among themselves, odd among themselves.
  const std::vector<std::int64_t> perm{4, 9, 0, 11, 10, 1, 2, 3, 6, 7, 8, 5};
  std::vector<std::int64_t> coords, mapped;
  for (std::int64_t t = 1; t <= 3000; ++t) {
    const auto j = sequential::coordinate_at(12, 31, 0, t);
    coords.push_back(j);
    mapped.push_back(perm[static_cast<std::size_t>(j)]);
  }
  const auto a = sequential::run_with_choices(p, coords);
  const auto b = sequential::run_with_choices(p, mapped);
  CHECK(a.f_values == b.f_values);
  CHECK(a.s_values == b.s_values);
}

TEST_CASE("monte carlo preconditions, determinism, and thread independence") {
  Params p{20, 1.0 / 18.0, 1.0, 1.0};
  CHECK_THROWS_AS(sequential::monte_carlo_sequential(p, 1, 10, 1), PreconditionError);
  const auto a = sequential::monte_carlo_sequential(p, 50, 300, 5, 1);
  const auto b = sequential::monte_carlo_sequential(p, 50, 300, 5, 4);
  CHECK(a.f_mean == b.f_mean);
  CHECK(a.s_se == b.s_se);
  const auto v = sequential::check_sandwich(p, a);
  CHECK(v.sandwich_ok);
  CHECK(v.expected_sum_ok);
}

TEST_CASE("csv output") {
  Params p{4, 0.05, 1.0, 1.0};
  std::ostringstream out;
  sequential::write_csv(out, p, sequential::run_sequential(p, 0, 1));
  const std::string s = out.str();
  CHECK(s.rfind("t,f,S,S1,Sm1,lower_bound,upper_bound\n0,", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 2);

  std::ostringstream again;
  sequential::write_csv(again, p, sequential::run_sequential(p, 0, 1));
  CHECK(again.str() == s);
}
