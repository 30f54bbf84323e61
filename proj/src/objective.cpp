#include "acd/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "acd/errors.hpp"
#include "acd/rng.hpp"
#include "acd/stats.hpp"

namespace acd::objective {

namespace {

// Allow eps given as a printed decimal of 1/18.
constexpr double kEpsSlack = 1e-12;

void check_dim(const Params& p, std::span<const double> x) {
  if (static_cast<std::int64_t>(x.size()) != p.n) {
    std::ostringstream msg;
    msg << "dimension mismatch: point has " << x.size() << " coordinates, expected " << p.n;
    throw PreconditionError(msg.str());
  }
}

double plain_sum(std::span<const double> x) {
  CompensatedSum s;
  for (double v : x) s.add(v);
  return s.value();
}

}  // namespace

void validate(const Params& p) {
  if (p.n < 2 || p.n % 2 != 0) {
    throw PreconditionError("n must be even and at least 2 (got " + std::to_string(p.n) + ")");
  }
  if (!(p.eps >= 0.0) || !(p.eps < 1.0)) {
    std::ostringstream msg;
    msg << "eps must satisfy 0 <= eps < 1 (got " << p.eps << ")";
    throw PreconditionError(msg.str());
  }
  if (!(p.gamma >= 1.0)) {
    std::ostringstream msg;
    msg << "gamma must be >= 1 (got " << p.gamma << ")";
    throw PreconditionError(msg.str());
  }
  if (!(p.lmax_scale > 0.0) || !std::isfinite(p.lmax_scale)) {
    throw PreconditionError("lmax_scale must be a positive finite number");
  }
}

void validate_stalling(const Params& p) {
  validate(p);
  if (!(p.eps > 0.0) || p.eps > kMaxEps * (1.0 + kEpsSlack)) {
    std::ostringstream msg;
    msg << "eps must satisfy 0 < eps <= 1/18 for the stalling construction (got " << p.eps << ")";
    throw PreconditionError(msg.str());
  }
}

Point initial_point(std::int64_t n) {
  Point x(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = initial_value(i);
  return x;
}

double eval(const Params& p, std::span<const double> x) {
  check_dim(p, x);
  CompensatedSum sq;
  for (double v : x) sq.add(v * v);
  return eval_from_sums(p, sq.value(), plain_sum(x));
}

double partial_gradient(const Params& p, std::span<const double> x, std::size_t j) {
  check_dim(p, x);
  if (j >= x.size()) {
    throw PreconditionError("coordinate index " + std::to_string(j) + " out of range");
  }
  return partial_gradient_from_sum(p, x[j], plain_sum(x));
}

std::vector<double> gradient(const Params& p, std::span<const double> x) {
  check_dim(p, x);
  const double s = plain_sum(x);
  std::vector<double> g(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) g[j] = partial_gradient_from_sum(p, x[j], s);
  return g;
}

LipschitzReport lipschitz_parameters(const Params& p) {
  const double n = static_cast<double>(p.n);
  const double lresbar = std::sqrt(1.0 + (n - 1.0) * p.eps * p.eps);
  LipschitzReport r;
  // Hessian is (1-eps) I + eps 11^T: diagonal 1, off-diagonal eps.
  r.lmax = p.lmax_scale;
  r.lresbar = p.lmax_scale * lresbar;
  r.lres = r.lresbar;
  r.mu = p.lmax_scale * (1.0 - p.eps);
  return r;
}

RatioInversion epsilon_for_ratio(double ratio, std::int64_t n, double gamma) {
  if (n < 2) throw PreconditionError("n must be at least 2");
  if (!(ratio >= 1.0)) {
    throw PreconditionError("ratio lresbar/lmax must be >= 1 for any smooth convex function");
  }
  RatioInversion r;
  r.eps = std::sqrt((ratio * ratio - 1.0) / static_cast<double>(n - 1));
  r.above_lower_band = ratio > 18.5 * gamma;
  r.eps_within_limit = r.eps > 0.0 && r.eps <= kMaxEps * (1.0 + kEpsSlack);
  r.literal_upper_band = ratio <= std::sqrt(static_cast<double>(n - 1)) / 18.0;
  r.admissible = r.above_lower_band && r.eps_within_limit;
  std::ostringstream why;
  if (r.eps == 0.0) {
    why << "ratio 1 gives eps = 0: degenerate separable function, below the admissible band";
  } else {
    if (!r.above_lower_band) {
      why << "ratio " << ratio << " is not above 37/2 * gamma = " << 18.5 * gamma << "; ";
    }
    if (!r.eps_within_limit) {
      why << "eps = " << r.eps << " exceeds 1/18 (ratio above sqrt(1 + (n-1)/324)); ";
    }
    if (r.admissible) why << "admissible";
  }
  r.reason = why.str();
  return r;
}

double strong_convexity_residual(const Params& p, std::span<const double> x,
                                 std::span<const double> y) {
  check_dim(p, x);
  check_dim(p, y);
  const auto g = gradient(p, x);
  const double mu = lipschitz_parameters(p).mu;
  CompensatedSum inner;
  CompensatedSum dist2;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = y[i] - x[i];
    inner.add(g[i] * d);
    dist2.add(d * d);
  }
  return eval(p, y) - eval(p, x) - inner.value() - 0.5 * mu * dist2.value();
}

LipschitzReport sampled_lipschitz_oracle(const Params& p, std::int64_t samples,
                                         std::uint64_t seed) {
  validate(p);
  if (samples < 1) throw PreconditionError("samples must be positive");
  const auto n = static_cast<std::size_t>(p.n);
  CounterRng rng(seed, 0, Stream::lipschitz);

  // pair[k * n + j]: largest observed |grad_k(x + r e_j) - grad_k(x)| / |r|.
  std::vector<double> pair(n * n, 0.0);
  double lres = 0.0;
  double mu_est = std::numeric_limits<double>::infinity();
  Point x(n);
  for (std::int64_t s = 0; s < samples; ++s) {
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    const auto j = static_cast<std::size_t>(rng.below(n));
    double r = rng.uniform(0.1, 2.0);
    if (rng.next() & 1) r = -r;

    const auto g0 = gradient(p, x);
    x[j] += r;
    const auto g1 = gradient(p, x);
    x[j] -= r;

    double norm2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double q = std::abs(g1[k] - g0[k]) / std::abs(r);
      pair[k * n + j] = std::max(pair[k * n + j], q);
      norm2 += q * q;
    }
    lres = std::max(lres, std::sqrt(norm2));

    // Curvature along a random direction d: <grad(x+d) - grad(x), d> / |d|^2.
    // Its minimum over directions is mu, so the sampled minimum is an upper
    // estimate of mu.
    Point shifted = x;
    double d2 = 0.0;
    std::vector<double> d(n);
    for (std::size_t k = 0; k < n; ++k) {
      d[k] = rng.uniform(-1.0, 1.0);
      shifted[k] += d[k];
      d2 += d[k] * d[k];
    }
    const auto g2 = gradient(p, shifted);
    double curv = 0.0;
    for (std::size_t k = 0; k < n; ++k) curv += (g2[k] - g0[k]) * d[k];
    mu_est = std::min(mu_est, curv / d2);
  }

  LipschitzReport est;
  est.lres = lres;
  for (std::size_t k = 0; k < n; ++k) {
    est.lmax = std::max(est.lmax, pair[k * n + k]);
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += pair[k * n + j] * pair[k * n + j];
    est.lresbar = std::max(est.lresbar, std::sqrt(row));
  }
  est.mu = mu_est;
  return est;
}

}  // namespace acd::objective
