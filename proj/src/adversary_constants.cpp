#include <algorithm>
#include <cmath>
#include <sstream>

#include "acd/adversary.hpp"
#include "acd/errors.hpp"

namespace acd::adversary {

const char* to_string(Mode m) { return m == Mode::paper ? "paper" : "explore"; }

Mode parse_mode(const std::string& s) {
  if (s == "paper") return Mode::paper;
  if (s == "explore") return Mode::explore;
  throw PreconditionError("mode must be 'paper' or 'explore' (got '" + s + "')");
}

double lg(double x) { return std::log2(x); }

std::int64_t round_up_to_8(double x) {
  const auto v = static_cast<std::int64_t>(std::ceil(x));
  return ((std::max<std::int64_t>(v, 1) + 7) / 8) * 8;
}

bool AdversaryConstants::enforced_ok() const {
  for (const auto& c : checks) {
    if (c.enforced && !c.ok) return false;
  }
  return true;
}

std::string AdversaryConstants::failed_checks() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& c : checks) {
    if (c.enforced && !c.ok) {
      out << (first ? "" : "; ") << c.name << ": " << c.detail;
      first = false;
    }
  }
  return out.str();
}

AdversaryConstants derive_constants(const ConstantsInput& in, bool enforce) {
  AdversaryConstants k;
  k.n = in.n;
  k.eps = in.eps;
  k.gamma = in.gamma;
  k.c = in.c;
  k.mode = in.mode;
  const bool paper = in.mode == Mode::paper;

  auto add = [&](std::string name, bool ok, bool enforced, std::string detail) {
    k.checks.push_back({std::move(name), ok, enforced, std::move(detail)});
  };
  auto fmt = [](double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
  };

  // Structural preconditions; nothing else is meaningful without them.
  if (in.n < 2 || in.n % 2 != 0) throw PreconditionError("n must be even and at least 2");
  if (!(in.eps > 0.0) || in.eps > objective::kMaxEps * (1.0 + 1e-12)) {
    throw PreconditionError("eps must satisfy 0 < eps <= 1/18 (got " + fmt(in.eps) + ")");
  }
  if (!(in.gamma >= 1.0)) throw PreconditionError("gamma must be >= 1");
  if (!(in.c >= 1.0)) throw PreconditionError("c must be >= 1");

  const double n = static_cast<double>(in.n);
  k.alpha = (1.0 - in.eps) / in.gamma;
  k.nu = 3.0 * in.eps * k.alpha / (in.gamma - 6.0 * in.eps);
  k.b1 = 1.0 + lg(3.0) + 2.0 * in.c * lg(n);
  k.b2 = 2.0 + (lg(9.0) + 2.0 * in.c * lg(n)) / (3.0 * lg(1.5));
  k.b3 = 1.0 + std::log(3.0) + 2.0 * in.c * std::log(n);
  k.lresbar = std::sqrt(1.0 + (n - 1.0) * in.eps * in.eps);
  const double head = 74.0 * in.gamma * std::sqrt(n) / k.lresbar + 435.0;
  k.qbar_formula_lg = static_cast<std::int64_t>(std::ceil(head + 96.0 * in.c * lg(n)));
  k.qbar_formula_ln = static_cast<std::int64_t>(std::ceil(head + 96.0 * in.c * std::log(n)));

  if (paper) {
    k.qbar = round_up_to_8(static_cast<double>(k.qbar_formula_lg));
    if (in.qbar_override) {
      if (*in.qbar_override < k.qbar) {
        throw PreconditionError("paper mode: qbar override " + std::to_string(*in.qbar_override) +
                                " is below the required " + std::to_string(k.qbar));
      }
      k.qbar = round_up_to_8(static_cast<double>(*in.qbar_override));
    }
  } else {
    if (!in.qbar_override) throw PreconditionError("explore mode needs --qbar");
    if (*in.qbar_override < 8) throw PreconditionError("qbar must be at least 8");
    k.qbar = round_up_to_8(static_cast<double>(*in.qbar_override));
  }
  const double q = static_cast<double>(k.qbar);
  k.lambda = 1.0 / 16.0 - (k.b1 + k.b3) / q;
  k.constraint_lhs = 0.5 * k.lambda * q * in.eps * k.alpha;
  k.constraint_rhs = 2.0 * (1.0 - in.eps) + k.nu + 2.0 * in.gamma * k.nu +
                     in.eps * k.alpha * (0.5 * k.b1 + (k.nu / k.alpha) * k.b2);
  k.tau = 0.75 * q;
  k.failure_budget = std::pow(n, -2.0 * in.c) / 3.0;

  add("nu_le_alpha_over_4", k.nu <= 0.25 * k.alpha * (1.0 + 1e-12), true,
      "nu = " + fmt(k.nu) + ", alpha/4 = " + fmt(0.25 * k.alpha));
  add("lambda_positive", k.lambda > 0.0, paper, "lambda = " + fmt(k.lambda));
  add("step_constraint", k.constraint_lhs >= k.constraint_rhs, paper,
      "lhs " + fmt(k.constraint_lhs) + (k.constraint_lhs >= k.constraint_rhs ? " >= " : " < ") +
          "rhs " + fmt(k.constraint_rhs));
  add("n_ge_qbar_sq_over_4", n >= q * q / 4.0, paper,
      "n = " + fmt(n) + ", qbar^2/4 = " + fmt(q * q / 4.0));
  add("ratio_above_37_over_2_gamma", k.lresbar > 18.5 * in.gamma, paper,
      "lresbar = " + fmt(k.lresbar) + ", 37/2 gamma = " + fmt(18.5 * in.gamma));
  add("qbar_ge_ln_formula", k.qbar >= k.qbar_formula_ln, false,
      "qbar = " + std::to_string(k.qbar) + ", ln-form bound " + std::to_string(k.qbar_formula_ln));
  add("qbar_le_4_sqrt_n", q <= 4.0 * std::sqrt(n), false,
      "4 sqrt(n) = " + fmt(4.0 * std::sqrt(n)));
  add("literal_ratio_upper_band", k.lresbar <= std::sqrt(n - 1.0) / 18.0, false,
      "sqrt(n-1)/18 = " + fmt(std::sqrt(n - 1.0) / 18.0));

  if (enforce && !k.enforced_ok()) {
    throw PreconditionError(std::string(to_string(in.mode)) + " mode preconditions violated: " +
                            k.failed_checks());
  }
  return k;
}

}  // namespace acd::adversary
