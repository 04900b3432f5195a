#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "analytic.hpp"
#include "distribution.hpp"
#include "error.hpp"
#include "numeric.hpp"

namespace horton {

/// z in {0, 0.05, ..., 0.95} and 0.99.
inline std::vector<double> standard_grid() {
  std::vector<double> g;
  for (int i = 0; i < 20; ++i) g.push_back(0.05 * i);
  g.push_back(0.99);
  return g;
}

/// sup over the grid of |Q(z) - Q_1(z)| where Q_1 is the pruned generating function.
inline double invariance_residual(const OffspringDistribution& d, const std::vector<double>& grid = standard_grid()) {
  double rho = d.one_minus_q0();
  if (!(rho > 0)) throw DomainError("invariance_residual: q_0 = 1");
  double scale = rho * d.one_minus_dq(rho);
  double sup = 0;
  for (double z : grid) {
    check_unit(z);
    double w = 1.0 - z;
    sup = std::max(sup, std::abs(d.q_minus_id(w) - d.q_minus_id(rho * w) / scale));
  }
  return sup;
}

/// Law of the pruned tree conditioned on being nonempty.
inline OffspringDistribution prune_distribution(const OffspringDistribution& d) {
  double rho = d.one_minus_q0();
  if (!(rho > 0)) throw DomainError("prune_distribution: undefined for the point mass q_0 = 1");
  if (d.kind() == Kind::igw) {
    double r = invariance_residual(d);
    if (r > 1e-10) throw ConsistencyError("prune_distribution: IGW law failed its invariance check");
    return d;
  }
  if (d.kind() == Kind::pruned) {
    const auto& p = d.pruned_params();
    double u = p.u * rho;
    if (!(u > 1e-300)) throw NumericalError("prune_distribution: scale underflow");
    return OffspringDistribution::pruned(p.base, u, p.steps + 1);
  }
  return OffspringDistribution::pruned(std::make_shared<const OffspringDistribution>(d), rho, 1);
}

enum class TrajectoryStatus { converged_to_igw, converged_to_point_mass, budget_exhausted };

inline const char* trajectory_status_name(TrajectoryStatus s) {
  switch (s) {
    case TrajectoryStatus::converged_to_igw: return "converged-to-IGW";
    case TrajectoryStatus::converged_to_point_mass: return "converged-to-point-mass";
    case TrajectoryStatus::budget_exhausted: return "budget-exhausted";
  }
  return "?";
}

struct PruningTrajectory {
  std::vector<OffspringDistribution> steps;
  std::vector<double> q0_path;
  std::vector<double> mean_path;
  std::vector<double> sup_distance;
  TrajectoryStatus status = TrajectoryStatus::budget_exhausted;
  /// q of the limiting IGW law when status is converged_to_igw.
  double limit_q = 0;
  std::string diagnostic;
};

/// sup over the grid of |Q(z) - Q_IGW(q)(z)| with q the law's own q_0.
inline double distance_to_igw(const OffspringDistribution& d, const std::vector<double>& grid = standard_grid()) {
  double q = std::clamp(d.q0(), 0.5, 1.0 - 1e-15);
  double sup = 0;
  for (double z : grid) {
    double w = 1.0 - z;
    sup = std::max(sup, std::abs(d.q_minus_id(w) - q * std::pow(w, 1.0 / q)));
  }
  return sup;
}

inline PruningTrajectory iterate_pruning(const OffspringDistribution& d, int max_steps, double tolerance) {
  PruningTrajectory tr;
  OffspringDistribution cur = d;
  for (int k = 0;; ++k) {
    double q0 = cur.q0();
    tr.steps.push_back(cur);
    tr.q0_path.push_back(q0);
    tr.mean_path.push_back(cur.mean());
    tr.sup_distance.push_back(distance_to_igw(cur));
    if (cur.one_minus_q0() < tolerance) {
      tr.status = TrajectoryStatus::converged_to_point_mass;
      return tr;
    }
    std::optional<OffspringDistribution> next;
    try {
      next = prune_distribution(cur);
    } catch (const NumericalError& e) {
      tr.diagnostic = e.what();
      return tr;
    }
    double delta = std::abs(next->q0() - q0);
    if (delta < tolerance && tr.sup_distance.back() < tolerance) {
      tr.status = TrajectoryStatus::converged_to_igw;
      tr.limit_q = q0;
      return tr;
    }
    if (k >= max_steps) {
      tr.diagnostic = "step budget exhausted";
      return tr;
    }
    cur = *next;
  }
}

/// Oscillatory invariant law together with its construction diagnostics.
struct OscillatoryResult {
  OffspringDistribution law = OffspringDistribution::binary();
  double A = 0, B = 0;
  std::vector<double> coefficients;
  double constraint_residual = 0;
  double criticality_error = 0;
  int sign_changes = 0;
  int left = 0, right = 0;
  /// 1 - ln(1 - Q'(q0))/ln(1 - q0)
  double L_from_slope = 0;
  /// 2 + ln B / ln(1 - q0)
  double L_from_B = 0;
};

namespace detail {

// B^n (1 - rho^{n+1} - (1 + rho^n - rho^{n+1}) e^{-rho^n}) rearranged for eps = rho^n
inline double constraint_term(double eps, double rho) { return -phi2(eps) - eps * (1.0 - rho) * std::expm1(-eps); }

inline double constraint_sum(double B, double rho, int left, int right) {
  CompensatedSum s;
  double lB = std::log(B), lr = std::log(rho);
  for (int n = -left; n <= right; ++n) {
    double f = constraint_term(std::exp(n * lr), rho);
    if (f == 0) continue;
    s += std::copysign(std::exp(n * lB + std::log(std::abs(f))), f);
  }
  return s.value();
}

inline int window_for_ratio(double r) { return static_cast<int>(std::ceil(std::log(1e-18) / std::log(r))) + 4; }

}  // namespace detail

/// Solves for B in ((1-q0)^{-1}, (1-q0)^{-2}) and builds the law. With
/// n_range <= 0 the summation window grows until the omitted terms are
/// certified negligible; otherwise a window that is too small is an error.
inline OscillatoryResult oscillatory_invariant(double q0, int n_range = 0, int m_max = 200) {
  if (!(q0 > 0.5 && q0 < 1.0)) throw DomainError("oscillatory_invariant: q0 must lie in (1/2, 1)");
  const double rho = 1.0 - q0;
  const double lo = (1.0 / rho) * (1.0 + 1e-9), hi = (1.0 / (rho * rho)) * (1.0 - 1e-9);
  int left = n_range > 0 ? n_range : 60, right = left;
  OscillatoryResult res;
  for (int attempt = 0;; ++attempt) {
    auto F = [&](double B) { return detail::constraint_sum(B, rho, left, right); };
    // multiplicity scan
    int changes = 0;
    double prev = F(lo);
    for (int i = 1; i <= 200; ++i) {
      double cur = F(lo + (hi - lo) * i / 200.0);
      if ((cur > 0) != (prev > 0)) ++changes;
      prev = cur;
    }
    if (changes == 0)
      throw NumericalError("oscillatory_invariant: no sign change for B at this truncation; enlarge n_range");
    auto root = find_root_bracketed(F, lo, hi, 1e-15, 400);
    double B = root.root;
    int need_right = detail::window_for_ratio(B * rho * rho);
    int need_left = detail::window_for_ratio(1.0 / (B * rho));
    if (need_right <= right && need_left <= left) {
      res.B = B;
      res.sign_changes = changes;
      break;
    }
    if (n_range > 0)
      throw NumericalError("oscillatory_invariant: truncation not certified; enlarge n_range to at least " +
                           std::to_string(std::max(need_left, need_right)));
    if (attempt > 8) throw NumericalError("oscillatory_invariant: truncation window did not settle");
    left = std::max(left, need_left);
    right = std::max(right, need_right);
  }
  res.left = left;
  res.right = right;
  CompensatedSum A;
  for (int n = -left; n <= right; ++n) {
    double y = std::pow(rho, n);
    A += std::exp(n * std::log(res.B * rho) + std::log(-std::expm1(-y)));
  }
  res.A = A.value();
  res.constraint_residual = std::abs(detail::constraint_sum(res.B, rho, left, right)) / res.A;
  res.law = OffspringDistribution::oscillatory({q0, res.A, res.B, left, right});
  const auto& law = res.law;
  // Q(1) = q0 + gap(1) and Q'(1) = 1 - D1(0+) from the truncated sums
  double Q1 = q0 + law.gap(1.0);
  // Q'(1) = sum_m m q_m, summed per n as y(1 - e^{-y}) with y = rho^n
  CompensatedSum mean;
  for (int n = -left; n <= right; ++n) {
    double y = std::pow(rho, n);
    double v = -y * std::expm1(-y);
    if (v > 0) mean += std::exp(n * std::log(res.B) + std::log(v));
  }
  res.criticality_error = std::abs(Q1 - 1.0) + std::abs(mean.value() / res.A - 1.0);
  res.coefficients = law.pmf_table(static_cast<std::size_t>(m_max));
  res.L_from_slope = 1.0 - std::log(law.one_minus_dq(rho)) / std::log(rho);
  res.L_from_B = 2.0 + std::log(res.B) / std::log(rho);
  return res;
}

struct IntegralConstants {
  double A, B;
};

/// Constants of the integral version of the oscillatory construction.
inline IntegralConstants oscillatory_integral_constants(double q0) {
  double rho = 1.0 - q0;
  return {q0 * std::tgamma(2.0 - 1.0 / q0) / (-rho * std::log(rho)), std::pow(rho, -1.0 / q0)};
}

/// (1/(m! A)) * integral over t of B^t rho^{tm} exp(-rho^t), by the trapezoid rule.
inline double oscillatory_integral_coefficient(double q0, int m, double h = 0.02) {
  auto k = oscillatory_integral_constants(q0);
  double rho = 1.0 - q0, lr = std::log(rho), lB = std::log(k.B);
  // integrand peaks where rho^t is near m
  double tc = std::log(static_cast<double>(m)) / lr;
  double lf = std::lgamma(m + 1.0);
  CompensatedSum s;
  for (double t = tc - 400.0; t <= tc + 400.0; t += h) {
    double ly = t * lr;
    double e = t * lB + m * ly - std::exp(ly) - lf;
    if (e > -745) s += std::exp(e);
  }
  return s.value() * h / k.A;
}

}  // namespace horton
