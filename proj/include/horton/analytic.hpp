#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "distribution.hpp"
#include "error.hpp"
#include "numeric.hpp"

namespace horton {

/// pi_j = P(ord = j) and sigma_j = P(ord <= j). Index 0 of pi is unused;
/// tail_j = 1 - sigma_j is kept separately to avoid cancellation.
struct OrderDistribution {
  std::vector<double> pi;
  std::vector<double> sigma;
  std::vector<double> tail;
  /// pi from the direct recursion, for cross-checking.
  std::vector<double> pi_direct;
  double route_gap = 0.0;
  bool complete = true;
  std::string diagnostic;

  int size() const { return static_cast<int>(pi.size()) - 1; }
};

inline OrderDistribution order_distribution(const OffspringDistribution& d, int J) {
  if (J < 1) throw DomainError("order_distribution: J must be positive");
  OrderDistribution od;
  od.pi = {0.0};
  od.pi_direct = {0.0};
  od.sigma = {0.0};
  od.tail = {1.0};
  double w_direct = 1.0, w_direct_prev = 1.0;
  for (int j = 1; j <= J; ++j) {
    double w = od.tail.back();
    double d1 = d.one_minus_dq(w);
    double p = d.q_minus_id(w) / d1;
    double w_next = d.gap(w) / d1;
    // direct recursion: pi_j = [R(w1) - R(w2) + pi_{j-1} D1(w2)] / D1(w1)
    double pd;
    if (j == 1) {
      pd = d.q0();
    } else {
      double r1 = d.q_minus_id(w_direct), r2 = d.q_minus_id(w_direct_prev);
      pd = (r1 - r2 + od.pi_direct.back() * d.one_minus_dq(w_direct_prev)) / d.one_minus_dq(w_direct);
    }
    if (!(p > 0.0) || !(w_next >= 0.0) || !(w_next < w) || !std::isfinite(p)) {
      od.complete = false;
      od.diagnostic = "order recursion lost monotonicity at j=" + std::to_string(j);
      break;
    }
    od.pi.push_back(p);
    od.tail.push_back(w_next);
    od.sigma.push_back(1.0 - w_next);
    od.pi_direct.push_back(pd);
    od.route_gap = std::max(od.route_gap, std::abs(pd - p));
    w_direct_prev = w_direct;
    w_direct = w_direct - pd;
    if (w_next == 0.0 && j < J) {
      od.complete = false;
      od.diagnostic = "sigma reached 1 in floating point at j=" + std::to_string(j);
      break;
    }
  }
  return od;
}

enum class Provenance { analytic, monte_carlo, oracle };

inline const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::analytic: return "analytic";
    case Provenance::monte_carlo: return "monte-carlo";
    case Provenance::oracle: return "oracle";
  }
  return "?";
}

using Matrix = std::vector<std::vector<double>>;

inline Matrix square_matrix(int K, double v = 0.0) {
  return Matrix(static_cast<std::size_t>(K + 1), std::vector<double>(static_cast<std::size_t>(K + 1), v));
}

/// Entries (i, j) with 1 <= i < j <= K; row and column 0 unused.
/// Standard errors are filled for Monte Carlo tables, interval ends for
/// oracle tables.
struct TokunagaTable {
  int K = 0;
  Provenance provenance = Provenance::analytic;
  Matrix T, T_reg, t_total;
  Matrix T_se, T_reg_se;
  Matrix T_lo, T_hi, T_reg_lo, T_reg_hi;
};

inline TokunagaTable tokunaga_analytic(const OffspringDistribution& d, int K) {
  if (K < 2) throw DomainError("tokunaga_analytic: K must be at least 2");
  auto od = order_distribution(d, K);
  if (od.size() < K - 1) throw NumericalError("tokunaga_analytic: order recursion stopped early: " + od.diagnostic);
  TokunagaTable tab;
  tab.K = K;
  tab.T = square_matrix(K);
  tab.T_reg = square_matrix(K);
  tab.t_total = square_matrix(K);
  for (int j = 2; j <= K; ++j) {
    double w1 = od.tail[j - 1], w2 = od.tail[j - 2];
    double p = od.pi[j - 1];
    double D1a = d.one_minus_dq(w1), D1b = d.one_minus_dq(w2);
    double R1 = d.q_minus_id(w1), R2 = d.q_minus_id(w2);
    double den = R1 - R2 + p * D1b;
    double curv1 = d.d2q(w1), curv2 = d.d2q(w2);
    if (!std::isfinite(curv1) || !std::isfinite(curv2))
      throw NumericalError("tokunaga_analytic: infinite second derivative; use a closed-form kind");
    if (!(den > 0)) throw NumericalError("tokunaga_analytic: nonpositive terminal probability");
    for (int i = 1; i < j; ++i) {
      double reg = od.pi[i] * curv1 / D1a;
      double term;
      if (i < j - 1)
        term = od.pi[i] * (D1b - D1a - p * curv2) / den;
      else
        term = (2.0 * (R2 - R1) - p * (D1a + D1b)) / den;
      tab.T_reg[i][j] = reg;
      tab.T[i][j] = term + reg;
      tab.t_total[i][j] = tab.T[i][j] + (i == j - 1 ? 2.0 : 0.0);
    }
  }
  return tab;
}

struct IgwConstants {
  double q0, a, c, T1, R, R_alt;
};

inline IgwConstants igw_constants(double q0) {
  if (!(q0 >= 0.5 && q0 < 1.0)) throw DomainError("igw_constants: q0 must lie in [1/2, 1)");
  IgwConstants k;
  k.q0 = q0;
  k.c = 1.0 / (1.0 - q0);
  k.a = (k.c - 1.0) * (std::pow(k.c, 1.0 / (k.c - 1.0)) - 1.0);
  k.R = std::pow(k.c, k.c / (k.c - 1.0));
  k.T1 = k.R - k.c - 1.0;
  k.R_alt = std::pow(1.0 - q0, -1.0 / q0);
  return k;
}

/// T_1..T_m followed by T_k = T_m * ratio^(k-m) for k > m.
struct TokunagaSequence {
  std::vector<double> head;
  double tail_ratio = 0.0;

  static TokunagaSequence self_similar(double T1, double a, double c) { return {{T1, a * c}, c}; }

  double generating(double z) const {
    double s = -1.0 + 2.0 * z, p = 1.0;
    for (double Tk : head) {
      p *= z;
      s += Tk * p;
    }
    if (tail_ratio > 0 && !head.empty()) {
      double rz = tail_ratio * z;
      s += head.back() * p * rz / (1.0 - rz);
    }
    return s;
  }
};

struct HortonExponent {
  double w0 = 0, R = 0;
  int iterations = 0;
};

inline HortonExponent horton_exponent(const TokunagaSequence& seq) {
  if (seq.head.empty()) throw DomainError("horton_exponent: empty sequence");
  for (double t : seq.head)
    if (!(t >= 0) || !std::isfinite(t)) throw StructuralError("horton_exponent: Tokunaga values must be nonnegative");
  if (!(seq.tail_ratio >= 0)) throw StructuralError("horton_exponent: negative tail ratio");
  double b = 0.5;
  if (seq.tail_ratio > 0) b = std::min(0.5, (1.0 - 1e-12) / seq.tail_ratio);
  auto f = [&](double z) { return seq.generating(z); };
  if (!(f(b) > 0)) throw StructuralError("horton_exponent: generating function has no root on the bracket");
  auto r = find_root_bracketed(f, 0.0, b, 1e-12, 200);
  return {r.root, 1.0 / r.root, r.iterations};
}

struct ProbeConfig {
  int phases = 8;
  int depth = 40;
  double tolerance = 1e-3;
  /// Grid ratio; 0 selects 1 - q_0.
  double ratio = 0.0;
};

enum class ProbeStatus { regular, oscillating, inconclusive };

inline const char* probe_status_name(ProbeStatus s) {
  switch (s) {
    case ProbeStatus::regular: return "regular";
    case ProbeStatus::oscillating: return "oscillating";
    case ProbeStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

struct RegularityReport {
  ProbeStatus status = ProbeStatus::inconclusive;
  double ratio = 0;
  int depth_reached = 0;
  /// Deepest (1 - S(x))/(1 - x) per phase.
  std::vector<double> phase_values;
  std::vector<double> phases;
  double spread = 0;
  double S1 = std::numeric_limits<double>::quiet_NaN();
  double L = std::numeric_limits<double>::quiet_NaN();
  /// Per-phase exponent 2 - ln(R(rho w)/R(w))/ln(rho) at the deepest point.
  std::vector<double> L_slope;
  double Lambda = std::numeric_limits<double>::quiet_NaN();
};

inline RegularityReport regularity_probe(const OffspringDistribution& d, const ProbeConfig& cfg = {}) {
  RegularityReport rep;
  double rho = cfg.ratio > 0 ? cfg.ratio : d.one_minus_q0();
  if (!(rho > 0 && rho < 1)) rho = 0.5;
  rep.ratio = rho;
  int depth = cfg.depth;
  // stop before the underflow floor
  for (int p = 0; p < cfg.phases; ++p) {
    double alpha = static_cast<double>(p) / cfg.phases;
    for (int m = 0; m <= depth; ++m) {
      double w = std::pow(rho, m + alpha);
      double v = s_tail(d, w) / w;
      double r1 = d.q_minus_id(w), r2 = d.q_minus_id(rho * w);
      if (!std::isfinite(v) || w < 1e-250 || !(r2 > 0) || !(r1 > 0)) {
        depth = std::min(depth, m - 1);
        break;
      }
    }
  }
  rep.depth_reached = depth;
  if (depth < 8) return rep;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0;
  for (int p = 0; p < cfg.phases; ++p) {
    double alpha = static_cast<double>(p) / cfg.phases;
    double w = std::pow(rho, depth + alpha);
    double v = s_tail(d, w) / w;
    rep.phases.push_back(alpha);
    rep.phase_values.push_back(v);
    rep.L_slope.push_back(2.0 - std::log(d.q_minus_id(rho * w) / d.q_minus_id(w)) / std::log(rho));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    sum += v;
  }
  double mean = sum / cfg.phases;
  rep.spread = mean != 0 ? (hi - lo) / std::abs(mean) : (hi - lo);
  bool absolute_zero = std::abs(hi) < cfg.tolerance && std::abs(lo) < cfg.tolerance;
  if (rep.spread <= cfg.tolerance || absolute_zero) {
    rep.status = ProbeStatus::regular;
    rep.S1 = mean;
    rep.L = 2.0 - 1.0 / (1.0 - mean);
  } else {
    rep.status = ProbeStatus::oscillating;
  }
  if (d.kind() == Kind::explicit_with_tail) {
    const auto& q = d.coefficients();
    std::size_t k = q.size() / 2;
    CompensatedSum m0, m1;
    for (std::size_t i = k; i < q.size(); ++i) {
      m0 += q[i];
      m1 += static_cast<double>(i) * q[i];
    }
    if (m1.value() > 0) rep.Lambda = static_cast<double>(k) * m0.value() / m1.value();
  }
  return rep;
}

}  // namespace horton
