#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "error.hpp"
#include "numeric.hpp"

namespace horton {

enum class Kind { explicit_finite, igw, zipf_example, oscillatory, explicit_with_tail, pruned };

inline const char* kind_name(Kind k) {
  switch (k) {
    case Kind::explicit_finite: return "explicit_finite";
    case Kind::igw: return "igw";
    case Kind::zipf_example: return "zipf_example";
    case Kind::oscillatory: return "oscillatory";
    case Kind::explicit_with_tail: return "explicit_with_tail";
    case Kind::pruned: return "pruned";
  }
  return "?";
}

class OffspringDistribution;

/// Sum representation of the oscillatory prune-invariant law. Sums over n
/// run over a window [peak - left, peak + right] around the dominant index.
struct OscillatoryParams {
  double q0 = 0, A = 0, B = 0;
  int left = 60, right = 60;
};

/// Law of the pruned tree, Q(z) = z + C*R_base(u(1-z)) with C = 1/(u*D1_base(u)).
struct PrunedParams {
  std::shared_ptr<const OffspringDistribution> base;
  double u = 1.0;
  int steps = 0;
};

/// Offspring law of a subcritical or critical Galton-Watson tree with q_1 = 0.
///
/// Evaluation near z = 1 is done in the coordinate w = 1 - z through
///   R(w)   = Q(1-w) - (1-w)
///   D1(w)  = 1 - Q'(1-w)
///   gap(w) = w*D1(w) - R(w) = 1 - Q(x) - (1-x)Q'(x)
/// which are computed without subtracting nearly equal quantities.
class OffspringDistribution {
 public:
  Kind kind() const { return kind_; }

  static OffspringDistribution explicit_finite(std::vector<double> q) {
    OffspringDistribution d;
    d.kind_ = Kind::explicit_finite;
    d.init_coefficients(std::move(q), 0.0, 0.0);
    return d;
  }

  /// Truncated coefficients with certified bounds on the omitted tail mass
  /// and tail first moment. Evaluations use the truncated series.
  static OffspringDistribution explicit_with_tail(std::vector<double> q, double tail_mass, double tail_moment) {
    if (!(tail_mass >= 0) || !(tail_moment >= 0)) throw DomainError("tail bounds must be nonnegative");
    OffspringDistribution d;
    d.kind_ = Kind::explicit_with_tail;
    d.init_coefficients(std::move(q), tail_mass, tail_moment);
    return d;
  }

  static OffspringDistribution igw(double q) {
    if (!(q >= 0.5 && q < 1.0)) throw DomainError("igw: q must lie in [1/2, 1)");
    OffspringDistribution d;
    d.kind_ = Kind::igw;
    d.q_igw_ = q;
    d.a_ = 1.0 / q;
    d.mean_ = 1.0;
    // pmf table by the ratio recurrence q_{k+1}/q_k = (k - 1/q)/(k+1)
    d.coef_.assign(igw_table_size, 0.0);
    d.coef_[0] = q;
    d.coef_[2] = (1.0 - q) / (2.0 * q);
    if (q > 0.5)
      for (std::size_t k = 2; k + 1 < igw_table_size; ++k)
        d.coef_[k + 1] = d.coef_[k] * (static_cast<double>(k) - d.a_) / static_cast<double>(k + 1);
    return d;
  }

  static OffspringDistribution binary() { return explicit_finite({0.5, 0.0, 0.5}); }

  /// q_0 = 2/3, q_k = (4/3)/(k(k^2-1)) for k >= 2.
  static OffspringDistribution zipf_example() {
    OffspringDistribution d;
    d.kind_ = Kind::zipf_example;
    d.mean_ = 1.0;
    return d;
  }

  static OffspringDistribution oscillatory(const OscillatoryParams& p) {
    double rho = 1.0 - p.q0;
    if (!(p.q0 > 0.5 && p.q0 < 1.0)) throw DomainError("oscillatory: q0 must lie in (1/2, 1)");
    if (!(p.B > 1.0 / rho && p.B < 1.0 / (rho * rho))) throw DomainError("oscillatory: B outside its bracket");
    if (!(p.A > 0) || p.left < 1 || p.right < 1) throw DomainError("oscillatory: bad parameters");
    OffspringDistribution d;
    d.kind_ = Kind::oscillatory;
    d.osc_ = p;
    d.mean_ = 1.0;
    return d;
  }

  static OffspringDistribution pruned(std::shared_ptr<const OffspringDistribution> base, double u, int steps) {
    if (!base || base->kind() == Kind::pruned) throw DomainError("pruned: base must be a non-pruned law");
    if (!(u > 0.0 && u <= 1.0)) throw DomainError("pruned: u must lie in (0, 1]");
    OffspringDistribution d;
    d.kind_ = Kind::pruned;
    d.pruned_ = {std::move(base), u, steps};
    d.d1u_ = d.pruned_.base->one_minus_dq(u);
    if (!(d.d1u_ > 0) || !std::isfinite(d.d1u_)) throw NumericalError("pruned: degenerate scale");
    d.mean_ = d.pruned_.base->dq_drop(u) / d.d1u_;
    return d;
  }

  // ---- parameters -------------------------------------------------------

  double q0() const {
    switch (kind_) {
      case Kind::oscillatory: return osc_.q0;
      case Kind::zipf_example: return 2.0 / 3.0;
      case Kind::pruned: return q_minus_id(1.0);
      default: return coef_[0];
    }
  }
  /// 1 - q_0 computed without cancellation.
  double one_minus_q0() const { return gap(1.0); }
  double mean() const { return mean_; }
  /// Upper end of the mean interval (differs only for truncated tails).
  double mean_upper() const { return mean_ + tail_moment_; }
  bool is_critical(double tol = 1e-12) const { return std::abs(1.0 - mean_) <= tol; }
  double igw_q() const { return q_igw_; }
  const std::vector<double>& coefficients() const { return coef_; }
  double tail_mass_bound() const { return tail_mass_; }
  double tail_moment_bound() const { return tail_moment_; }
  const OscillatoryParams& oscillatory_params() const { return osc_; }
  const PrunedParams& pruned_params() const { return pruned_; }

  /// Largest k with q_k > 0, or max size_t for infinite support.
  std::size_t support_bound() const {
    switch (kind_) {
      case Kind::explicit_finite: return coef_.size() - 1;
      case Kind::igw: return q_igw_ == 0.5 ? 2 : std::numeric_limits<std::size_t>::max();
      case Kind::pruned: {
        std::size_t b = pruned_.base->support_bound();
        return b;
      }
      case Kind::explicit_with_tail: return tail_mass_ > 0 ? std::numeric_limits<std::size_t>::max() : coef_.size() - 1;
      default: return std::numeric_limits<std::size_t>::max();
    }
  }

  // ---- pmf --------------------------------------------------------------

  double pmf(std::size_t k) const {
    switch (kind_) {
      case Kind::explicit_finite:
      case Kind::explicit_with_tail: return k < coef_.size() ? coef_[k] : 0.0;
      case Kind::igw: {
        if (k < coef_.size()) return coef_[k];
        if (q_igw_ == 0.5) return 0.0;
        double kk = static_cast<double>(k);
        return (1.0 - q_igw_) / q_igw_ * std::exp(std::lgamma(kk - a_) - std::lgamma(2.0 - a_) - std::lgamma(kk + 1.0));
      }
      case Kind::zipf_example: {
        if (k == 0) return 2.0 / 3.0;
        if (k == 1) return 0.0;
        double kk = static_cast<double>(k);
        return (4.0 / 3.0) / (kk * (kk * kk - 1.0));
      }
      case Kind::oscillatory: {
        if (k == 0) return osc_.q0;
        if (k == 1) return 0.0;
        return osc_coefficient(1.0, static_cast<int>(k));
      }
      case Kind::pruned: {
        if (k == 0) return q0();
        if (k == 1) return 0.0;
        auto c = pruned_.base->local_coefficients(pruned_.u, static_cast<int>(k), static_cast<int>(k));
        return c[0] / (pruned_.u * d1u_);
      }
    }
    return 0.0;
  }

  std::vector<double> pmf_table(std::size_t kmax) const {
    std::vector<double> out(kmax + 1, 0.0);
    out[0] = q0();
    if (kmax < 2) return out;
    if (kind_ == Kind::pruned) {
      auto c = pruned_.base->local_coefficients(pruned_.u, 2, static_cast<int>(kmax));
      for (std::size_t k = 2; k <= kmax; ++k) out[k] = c[k - 2] / (pruned_.u * d1u_);
      return out;
    }
    for (std::size_t k = 2; k <= kmax; ++k) out[k] = pmf(k);
    return out;
  }

  // ---- w-coordinate evaluations ------------------------------------------

  /// R(w) = Q(1-w) - (1-w).
  double q_minus_id(double w) const {
    double x = 1.0 - w;
    switch (kind_) {
      case Kind::explicit_finite:
      case Kind::explicit_with_tail:
        return (total_ - 1.0) + w * (1.0 - mean_) + w * w * horner(g_coef_, x);
      case Kind::igw: return q_igw_ * std::pow(w, a_);
      case Kind::zipf_example: return w == 0.0 ? 0.0 : (2.0 / 3.0) * w * w * zipf_h(w);
      case Kind::oscillatory: return osc_sum(w, 0);
      case Kind::pruned: return pruned_.base->q_minus_id(pruned_.u * w) / (pruned_.u * d1u_);
    }
    (void)x;
    return 0.0;
  }

  /// D1(w) = 1 - Q'(1-w).
  double one_minus_dq(double w) const {
    switch (kind_) {
      case Kind::explicit_finite:
      case Kind::explicit_with_tail: return (1.0 - mean_) + dq_drop(w);
      case Kind::igw: return std::pow(w, a_ - 1.0);
      case Kind::zipf_example:
      case Kind::oscillatory: return dq_drop(w);
      case Kind::pruned: return pruned_.base->one_minus_dq(pruned_.u * w) / d1u_;
    }
    return 0.0;
  }

  /// Q'(1) - Q'(1-w).
  double dq_drop(double w) const {
    double x = 1.0 - w;
    switch (kind_) {
      case Kind::explicit_finite:
      case Kind::explicit_with_tail: return w * horner(b_coef_, x);
      case Kind::igw: return std::pow(w, a_ - 1.0);
      case Kind::zipf_example: {
        if (w == 0.0) return 0.0;
        if (w >= 0.5) {
          // w * sum_j (2/3)(1/(j+1) + 1/(j+2)) x^j
          double s = 0.0, p = 1.0;
          for (int j = 0; j < 200 && p > 1e-18; ++j, p *= x) s += p * (1.0 / (j + 1) + 1.0 / (j + 2));
          return (2.0 / 3.0) * w * s;
        }
        double lw = std::log(w);
        return (2.0 / 3.0) * (w / x) * (-2.0 * lw - 1.0 - w * lw / x);
      }
      case Kind::oscillatory: return osc_sum(w, 1);
      case Kind::pruned: return pruned_.base->dq_drop(pruned_.u * w) / d1u_;
    }
    return 0.0;
  }

  /// Q''(1-w); +inf where the second moment diverges.
  double d2q(double w) const {
    double x = 1.0 - w;
    switch (kind_) {
      case Kind::explicit_finite:
      case Kind::explicit_with_tail: return horner(d2_coef_, x);
      case Kind::igw:
        if (q_igw_ == 0.5) return 1.0;
        return w == 0.0 ? std::numeric_limits<double>::infinity() : (a_ - 1.0) * std::pow(w, a_ - 2.0);
      case Kind::zipf_example: {
        if (w == 0.0) return std::numeric_limits<double>::infinity();
        if (x < 0.7) {
          double s = 0.0, p = 1.0;
          for (int n = 0; n < 400 && p > 1e-18; ++n, p *= x) s += p / (n + 3);
          return (4.0 / 3.0) * s;
        }
        return (4.0 / 3.0) * (-std::log(w) - x - 0.5 * x * x) / (x * x * x);
      }
      case Kind::oscillatory:
        if (w == 0.0) return std::numeric_limits<double>::infinity();
        return osc_sum(w, 2);
      case Kind::pruned: return pruned_.u * pruned_.base->d2q(pruned_.u * w) / d1u_;
    }
    return 0.0;
  }

  /// gap(w) = w*D1(w) - R(w).
  double gap(double w) const {
    double x = 1.0 - w;
    switch (kind_) {
      case Kind::explicit_finite:
      case Kind::explicit_with_tail: return (1.0 - total_) + w * w * horner(gap_coef_, x);
      case Kind::igw: return (1.0 - q_igw_) * std::pow(w, a_);
      case Kind::zipf_example: {
        if (w == 0.0) return 0.0;
        if (x < 0.6) {
          double s = 0.0, p = 1.0;
          for (int j = 0; j < 200 && p > 1e-18; ++j, p *= x) s += p / (j + 2);
          return (2.0 / 3.0) * w * w * s;
        }
        return (2.0 / 3.0) * w * w * (-std::log(w) - x) / (x * x);
      }
      case Kind::oscillatory: return osc_sum(w, 3);
      case Kind::pruned: return pruned_.base->gap(pruned_.u * w) / (pruned_.u * d1u_);
    }
    return 0.0;
  }

  /// g(x) = sum_m E[(X-m-1)_+] x^m at x = 1-w.
  double g_coefficient_series(double w) const {
    switch (kind_) {
      case Kind::explicit_finite:
      case Kind::explicit_with_tail: return horner(g_coef_, 1.0 - w);
      case Kind::igw: return q_igw_ * std::pow(w, a_ - 2.0);
      case Kind::zipf_example: return (2.0 / 3.0) * zipf_h(w);
      case Kind::oscillatory: return osc_sum(w, 0) / (w * w);
      case Kind::pruned: {
        double u = pruned_.u;
        return u * u * pruned_.base->g_coefficient_series(u * w) / (u * d1u_);
      }
    }
    return 0.0;
  }

  /// Scaled Taylor coefficients c_m = w^m Q^{(m)}(1-w)/m! for m in [m_lo, m_hi], m_lo >= 2.
  std::vector<double> local_coefficients(double w, int m_lo, int m_hi) const {
    if (m_lo < 2 || m_hi < m_lo) throw DomainError("local_coefficients: need 2 <= m_lo <= m_hi");
    std::vector<double> out(static_cast<std::size_t>(m_hi - m_lo + 1), 0.0);
    if (w == 0.0) return out;
    double x = 1.0 - w;
    switch (kind_) {
      case Kind::explicit_finite:
      case Kind::explicit_with_tail: {
        for (int m = m_lo; m <= m_hi; ++m) {
          if (static_cast<std::size_t>(m) >= coef_.size()) break;
          // sum_k C(k,m) q_k x^(k-m), times w^m
          double term = 1.0, s = 0.0;
          for (std::size_t k = static_cast<std::size_t>(m); k < coef_.size(); ++k) {
            s += term * coef_[k];
            term *= static_cast<double>(k + 1) / static_cast<double>(k + 1 - m) * x;
          }
          out[m - m_lo] = s * std::pow(w, m);
        }
        return out;
      }
      case Kind::igw: {
        double wa = std::pow(w, a_);
        for (int m = m_lo; m <= m_hi; ++m) out[m - m_lo] = wa * pmf(static_cast<std::size_t>(m));
        return out;
      }
      case Kind::zipf_example: return zipf_local(w, m_lo, m_hi);
      case Kind::oscillatory:
        for (int m = m_lo; m <= m_hi; ++m) out[m - m_lo] = osc_coefficient(w, m);
        return out;
      case Kind::pruned: {
        auto c = pruned_.base->local_coefficients(pruned_.u * w, m_lo, m_hi);
        for (auto& v : c) v /= pruned_.u * d1u_;
        return c;
      }
    }
    (void)x;
    return out;
  }

 private:
  static constexpr std::size_t igw_table_size = 4096;

  void init_coefficients(std::vector<double> q, double tail_mass, double tail_moment) {
    if (q.empty()) throw DomainError("coefficient list is empty");
    for (double v : q)
      if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("coefficients must be finite and nonnegative");
    if (q.size() > 1 && q[1] != 0.0) throw DomainError("q_1 must be zero");
    while (q.size() > 1 && q.back() == 0.0) q.pop_back();
    coef_ = std::move(q);
    tail_mass_ = tail_mass;
    tail_moment_ = tail_moment;
    CompensatedSum tot, mu;
    for (std::size_t k = 0; k < coef_.size(); ++k) {
      tot += coef_[k];
      mu += static_cast<double>(k) * coef_[k];
    }
    total_ = tot.value();
    mean_ = mu.value();
    if (std::abs(total_ - 1.0) > 1e-12 + tail_mass) throw DomainError("coefficients do not sum to one");
    if (total_ > 1.0 + 1e-12) throw DomainError("coefficients sum above one");
    if (mean_ > 1.0 + 1e-12) throw DomainError("supercritical law");
    if (coef_[0] < 0.5 - 1e-12) throw DomainError("q_0 must be at least 1/2");
    std::size_t n = coef_.size();
    // P_j = sum_{k>=j} q_k
    std::vector<double> P(n + 2, 0.0), M(n + 2, 0.0);
    for (std::size_t j = n; j-- > 0;) {
      P[j] = P[j + 1] + coef_[j];
      M[j] = M[j + 1] + static_cast<double>(j) * coef_[j];
    }
    std::size_t L = n >= 2 ? n - 1 : 1;
    g_coef_.assign(L, 0.0);
    b_coef_.assign(L, 0.0);
    gap_coef_.assign(L, 0.0);
    for (std::size_t m = L; m-- > 0;) {
      double next = m + 1 < L ? g_coef_[m + 1] : 0.0;
      g_coef_[m] = next + P[m + 2];
      b_coef_[m] = M[m + 2];
      gap_coef_[m] = static_cast<double>(m + 1) * P[m + 2];
    }
    d2_coef_.assign(L, 0.0);
    for (std::size_t k = 2; k < n; ++k) d2_coef_[k - 2] = static_cast<double>(k * (k - 1)) * coef_[k];
  }

  static double horner(const std::vector<double>& c, double x) {
    double s = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) s = s * x + c[i];
    return s;
  }

  // h = -ln(w)/(1-w), continuous at w = 1
  static double zipf_h(double w) {
    double x = 1.0 - w;
    if (x == 0.0) return 1.0;
    if (x < 0.5) return -std::log1p(-x) / x;
    return -std::log(w) / x;
  }

  std::vector<double> zipf_local(double w, int m_lo, int m_hi) const {
    std::vector<double> out(static_cast<std::size_t>(m_hi - m_lo + 1), 0.0);
    double x = 1.0 - w;
    if (w > 0.3) {
      for (int m = m_lo; m <= m_hi; ++m) {
        double term = 1.0, s = 0.0;
        for (int k = m; k < m + 100000; ++k) {
          double kk = k;
          double c = term * (4.0 / 3.0) / (kk * (kk * kk - 1.0));
          s += c;
          if (c < 1e-18 * s && kk * x < kk + 1 - m) break;
          term *= (kk + 1.0) / (kk + 1.0 - m) * x;
        }
        out[m - m_lo] = s * std::pow(w, m);
      }
      return out;
    }
    // R(w(1-z)) = (2/3) w^2 (1-z)^2 (s - ln(1-z)) / (x + w z), s = -ln w
    double s = -std::log(w);
    std::vector<double> p(static_cast<std::size_t>(m_hi + 1), 0.0);
    p[0] = s;
    if (m_hi >= 1) p[1] = 1.0 - 2.0 * s;
    if (m_hi >= 2) p[2] = s - 1.5;
    for (int m = 3; m <= m_hi; ++m) p[m] = 2.0 / (double(m) * (m - 1) * (m - 2));
    double r = -w / x;
    for (int m = m_lo; m <= m_hi; ++m) {
      double acc = 0.0, g = 1.0;
      for (int n = 0; n <= m; ++n, g *= r) acc += p[m - n] * g;
      out[m - m_lo] = (2.0 / 3.0) * w * w * acc / x;
    }
    return out;
  }

  // which: 0 -> R, 1 -> D1, 2 -> Q'', 3 -> gap
  double osc_sum(double w, int which) const {
    const double rho = 1.0 - osc_.q0;
    const double lr = std::log(rho), lB = std::log(osc_.B);
    int peak = static_cast<int>(std::lround(-std::log(w) / lr));
    CompensatedSum s;
    for (int n = peak - osc_.left; n <= peak + osc_.right; ++n) {
      double ly = std::log(w) + n * lr;
      double y = std::exp(ly);
      double v;
      switch (which) {
        case 0: v = std::exp(n * lB + std::log(phi2(y))); break;
        case 1: v = std::exp(n * (lB + lr) + std::log(-std::expm1(-y))); break;
        case 2: v = std::exp(n * (lB + 2 * lr) - y); break;
        default: v = std::exp(n * lB + std::log(phi3(y))); break;
      }
      s += v;
    }
    return s.value() / osc_.A;
  }

  // 1 - (1+y)e^{-y} = sum_{k>=2} (-1)^k (k-1) y^k / k!
  static double phi3(double y) {
    if (y < 0.1) {
      double s = 0.0, p = y;
      for (int k = 2; k < 30; ++k) {
        p *= y / k;
        double t = ((k % 2) ? -1.0 : 1.0) * (k - 1) * p;
        s += t;
        if (std::abs(t) < 1e-18 * std::abs(s)) break;
      }
      return s;
    }
    return -std::expm1(-y) - y * std::exp(-y);
  }

  double osc_coefficient(double w, int m) const {
    const double rho = 1.0 - osc_.q0;
    const double lr = std::log(rho), lB = std::log(osc_.B);
    // terms peak where w rho^n is near m
    int peak = static_cast<int>(std::lround((std::log(static_cast<double>(m)) - std::log(w)) / lr));
    double lf = std::lgamma(m + 1.0);
    CompensatedSum s;
    for (int n = peak - osc_.left; n <= peak + osc_.right; ++n) {
      double ly = std::log(w) + n * lr;
      s += std::exp(n * lB + m * ly - std::exp(ly) - lf);
    }
    return s.value() / osc_.A;
  }

  Kind kind_ = Kind::explicit_finite;
  std::vector<double> coef_;
  std::vector<double> g_coef_, b_coef_, gap_coef_, d2_coef_;
  double total_ = 1.0;
  double mean_ = 1.0;
  double tail_mass_ = 0.0, tail_moment_ = 0.0;
  double q_igw_ = 0.0, a_ = 0.0;
  OscillatoryParams osc_;
  PrunedParams pruned_;
  double d1u_ = 1.0;
};

// ---- generating function front ends ----------------------------------------

inline void check_unit(double z) {
  if (!(z >= 0.0 && z <= 1.0)) throw DomainError("argument must lie in [0, 1]");
}

/// Q, Q' or Q'' at z.
inline double gf_eval(const OffspringDistribution& d, double z, int derivative) {
  check_unit(z);
  double w = 1.0 - z;
  switch (derivative) {
    case 0: return z + d.q_minus_id(w);
    case 1: return 1.0 - d.one_minus_dq(w);
    case 2: return d.d2q(w);
  }
  throw DomainError("derivative must be 0, 1 or 2");
}

/// Bound on the evaluation error caused by an uncertified tail.
inline double gf_error_bound(const OffspringDistribution& d, double z, int derivative) {
  check_unit(z);
  if (d.kind() != Kind::explicit_with_tail) return 0.0;
  double M = static_cast<double>(d.coefficients().size());
  switch (derivative) {
    case 0: return d.tail_mass_bound() * std::pow(z, M);
    case 1: return d.tail_moment_bound() * std::pow(z, M - 1.0);
    default: {
      if (z == 1.0) return std::numeric_limits<double>::infinity();
      // sup_{k>=M} (k-1) z^(k-2) times the tail first moment
      double kstar = std::max(M, std::floor(1.0 + 1.0 / -std::log(z)));
      return d.tail_moment_bound() * (kstar - 1.0) * std::pow(z, kstar - 2.0);
    }
  }
}

/// S(z) = (Q - zQ')/(1 - Q'), with S(1) = 1.
inline double s_eval(const OffspringDistribution& d, double z) {
  check_unit(z);
  if (z == 1.0) return 1.0;
  if (d.kind() == Kind::igw) return d.igw_q() + (1.0 - d.igw_q()) * z;
  double w = 1.0 - z;
  return z + d.q_minus_id(w) / d.one_minus_dq(w);
}

/// 1 - S(1-w) without cancellation.
inline double s_tail(const OffspringDistribution& d, double w) { return d.gap(w) / d.one_minus_dq(w); }

/// g(z) with Q(z) - z = (1-z)(1-mean) + (1-z)^2 g(z).
inline double g_eval(const OffspringDistribution& d, double z) {
  check_unit(z);
  if (z == 1.0) throw DomainError("g_eval: z must be below 1");
  return d.g_coefficient_series(1.0 - z);
}

}  // namespace horton
