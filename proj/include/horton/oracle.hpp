#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "analytic.hpp"
#include "distribution.hpp"
#include "error.hpp"
#include "numeric.hpp"
#include "tree.hpp"

namespace horton {

/// Exact partial expectations over planted trees of order K with at most
/// max_vertices non-root vertices. Expectations are unnormalized, i.e.
/// E[stat; ord = K, size <= max_vertices].
struct EnumerationResult {
  int K = 0;
  std::size_t max_vertices = 0;
  double pi_K = 0;
  double covered_mass = 0;
  double omitted_mass = 0;
  /// Bound on E[size; ord = K, size > max_vertices], which dominates the
  /// omitted part of every statistic.
  double truncation_bound = 0;
  double tail_ratio = 0;
  bool sufficient = false;
  std::vector<double> size_mass;  // index s = number of non-root vertices
  std::vector<double> N;          // index 1..K
  Matrix n_side, n_side_regular;
  TokunagaTable tokunaga;
};

namespace detail {

struct OracleLayout {
  int K;
  int pairs() const { return K * (K - 1) / 2; }
  int F() const { return 2 * pairs(); }
  int n(int i, int j) const { return (j - 1) * (j - 2) / 2 + (i - 1); }
  int n_reg(int i, int j) const { return n(i, j) + pairs(); }
};

/// Children aggregate: max order r, multiplicity of r capped at 2.
struct ChildState {
  double mass = 0;
  std::vector<double> H;  // expected number of children of each order
  std::vector<double> G;  // expected internal statistics
};

}  // namespace detail

/// Dynamic program over (order, size) that folds children one at a time.
/// It computes the same sums as enumerating every shape with its ordered
/// multiplicity, without materializing the shapes.
inline EnumerationResult enumerate_conditional(const OffspringDistribution& d, int K, std::size_t max_vertices,
                                               double coverage_target = 1e-6) {
  if (d.kind() != Kind::explicit_finite) throw DomainError("enumerate_conditional: needs a finite-support law");
  if (K < 1 || K > 4) throw DomainError("enumerate_conditional: K must lie in [1, 4]");
  const auto& q = d.coefficients();
  const int b = static_cast<int>(q.size()) - 1;
  detail::OracleLayout lay{K};
  const int F = lay.F();
  const std::size_t N = max_vertices;
  const int S = 2 * K;  // child states (r, c)
  auto sidx = [](int r, int c) { return (r - 1) * 2 + (c - 1); };

  auto od = order_distribution(d, K);
  EnumerationResult res;
  res.K = K;
  res.pi_K = od.size() >= K ? od.pi[K] : 0.0;

  // single[s][o]: mass and internal statistics of a planted subtree
  std::vector<std::vector<double>> mass(N + 1, std::vector<double>(static_cast<std::size_t>(K + 1), 0.0));
  std::vector<std::vector<std::vector<double>>> stat(
      N + 1, std::vector<std::vector<double>>(static_cast<std::size_t>(K + 1), std::vector<double>(F, 0.0)));
  // P[m][t][state] for m = 1..b children with total size t
  auto blank = [&] {
    detail::ChildState c;
    c.H.assign(static_cast<std::size_t>(K + 1), 0.0);
    c.G.assign(static_cast<std::size_t>(F), 0.0);
    return c;
  };
  std::vector<std::vector<std::vector<detail::ChildState>>> P(
      static_cast<std::size_t>(std::max(b, 1) + 1),
      std::vector<std::vector<detail::ChildState>>(N + 1));
  auto ensure = [&](int m, std::size_t t) {
    if (P[m][t].empty()) P[m][t].assign(static_cast<std::size_t>(S), blank());
  };

  res.size_mass.assign(N + 1, 0.0);
  res.N.assign(static_cast<std::size_t>(K + 1), 0.0);
  res.n_side = square_matrix(K);
  res.n_side_regular = square_matrix(K);
  CompensatedSum covered;
  std::size_t last = 0;

  for (std::size_t s = 1; s <= N; ++s) {
    // one child of size s-1 (available once s-1 >= 1)
    if (s >= 2 && b >= 1) {
      std::size_t t = s - 1;
      ensure(1, t);
      for (int o = 1; o <= K; ++o) {
        double m = mass[t][o];
        if (m == 0) continue;
        auto& st = P[1][t][sidx(o, 1)];
        st.mass += m;
        st.H[o] += m;
        for (int f = 0; f < F; ++f) st.G[f] += stat[t][o][f];
      }
    }
    // m children with total size s-1, m >= 2: fold a last child of size t1
    for (int m = 2; m <= b; ++m) {
      if (s < static_cast<std::size_t>(m) + 1) break;
      std::size_t t = s - 1;
      for (std::size_t t1 = 1; t1 + (m - 1) <= t; ++t1) {
        std::size_t rest = t - t1;
        if (P[m - 1][rest].empty()) continue;
        bool any = false;
        for (int o = 1; o <= K; ++o) any = any || mass[t1][o] != 0;
        if (!any) continue;
        ensure(m, t);
        auto& dst = P[m][t];
        for (int r = 1; r <= K; ++r)
          for (int c = 1; c <= 2; ++c) {
            const auto& a = P[m - 1][rest][sidx(r, c)];
            if (a.mass == 0) continue;
            for (int o = 1; o <= K; ++o) {
              double mo = mass[t1][o];
              if (mo == 0) continue;
              int nr = std::max(r, o);
              int nc = o > r ? 1 : (o == r ? std::min(c + 1, 2) : c);
              auto& z = dst[sidx(nr, nc)];
              z.mass += a.mass * mo;
              for (int i = 1; i <= K; ++i) z.H[i] += a.H[i] * mo;
              z.H[o] += a.mass * mo;
              for (int f = 0; f < F; ++f) z.G[f] += a.G[f] * mo + a.mass * stat[t1][o][f];
            }
          }
      }
    }
    // the vertex itself
    if (s == 1) mass[1][1] += q[0];
    for (int k = 1; k <= b; ++k) {
      if (q[k] == 0 || s < 2 || P[k][s - 1].empty()) continue;
      for (int r = 1; r <= K; ++r)
        for (int c = 1; c <= 2; ++c) {
          const auto& a = P[k][s - 1][sidx(r, c)];
          if (a.mass == 0) continue;
          int o = c == 1 ? r : r + 1;
          if (o > K) continue;
          mass[s][o] += q[k] * a.mass;
          auto& g = stat[s][o];
          for (int f = 0; f < F; ++f) g[f] += q[k] * a.G[f];
          for (int i = 1; i < o; ++i) {
            g[lay.n(i, o)] += q[k] * a.H[i];
            if (c == 1) g[lay.n_reg(i, o)] += q[k] * a.H[i];
          }
        }
    }
    res.size_mass[s] = mass[s][K];
    covered += mass[s][K];
    last = s;
    if (res.pi_K > 0 && covered.value() >= (1.0 - coverage_target) * res.pi_K && s >= 16) break;
  }
  res.max_vertices = last;
  res.size_mass.resize(last + 1);
  res.covered_mass = covered.value();
  res.omitted_mass = std::max(0.0, res.pi_K - res.covered_mass);
  res.sufficient = res.covered_mass >= (1.0 - coverage_target) * res.pi_K;

  CompensatedSum Nsum;
  for (int j = 2; j <= K; ++j)
    for (int i = 1; i < j; ++i) {
      CompensatedSum a, ar;
      for (std::size_t s = 1; s <= last; ++s) {
        a += stat[s][K][lay.n(i, j)];
        ar += stat[s][K][lay.n_reg(i, j)];
      }
      res.n_side[i][j] = a.value();
      res.n_side_regular[i][j] = ar.value();
    }
  for (int k = 1; k < K; ++k) {
    CompensatedSum x;
    for (int j = k + 1; j <= K; ++j) x += res.n_side[k][j];
    res.N[k] = x.value();
  }
  res.N[K] = res.covered_mass;

  // geometric extrapolation of the size-mass tail, period 2 for parity
  double ratio = 0, ref = 0;
  std::size_t window = std::max<std::size_t>(8, last / 5);
  for (std::size_t s = last > window ? last - window : 1; s + 2 <= last; ++s) {
    double m0 = res.size_mass[s], m2 = res.size_mass[s + 2];
    if (m0 > 0 && m2 > 0) ratio = std::max(ratio, std::sqrt(m2 / m0));
  }
  for (std::size_t s = last > 1 ? last - 1 : 1; s <= last; ++s) ref = std::max(ref, res.size_mass[s]);
  res.tail_ratio = ratio;
  if (ratio == 0 && res.omitted_mass == 0)
    res.truncation_bound = 0;
  else if (ratio >= 1.0 || ratio == 0)
    res.truncation_bound = std::numeric_limits<double>::infinity();
  else {
    double Nn = static_cast<double>(last);
    res.truncation_bound = ref * (Nn * ratio / (1 - ratio) + ratio / ((1 - ratio) * (1 - ratio)));
  }
  if (res.pi_K == 0) res.truncation_bound = 0;

  auto& tab = res.tokunaga;
  tab.K = K;
  tab.provenance = Provenance::oracle;
  tab.T = tab.T_reg = tab.t_total = tab.T_lo = tab.T_hi = tab.T_reg_lo = tab.T_reg_hi = square_matrix(K);
  double tau = res.truncation_bound;
  for (int j = 2; j <= K; ++j)
    for (int i = 1; i < j; ++i) {
      double den = res.N[j], a = res.n_side[i][j], ar = res.n_side_regular[i][j];
      double shift = i == j - 1 ? 2.0 : 0.0;
      tab.t_total[i][j] = a / den;
      tab.T[i][j] = a / den - shift;
      tab.T_lo[i][j] = a / (den + tau) - shift;
      tab.T_hi[i][j] = (a + tau) / den - shift;
      tab.T_reg[i][j] = ar / den;
      tab.T_reg_lo[i][j] = ar / (den + tau);
      tab.T_reg_hi[i][j] = (ar + tau) / den;
    }
  return res;
}

/// One unordered planted shape with its probability (ordered realizations
/// times the product of offspring probabilities).
struct ShapeRecord {
  std::string form;
  std::size_t size = 0;  // non-root vertices
  double probability = 0;
};

/// Literal enumeration of all planted shapes with at most max_vertices
/// non-root vertices. Intended for small sizes only.
inline std::vector<ShapeRecord> enumerate_shapes(const OffspringDistribution& d, std::size_t max_vertices) {
  if (d.kind() != Kind::explicit_finite) throw DomainError("enumerate_shapes: needs a finite-support law");
  const auto& q = d.coefficients();
  const int b = static_cast<int>(q.size()) - 1;
  struct Sub {
    std::string form;
    std::size_t size;
    double p;
  };
  std::vector<Sub> subs;  // sorted by size, then creation order
  std::vector<std::size_t> first_of_size(max_vertices + 2, 0);
  for (std::size_t s = 1; s <= max_vertices; ++s) {
    first_of_size[s] = subs.size();
    if (s == 1) {
      subs.push_back({"()", 1, q[0]});
      continue;
    }
    std::size_t limit = subs.size();
    for (int k = 2; k <= b; ++k) {
      if (q[k] == 0) continue;
      // nondecreasing index sequences with total size s-1
      std::vector<std::size_t> pick;
      auto rec = [&](auto&& self, std::size_t from, std::size_t remaining) -> void {
        if (static_cast<int>(pick.size()) == k) {
          if (remaining != 0) return;
          double w = q[k], mult = 1;
          std::vector<std::string> parts;
          std::size_t run = 1;
          for (std::size_t i = 0; i < pick.size(); ++i) {
            w *= subs[pick[i]].p;
            parts.push_back(subs[pick[i]].form);
            if (i > 0 && pick[i] == pick[i - 1])
              ++run;
            else
              run = 1;
            mult *= static_cast<double>(run);
          }
          double fact = 1;
          for (int i = 2; i <= k; ++i) fact *= i;
          std::sort(parts.begin(), parts.end());
          std::string f = "(";
          for (auto& x : parts) f += x;
          f += ")";
          subs.push_back({f, s, w * fact / mult});
          return;
        }
        for (std::size_t i = from; i < limit; ++i) {
          if (subs[i].size > remaining) break;
          pick.push_back(i);
          self(self, i, remaining - subs[i].size);
          pick.pop_back();
        }
      };
      rec(rec, 0, s - 1);
    }
  }
  std::vector<ShapeRecord> out;
  for (auto& x : subs) out.push_back({"(" + x.form + ")", x.size, x.p});
  return out;
}

}  // namespace horton
