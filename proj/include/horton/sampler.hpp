#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "analytic.hpp"
#include "distribution.hpp"
#include "error.hpp"
#include "numeric.hpp"
#include "pruning.hpp"
#include "rng.hpp"
#include "tree.hpp"

namespace horton {

/// Inverse-survival offspring sampler. A draw v in (0,1) maps to the
/// largest k with P(X >= k) > v.
class OffspringSampler {
 public:
  static constexpr std::uint64_t out_of_table = std::numeric_limits<std::uint64_t>::max();

  explicit OffspringSampler(const OffspringDistribution& d, std::size_t table_max = std::size_t{1} << 16)
      : kind_(d.kind()) {
    if (kind_ == Kind::igw) {
      q_ = d.igw_q();
      a_ = 1.0 / q_;
      if (q_ == 0.5) {
        surv_ = {1.0, 0.5, 0.5, 0.0};
        return;
      }
      // P(X >= k) = -q t_{k-1}, t_j = t_{j-1} (j - a)/j
      surv_.assign(table_max + 1, 0.0);
      surv_[0] = 1.0;
      double t = 1.0;
      for (std::size_t k = 1; k <= table_max; ++k) {
        surv_[k] = k == 1 ? 1.0 - q_ : -q_ * t;
        t *= (static_cast<double>(k) - a_) / static_cast<double>(k);
      }
      lg_norm_ = std::lgamma(1.0 - a_);
      return;
    }
    if (kind_ == Kind::zipf_example) return;
    std::size_t bound = d.support_bound();
    finite_ = bound <= table_max;
    std::size_t M = finite_ ? bound : std::min<std::size_t>(table_max, 4096);
    auto p = d.pmf_table(M);
    surv_.assign(M + 2, 0.0);
    CompensatedSum tail;
    for (std::size_t k = M + 1; k-- > 0;) {
      tail += p[k];
      surv_[k] = tail.value();
    }
    if (finite_) {
      double total = surv_[0];
      for (auto& x : surv_) x /= total;
    } else {
      // the mass beyond the table is kept as an explicit tail
      missing_ = std::max(0.0, 1.0 - surv_[0]);
      for (auto& x : surv_) x += missing_;
      surv_[0] = 1.0;
    }
  }

  /// Mass that falls outside the table for laws without a closed-form tail.
  double missing_mass() const { return missing_; }

  std::uint64_t draw(double v) const {
    if (kind_ == Kind::zipf_example) {
      if (v >= 1.0 / 3.0) return 0;
      double kstar = 0.5 * (1.0 + std::sqrt(1.0 + 8.0 / (3.0 * v)));
      if (kstar > 9e15) return out_of_table;
      auto k = static_cast<std::uint64_t>(std::floor(kstar));
      auto s = [](double kk) { return 2.0 / (3.0 * kk * (kk - 1.0)); };
      while (k > 2 && !(s(static_cast<double>(k)) > v)) --k;
      while (s(static_cast<double>(k + 1)) > v) ++k;
      return k;
    }
    // surv_ is decreasing; find the last index with surv_ > v
    if (surv_.back() > v) {
      if (kind_ == Kind::igw) return igw_tail(v);
      return out_of_table;
    }
    auto it = std::partition_point(surv_.begin(), surv_.end(), [v](double s) { return s > v; });
    return static_cast<std::uint64_t>(it - surv_.begin()) - 1;
  }

 private:
  double igw_survival(double k) const {
    // q Gamma(k-a) / (|Gamma(1-a)| Gamma(k))
    return q_ * std::exp(std::lgamma(k - a_) - lg_norm_ - std::lgamma(k));
  }

  std::uint64_t igw_tail(double v) const {
    double lo = static_cast<double>(surv_.size() - 1), hi = lo * 2;
    while (igw_survival(hi) > v) {
      lo = hi;
      hi *= 2;
      if (hi > 4e18) return out_of_table;
    }
    // invariant: S(lo) > v >= S(hi)
    while (hi - lo > 1) {
      double mid = std::floor(0.5 * (lo + hi));
      if (igw_survival(mid) > v)
        lo = mid;
      else
        hi = mid;
    }
    return static_cast<std::uint64_t>(lo);
  }

  Kind kind_;
  std::vector<double> surv_;
  double q_ = 0, a_ = 0, lg_norm_ = 0;
  double missing_ = 0;
  bool finite_ = true;
};

enum class DrawStatus { ok, censored, order_exceeded };

struct DrawResult {
  DrawStatus status = DrawStatus::ok;
  std::optional<Tree> tree;
  int order = 0;
  std::size_t vertices = 0;
};

/// Galton-Watson tree generator. Each tree uses its own counter stream
/// keyed by (seed, tree index); the counter is the vertex index.
class TreeSampler {
 public:
  explicit TreeSampler(const OffspringDistribution& d) : off_(d) {}

  /// Breadth-first draw of a planted tree.
  DrawResult sample(std::uint64_t seed, std::uint64_t index, std::size_t max_vertices) const {
    CounterRng rng(seed, index);
    std::vector<Tree::index> parent{Tree::none, 0};
    for (std::size_t v = 1; v < parent.size(); ++v) {
      std::uint64_t k = off_.draw(rng.uniform_at(v));
      if (k == OffspringSampler::out_of_table || parent.size() + k > max_vertices)
        return {DrawStatus::censored, std::nullopt, 0, parent.size()};
      for (std::uint64_t c = 0; c < k; ++c) parent.push_back(static_cast<Tree::index>(v));
    }
    std::size_t n = parent.size();
    return {DrawStatus::ok, Tree::from_parents(parent), 0, n};
  }

  /// Depth-first draw that stops as soon as some subtree exceeds max_order.
  DrawResult sample_capped(std::uint64_t seed, std::uint64_t index, int max_order, std::size_t max_vertices,
                           bool keep_tree = true) const {
    CounterRng rng(seed, index);
    struct Frame {
      Tree::index node;
      std::uint64_t remaining;
      int r, cnt;
    };
    std::vector<Tree::index> parent{Tree::none, 0};
    std::vector<Frame> stack;
    auto draw_at = [&](std::size_t v) { return off_.draw(rng.uniform_at(v)); };
    std::uint64_t k1 = draw_at(1);
    if (k1 == OffspringSampler::out_of_table || 2 + k1 > max_vertices) return {DrawStatus::censored, std::nullopt, 0, 2};
    int tree_order = 1;
    if (k1 > 0) stack.push_back({1, k1, 0, 0});
    auto absorb = [](Frame& f, int o) {
      if (o > f.r) {
        f.r = o;
        f.cnt = 1;
      } else if (o == f.r) {
        ++f.cnt;
      }
    };
    while (!stack.empty()) {
      Frame& top = stack.back();
      if (top.remaining > 0) {
        --top.remaining;
        auto c = static_cast<Tree::index>(parent.size());
        parent.push_back(top.node);
        std::uint64_t k = draw_at(static_cast<std::size_t>(c));
        if (k == OffspringSampler::out_of_table || parent.size() + k > max_vertices)
          return {DrawStatus::censored, std::nullopt, 0, parent.size()};
        if (k == 0)
          absorb(top, 1);
        else
          stack.push_back({c, k, 0, 0});
        continue;
      }
      int o = top.cnt == 1 ? top.r : top.r + 1;
      if (o > max_order) return {DrawStatus::order_exceeded, std::nullopt, o, parent.size()};
      stack.pop_back();
      if (stack.empty())
        tree_order = o;
      else
        absorb(stack.back(), o);
    }
    DrawResult res{DrawStatus::ok, std::nullopt, tree_order, parent.size()};
    if (keep_tree) res.tree = Tree::from_parents(parent);
    return res;
  }

  const OffspringSampler& offspring() const { return off_; }

 private:
  OffspringSampler off_;
};

inline DrawResult sample_tree(const OffspringDistribution& d, std::uint64_t seed, std::size_t max_vertices,
                              std::uint64_t index = 0) {
  return TreeSampler(d).sample(seed, index, max_vertices);
}

struct ConditionedDraw {
  std::optional<Tree> tree;
  std::uint64_t attempts = 0;
  std::uint64_t censored = 0;
  /// 1/pi_K from the analytic order distribution.
  double expected_attempts = 0;
};

/// Rejection sampling from the law conditioned on order K.
inline ConditionedDraw sample_conditioned(const OffspringDistribution& d, int K, std::uint64_t seed,
                                          std::uint64_t budget, std::size_t max_vertices = Tree::default_cap) {
  if (K < 1) throw DomainError("sample_conditioned: K must be positive");
  auto od = order_distribution(d, K);
  if (od.size() < K || !(od.pi[K] > 0)) throw DomainError("sample_conditioned: pi_K is zero");
  TreeSampler s(d);
  ConditionedDraw out;
  out.expected_attempts = 1.0 / od.pi[K];
  for (std::uint64_t i = 0; i < budget; ++i) {
    ++out.attempts;
    auto r = s.sample_capped(seed, i, K, max_vertices);
    if (r.status == DrawStatus::censored) ++out.censored;
    if (r.status == DrawStatus::ok && r.order == K) {
      out.tree = std::move(r.tree);
      return out;
    }
  }
  return out;
}

struct SampleConfig {
  std::uint64_t seed = 1;
  std::uint64_t n_trees = 1000;
  std::size_t max_vertices = 1'000'000;
  int max_order = 4;
  std::uint64_t rejection_budget = 100'000'000;
  unsigned threads = 1;
};

struct Estimate {
  double value = 0, se = 0;
};

struct McEstimates {
  int K = 0;
  std::uint64_t n = 0;
  std::uint64_t attempts = 0;
  std::uint64_t censored = 0;
  double censoring_rate = 0;
  bool budget_exhausted = false;
  /// Index 1..K; fraction of uncensored attempts with order j.
  std::vector<Estimate> pi_hat;
  /// Mean branch counts E_K[N_k] and ratios E_K[N_k]/E_K[N_1].
  std::vector<Estimate> N_hat;
  std::vector<Estimate> N_ratio_hat;
  TokunagaTable tokunaga;
};

namespace detail {

/// Feature layout: N_1..N_K, then n_{i,j} and n^o_{i,j} for i < j.
struct FeatureLayout {
  int K;
  int pairs() const { return K * (K - 1) / 2; }
  int size() const { return K + 2 * pairs(); }
  int N(int k) const { return k - 1; }
  int pair(int i, int j) const { return K + (j - 1) * (j - 2) / 2 + (i - 1); }
  int n(int i, int j) const { return pair(i, j); }
  int n_reg(int i, int j) const { return pair(i, j) + pairs(); }
};

struct BlockResult {
  std::vector<std::vector<double>> features;
  std::vector<std::uint64_t> accepted_at;  // attempt offset within the block
  std::vector<std::int8_t> outcome;        // order, 0 for censored, K+1 for exceeded
};

}  // namespace detail

/// Order-conditioned Monte Carlo estimates of Tokunaga coefficients and
/// Horton ratios. Attempts are processed in fixed blocks whose results are
/// merged in attempt order, so the output does not depend on the thread count.
inline McEstimates mc_tokunaga(const OffspringDistribution& d, int K, const SampleConfig& cfg) {
  if (K < 2 || K > 60) throw DomainError("mc_tokunaga: K must lie in [2, 60]");
  if (cfg.n_trees < 2) throw DomainError("mc_tokunaga: need at least two trees");
  TreeSampler sampler(d);
  detail::FeatureLayout lay{K};
  const int F = lay.size();
  constexpr std::uint64_t block = 4096;
  unsigned threads = std::max(1u, cfg.threads);

  // the last block is shortened so the attempt count never exceeds the budget
  auto block_len = [&](std::uint64_t b) { return std::min(block, cfg.rejection_budget - b * block); };
  auto run_block = [&](std::uint64_t b) {
    detail::BlockResult br;
    br.outcome.assign(block_len(b), 0);
    for (std::uint64_t i = 0; i < br.outcome.size(); ++i) {
      std::uint64_t attempt = b * block + i;
      auto r = sampler.sample_capped(cfg.seed, attempt, K, cfg.max_vertices);
      if (r.status == DrawStatus::censored) continue;
      if (r.status == DrawStatus::order_exceeded) {
        br.outcome[i] = static_cast<std::int8_t>(K + 1);
        continue;
      }
      br.outcome[i] = static_cast<std::int8_t>(r.order);
      if (r.order != K) continue;
      auto st = branch_statistics(*r.tree);
      std::vector<double> f(static_cast<std::size_t>(F), 0.0);
      for (int k = 1; k <= K; ++k) f[lay.N(k)] = static_cast<double>(st.N[k]);
      for (int j = 2; j <= K; ++j)
        for (int i = 1; i < j; ++i) {
          f[lay.n(i, j)] = static_cast<double>(st.n_side[i][j]);
          f[lay.n_reg(i, j)] = static_cast<double>(st.n_side_regular[i][j]);
        }
      br.features.push_back(std::move(f));
      br.accepted_at.push_back(i);
    }
    return br;
  };

  std::vector<double> S(static_cast<std::size_t>(F), 0.0), SS(static_cast<std::size_t>(F * F), 0.0);
  std::vector<std::uint64_t> hist(static_cast<std::size_t>(K + 2), 0);
  McEstimates est;
  est.K = K;
  std::uint64_t n = 0, attempts = 0;
  const std::uint64_t max_blocks = (cfg.rejection_budget + block - 1) / block;
  bool done = false;
  for (std::uint64_t b0 = 0; b0 < max_blocks && !done; b0 += threads) {
    std::uint64_t nb = std::min<std::uint64_t>(threads, max_blocks - b0);
    std::vector<detail::BlockResult> res(nb);
    if (nb == 1) {
      res[0] = run_block(b0);
    } else {
      std::vector<std::thread> pool;
      for (std::uint64_t t = 0; t < nb; ++t) pool.emplace_back([&, t] { res[t] = run_block(b0 + t); });
      for (auto& th : pool) th.join();
    }
    for (std::uint64_t t = 0; t < nb && !done; ++t) {
      auto& br = res[t];
      std::uint64_t limit = br.outcome.size();
      std::size_t take = br.features.size();
      if (n + take >= cfg.n_trees) {
        take = static_cast<std::size_t>(cfg.n_trees - n);
        limit = br.accepted_at[take - 1] + 1;
        done = true;
      }
      for (std::size_t a = 0; a < take; ++a) {
        const auto& f = br.features[a];
        for (int x = 0; x < F; ++x) {
          S[x] += f[x];
          for (int y = 0; y < F; ++y) SS[x * F + y] += f[x] * f[y];
        }
      }
      n += take;
      for (std::uint64_t i = 0; i < limit; ++i) hist[static_cast<std::size_t>(br.outcome[i])]++;
      attempts += limit;
    }
  }
  est.n = n;
  est.attempts = attempts;
  est.censored = hist[0];
  est.censoring_rate = attempts ? static_cast<double>(hist[0]) / static_cast<double>(attempts) : 0.0;
  est.budget_exhausted = n < cfg.n_trees;
  if (n < 2) return est;

  const double dn = static_cast<double>(n);
  auto mean = [&](int x) { return S[x] / dn; };
  auto cov = [&](int x, int y) { return (SS[x * F + y] - S[x] * S[y] / dn) / (dn - 1.0); };
  auto ratio = [&](int a, int b) -> Estimate {
    double ma = mean(a), mb = mean(b);
    if (!(mb > 0)) throw ConsistencyError("mc_tokunaga: zero denominator in ratio estimator");
    double r = ma / mb;
    double var = (cov(a, a) - 2.0 * r * cov(a, b) + r * r * cov(b, b)) / (mb * mb) / dn;
    return {r, std::sqrt(std::max(0.0, var))};
  };

  double uncensored = static_cast<double>(attempts - hist[0]);
  est.pi_hat.assign(static_cast<std::size_t>(K + 1), {});
  est.N_hat.assign(static_cast<std::size_t>(K + 1), {});
  est.N_ratio_hat.assign(static_cast<std::size_t>(K + 1), {});
  for (int j = 1; j <= K; ++j) {
    double p = static_cast<double>(hist[static_cast<std::size_t>(j)]) / uncensored;
    est.pi_hat[j] = {p, std::sqrt(p * (1.0 - p) / uncensored)};
    est.N_hat[j] = {mean(lay.N(j)), std::sqrt(cov(lay.N(j), lay.N(j)) / dn)};
    est.N_ratio_hat[j] = j == 1 ? Estimate{1.0, 0.0} : ratio(lay.N(j), lay.N(1));
  }
  auto& tab = est.tokunaga;
  tab.K = K;
  tab.provenance = Provenance::monte_carlo;
  tab.T = tab.T_reg = tab.t_total = tab.T_se = tab.T_reg_se = square_matrix(K);
  for (int j = 2; j <= K; ++j)
    for (int i = 1; i < j; ++i) {
      auto t = ratio(lay.n(i, j), lay.N(j));
      auto to = ratio(lay.n_reg(i, j), lay.N(j));
      tab.t_total[i][j] = t.value;
      tab.T[i][j] = t.value - (i == j - 1 ? 2.0 : 0.0);
      tab.T_se[i][j] = t.se;
      tab.T_reg[i][j] = to.value;
      tab.T_reg_se[i][j] = to.se;
    }
  return est;
}

/// Two-sample chi-square homogeneity test on category counts. Categories
/// with fewer than `min_count` combined observations are pooled.
struct ChiSquareResult {
  double statistic = 0;
  int dof = 0;
  double p_value = 1;
};

inline ChiSquareResult chi_square_two_sample(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b,
                                             std::uint64_t min_count = 10) {
  if (a.size() != b.size()) throw DomainError("chi_square_two_sample: category mismatch");
  std::vector<std::pair<double, double>> cats;
  double pa = 0, pb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] + b[i] >= min_count) {
      cats.emplace_back(static_cast<double>(a[i]), static_cast<double>(b[i]));
    } else {
      pa += static_cast<double>(a[i]);
      pb += static_cast<double>(b[i]);
    }
  }
  if (pa + pb > 0) cats.emplace_back(pa, pb);
  double na = 0, nb = 0;
  for (auto& [x, y] : cats) {
    na += x;
    nb += y;
  }
  ChiSquareResult r;
  if (cats.size() < 2 || na == 0 || nb == 0) return r;
  double ka = std::sqrt(nb / na), kb = std::sqrt(na / nb);
  for (auto& [x, y] : cats) {
    if (x + y == 0) continue;
    double dlt = ka * x - kb * y;
    r.statistic += dlt * dlt / (x + y);
  }
  r.dof = static_cast<int>(cats.size()) - 1;
  boost::math::chi_squared dist(r.dof);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

struct CommutationResult {
  /// Order histograms; the last bin pools orders above the cap.
  std::vector<std::uint64_t> prune_then_count, sample_pruned_law;
  ChiSquareResult order_test;
  /// Shape histograms over small canonical shapes plus a pooled bin.
  ChiSquareResult shape_test;
  std::uint64_t attempts_a = 0, attempts_b = 0, censored_a = 0, censored_b = 0;
};

/// Compares horton_prune(sample(d)) conditioned nonempty with sample(prune_distribution(d)).
inline CommutationResult commutation_test(const OffspringDistribution& d, std::uint64_t n, std::uint64_t seed,
                                          int order_cap = 6, std::size_t max_vertices = 1'000'000,
                                          std::size_t shape_vertices = 9) {
  TreeSampler sa(d);
  TreeSampler sb(prune_distribution(d));
  CommutationResult res;
  res.prune_then_count.assign(static_cast<std::size_t>(order_cap + 1), 0);
  res.sample_pruned_law.assign(static_cast<std::size_t>(order_cap + 1), 0);
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> shapes;
  std::uint64_t pooled_a = 0, pooled_b = 0;
  auto bin = [&](int o) { return static_cast<std::size_t>(std::min(o, order_cap + 1) - 1); };
  // side A: sample, prune, keep nonempty results
  for (std::uint64_t got = 0, i = 0; got < n; ++i) {
    ++res.attempts_a;
    auto r = sa.sample_capped(seed, i, order_cap + 1, max_vertices);
    if (r.status == DrawStatus::censored) {
      ++res.censored_a;
      continue;
    }
    if (r.status == DrawStatus::order_exceeded) {
      res.prune_then_count[static_cast<std::size_t>(order_cap)]++;
      ++pooled_a;
      ++got;
      continue;
    }
    if (r.order < 2) continue;
    Tree p = horton_prune(*r.tree);
    int o = vertex_orders(p)[p.root()];
    res.prune_then_count[bin(o)]++;
    if (p.size() <= shape_vertices)
      shapes[canonical_form(p)].first++;
    else
      ++pooled_a;
    ++got;
  }
  // side B: sample the pruned law directly with an independent stream
  const std::uint64_t seed_b = mix64(seed ^ 0x5bd1e995u);
  for (std::uint64_t got = 0, i = 0; got < n; ++i) {
    ++res.attempts_b;
    auto r = sb.sample_capped(seed_b, i, order_cap, max_vertices);
    if (r.status == DrawStatus::censored) {
      ++res.censored_b;
      continue;
    }
    ++got;
    if (r.status == DrawStatus::order_exceeded) {
      res.sample_pruned_law[static_cast<std::size_t>(order_cap)]++;
      ++pooled_b;
      continue;
    }
    res.sample_pruned_law[bin(r.order)]++;
    if (r.tree->size() <= shape_vertices)
      shapes[canonical_form(*r.tree)].second++;
    else
      ++pooled_b;
  }
  res.order_test = chi_square_two_sample(res.prune_then_count, res.sample_pruned_law);
  std::vector<std::uint64_t> ha, hb;
  for (auto& [k, v] : shapes) {
    ha.push_back(v.first);
    hb.push_back(v.second);
  }
  ha.push_back(pooled_a);
  hb.push_back(pooled_b);
  res.shape_test = chi_square_two_sample(ha, hb);
  return res;
}

}  // namespace horton
