#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "analytic.hpp"
#include "distribution.hpp"
#include "error.hpp"
#include "oracle.hpp"
#include "pruning.hpp"
#include "sampler.hpp"
#include "tree.hpp"

namespace horton {

using json = nlohmann::json;

// ---- trees ------------------------------------------------------------------

inline json tree_to_json(const Tree& t) {
  json nodes = json::array();
  for (std::size_t v = 0; v < t.size(); ++v) {
    auto i = static_cast<Tree::index>(v);
    json node;
    node["parent"] = t.parent(i) == Tree::none ? json(nullptr) : json(t.parent(i));
    json ch = json::array();
    for (auto c : t.children(i)) ch.push_back(c);
    node["children"] = ch;
    nodes.push_back(node);
  }
  return json{{"nodes", nodes}, {"root", t.root()}};
}

inline Tree tree_from_json(const json& j) {
  if (!j.is_object() || !j.contains("nodes") || !j.contains("root")) throw DomainError("tree JSON needs nodes and root");
  std::vector<std::vector<Tree::index>> lists;
  std::vector<Tree::index> parents;
  for (const auto& node : j.at("nodes")) {
    std::vector<Tree::index> ch;
    for (const auto& c : node.at("children")) ch.push_back(c.get<Tree::index>());
    lists.push_back(std::move(ch));
    parents.push_back(node.at("parent").is_null() ? Tree::none : node.at("parent").get<Tree::index>());
  }
  Tree t = Tree::from_child_lists(lists, j.at("root").get<Tree::index>());
  for (std::size_t v = 0; v < parents.size(); ++v)
    if (t.parent(static_cast<Tree::index>(v)) != parents[v]) throw DomainError("tree JSON parent and child links disagree");
  return t;
}

// ---- distributions ----------------------------------------------------------

inline json distribution_to_json(const OffspringDistribution& d) {
  json j;
  j["kind"] = kind_name(d.kind());
  j["params"] = json::object();
  j["coefficients"] = json::array();
  j["tail_bound"] = nullptr;
  switch (d.kind()) {
    case Kind::explicit_finite: j["coefficients"] = d.coefficients(); break;
    case Kind::explicit_with_tail:
      j["coefficients"] = d.coefficients();
      j["tail_bound"] = {{"mass", d.tail_mass_bound()}, {"first_moment", d.tail_moment_bound()}};
      break;
    case Kind::igw: j["params"]["q"] = d.igw_q(); break;
    case Kind::zipf_example: break;
    case Kind::oscillatory: {
      const auto& p = d.oscillatory_params();
      j["params"] = {{"q0", p.q0}, {"A", p.A}, {"B", p.B}, {"left", p.left}, {"right", p.right}};
      break;
    }
    case Kind::pruned: {
      const auto& p = d.pruned_params();
      j["params"] = {{"u", p.u}, {"steps", p.steps}, {"base", distribution_to_json(*p.base)}};
      break;
    }
  }
  return j;
}

inline OffspringDistribution distribution_from_json(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  const json params = j.value("params", json::object());
  if (kind == "explicit_finite") return OffspringDistribution::explicit_finite(j.at("coefficients").get<std::vector<double>>());
  if (kind == "explicit_with_tail") {
    const auto& tb = j.at("tail_bound");
    return OffspringDistribution::explicit_with_tail(j.at("coefficients").get<std::vector<double>>(),
                                                     tb.at("mass").get<double>(), tb.at("first_moment").get<double>());
  }
  if (kind == "igw") return OffspringDistribution::igw(params.at("q").get<double>());
  if (kind == "zipf_example") return OffspringDistribution::zipf_example();
  if (kind == "oscillatory")
    return OffspringDistribution::oscillatory({params.at("q0").get<double>(), params.at("A").get<double>(),
                                               params.at("B").get<double>(), params.at("left").get<int>(),
                                               params.at("right").get<int>()});
  if (kind == "pruned")
    return OffspringDistribution::pruned(
        std::make_shared<const OffspringDistribution>(distribution_from_json(params.at("base"))),
        params.at("u").get<double>(), params.at("steps").get<int>());
  throw DomainError("unknown distribution kind: " + kind);
}

// ---- tables -----------------------------------------------------------------

inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

inline void write_trajectory_csv(std::ostream& os, const PruningTrajectory& tr) {
  os << "step,q0,mean,sup_distance,status\n";
  for (std::size_t k = 0; k < tr.q0_path.size(); ++k) {
    bool final_step = k + 1 == tr.q0_path.size();
    os << k << ',' << format_double(tr.q0_path[k]) << ',' << format_double(tr.mean_path[k]) << ','
       << format_double(tr.sup_distance[k]) << ',' << (final_step ? trajectory_status_name(tr.status) : "running")
       << '\n';
  }
}

/// One row per (i, j): estimate, standard error and sample size.
inline void write_tokunaga_csv(std::ostream& os, const TokunagaTable& t, std::uint64_t n = 0) {
  bool mc = t.provenance == Provenance::monte_carlo;
  bool orc = t.provenance == Provenance::oracle;
  os << "i,j,T,T_reg,t_total";
  if (mc) os << ",T_se,T_reg_se,n";
  if (orc) os << ",T_lo,T_hi,T_reg_lo,T_reg_hi";
  os << '\n';
  for (int j = 2; j <= t.K; ++j)
    for (int i = 1; i < j; ++i) {
      os << i << ',' << j << ',' << format_double(t.T[i][j]) << ',' << format_double(t.T_reg[i][j]) << ','
         << format_double(t.t_total[i][j]);
      if (mc) os << ',' << format_double(t.T_se[i][j]) << ',' << format_double(t.T_reg_se[i][j]) << ',' << n;
      if (orc)
        os << ',' << format_double(t.T_lo[i][j]) << ',' << format_double(t.T_hi[i][j]) << ','
           << format_double(t.T_reg_lo[i][j]) << ',' << format_double(t.T_reg_hi[i][j]);
      os << '\n';
    }
}

inline json tokunaga_to_json(const TokunagaTable& t) {
  json rows = json::array();
  for (int j = 2; j <= t.K; ++j)
    for (int i = 1; i < j; ++i) {
      json r{{"i", i}, {"j", j}, {"T", t.T[i][j]}, {"T_reg", t.T_reg[i][j]}, {"t_total", t.t_total[i][j]}};
      if (t.provenance == Provenance::monte_carlo) {
        r["T_se"] = t.T_se[i][j];
        r["T_reg_se"] = t.T_reg_se[i][j];
      }
      if (t.provenance == Provenance::oracle) {
        r["T_lo"] = t.T_lo[i][j];
        r["T_hi"] = t.T_hi[i][j];
        r["T_reg_lo"] = t.T_reg_lo[i][j];
        r["T_reg_hi"] = t.T_reg_hi[i][j];
      }
      rows.push_back(r);
    }
  return json{{"K", t.K}, {"provenance", provenance_name(t.provenance)}, {"entries", rows}};
}

/// Per-k rows: pi_hat, N_hat and N_k/N_1 with standard errors.
inline void write_estimates_csv(std::ostream& os, const McEstimates& e) {
  os << "quantity,k,estimate,se,n\n";
  for (int k = 1; k <= e.K; ++k) {
    os << "pi," << k << ',' << format_double(e.pi_hat[k].value) << ',' << format_double(e.pi_hat[k].se) << ','
       << (e.attempts - e.censored) << '\n';
    os << "N," << k << ',' << format_double(e.N_hat[k].value) << ',' << format_double(e.N_hat[k].se) << ',' << e.n
       << '\n';
    os << "N_ratio," << k << ',' << format_double(e.N_ratio_hat[k].value) << ','
       << format_double(e.N_ratio_hat[k].se) << ',' << e.n << '\n';
  }
}

inline json estimates_to_json(const McEstimates& e) {
  auto vec = [](const std::vector<Estimate>& v) {
    json a = json::array();
    for (std::size_t k = 1; k < v.size(); ++k) a.push_back({{"k", k}, {"estimate", v[k].value}, {"se", v[k].se}});
    return a;
  };
  return json{{"K", e.K},
              {"n", e.n},
              {"attempts", e.attempts},
              {"censored", e.censored},
              {"censoring_rate", e.censoring_rate},
              {"budget_exhausted", e.budget_exhausted},
              {"pi_hat", vec(e.pi_hat)},
              {"N_hat", vec(e.N_hat)},
              {"N_ratio_hat", vec(e.N_ratio_hat)},
              {"tokunaga", tokunaga_to_json(e.tokunaga)}};
}

inline json enumeration_to_json(const EnumerationResult& r) {
  json n = json::array();
  for (int j = 2; j <= r.K; ++j)
    for (int i = 1; i < j; ++i)
      n.push_back({{"i", i}, {"j", j}, {"n", r.n_side[i][j]}, {"n_reg", r.n_side_regular[i][j]}});
  json N = json::array();
  for (int k = 1; k <= r.K; ++k) N.push_back(r.N[k]);
  return json{{"K", r.K},
              {"max_vertices", r.max_vertices},
              {"pi_K", r.pi_K},
              {"covered_mass", r.covered_mass},
              {"omitted_mass", r.omitted_mass},
              {"truncation_bound", r.truncation_bound},
              {"tail_ratio", r.tail_ratio},
              {"sufficient", r.sufficient},
              {"partial_N", N},
              {"partial_n", n},
              {"tokunaga", tokunaga_to_json(r.tokunaga)}};
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  return json::parse(in);
}

}  // namespace horton
