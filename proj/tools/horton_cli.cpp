#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "horton/io.hpp"

namespace fs = std::filesystem;
using namespace horton;

namespace {

constexpr const char* tool_version = "horton 1.0.0";
constexpr const char* out_dir_env = "HORTON_OUT_DIR";

enum Exit { ok = 0, usage = 2, numerical = 3, conditioning = 4 };

struct ConditioningFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// binary | zipf | igw:Q | oscillatory:Q0 | finite:q0,q1,... | @file.json
OffspringDistribution parse_dist(const std::string& spec) {
  if (spec == "binary") return OffspringDistribution::binary();
  if (spec == "zipf") return OffspringDistribution::zipf_example();
  if (!spec.empty() && spec[0] == '@') return distribution_from_json(read_json_file(spec.substr(1)));
  auto colon = spec.find(':');
  if (colon == std::string::npos) throw DomainError("unknown distribution spec: " + spec);
  std::string head = spec.substr(0, colon), rest = spec.substr(colon + 1);
  try {
    if (head == "igw") return OffspringDistribution::igw(std::stod(rest));
    if (head == "oscillatory") return oscillatory_invariant(std::stod(rest)).law;
    if (head == "finite") {
      std::vector<double> q;
      std::stringstream ss(rest);
      std::string item;
      while (std::getline(ss, item, ',')) q.push_back(std::stod(item));
      return OffspringDistribution::explicit_finite(q);
    }
  } catch (const std::invalid_argument& e) {
    if (dynamic_cast<const DomainError*>(&e)) throw;
    throw DomainError("cannot parse distribution spec: " + spec);
  }
  throw DomainError("unknown distribution spec: " + spec);
}

struct Common {
  std::string out_dir;
  unsigned threads = 0;
  std::string config_file;
};

fs::path prepare_out(const Common& c) {
  fs::path p = c.out_dir.empty() ? fs::path(std::getenv(out_dir_env) ? std::getenv(out_dir_env) : ".") : fs::path(c.out_dir);
  fs::create_directories(p);
  return p;
}

unsigned resolve_threads(unsigned t) {
  if (t > 0) return t;
  unsigned h = std::thread::hardware_concurrency();
  return h ? h : 1;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
}

void write_json(const fs::path& p, const json& j) { write_file(p, j.dump(2) + "\n"); }

json envelope(const std::string& command, const json& config) {
  return json{{"tool_version", tool_version}, {"command", command}, {"config", config}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Horton pruning of Galton-Watson trees and their offspring laws"};
  app.set_config("--config", "", "TOML/INI configuration file; flags take precedence");
  app.require_subcommand(1);
  Common common;
  app.add_option("--out", common.out_dir, std::string("output directory (default: $") + out_dir_env + " or .)");
  app.add_option("--threads", common.threads, "worker threads, 0 for all cores");

  // igw
  auto* igw = app.add_subcommand("igw", "IGW pmf, constants and Tokunaga table");
  double igw_q0 = 0.75;
  int igw_kmax = 50, igw_K = 8;
  std::string igw_sweep;
  igw->add_option("--q0", igw_q0, "q0 in [1/2, 1)");
  igw->add_option("--kmax", igw_kmax, "largest k in the pmf table");
  igw->add_option("--K", igw_K, "largest order in the Tokunaga table");
  igw->add_option("--sweep", igw_sweep, "lo:hi:step sweep of the constants over q0");

  // converge
  auto* conv = app.add_subcommand("converge", "iterate the pruning operator on a law");
  std::string conv_dist = "zipf";
  int conv_steps = 60;
  double conv_tol = 1e-6;
  conv->add_option("--dist", conv_dist, "binary | zipf | igw:Q | oscillatory:Q0 | finite:q0,q1,... | @law.json");
  conv->add_option("--steps", conv_steps, "maximum number of prunings");
  conv->add_option("--tol", conv_tol, "convergence tolerance");
  bool conv_dump = false;
  conv->add_flag("--dump-laws", conv_dump, "also write every step's law as JSON");

  // mc
  auto* mc = app.add_subcommand("mc", "Monte Carlo Tokunaga and Horton estimates");
  std::string mc_dist = "binary";
  int mc_K = 4;
  double mc_n = 1e5, mc_budget = 1e9, mc_maxv = 1e6;
  std::uint64_t mc_seed = 1;
  mc->add_option("--dist", mc_dist, "distribution spec");
  mc->add_option("--K", mc_K, "conditioning order");
  mc->add_option("--n", mc_n, "number of accepted trees");
  mc->add_option("--seed", mc_seed, "64-bit seed");
  mc->add_option("--max-vertices", mc_maxv, "vertex cap per tree");
  mc->add_option("--budget", mc_budget, "maximum number of attempts");

  // oscillatory
  auto* osc = app.add_subcommand("oscillatory", "oscillatory prune-invariant law");
  double osc_q0 = 0.8;
  int osc_nrange = 0, osc_mmax = 200;
  osc->add_option("--q0", osc_q0, "q0 in (1/2, 1)");
  osc->add_option("--n-range", osc_nrange, "summation half-width, 0 for automatic");
  osc->add_option("--m-max", osc_mmax, "largest m in the pmf table");

  // prune-tree
  auto* prune = app.add_subcommand("prune-tree", "Horton pruning of a tree file");
  std::string prune_in, prune_out;
  int prune_times = 1;
  prune->add_option("--in", prune_in, "tree JSON")->required();
  prune->add_option("--output", prune_out, "output tree JSON (default <out>/pruned_tree.json)");
  prune->add_option("--times", prune_times, "number of prunings");

  // order
  auto* order = app.add_subcommand("order", "order and branch statistics of a tree file");
  std::string order_in;
  order->add_option("--in", order_in, "tree JSON")->required();

  // enumerate
  auto* enumerate = app.add_subcommand("enumerate", "exact enumeration oracle for a finite law");
  std::string en_dist = "binary";
  int en_K = 3;
  std::size_t en_maxv = 20000;
  enumerate->add_option("--dist", en_dist, "finite distribution spec");
  enumerate->add_option("--K", en_K, "conditioning order");
  enumerate->add_option("--max-vertices", en_maxv, "size cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? ok : usage;
  }

  try {
    if (*igw) {
      fs::path out = prepare_out(common);
      json cfg{{"q0", igw_q0}, {"kmax", igw_kmax}, {"K", igw_K}, {"sweep", igw_sweep}};
      if (!igw_sweep.empty()) {
        double lo, hi, step;
        char c1, c2;
        std::stringstream ss(igw_sweep);
        if (!(ss >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0))
          throw DomainError("sweep must be lo:hi:step");
        std::ostringstream csv;
        csv << "q0,a,c,T1,R\n";
        for (int i = 0;; ++i) {
          double q = lo + i * step;
          if (q > hi + 1e-12) break;
          auto k = igw_constants(q);
          csv << format_double(q) << ',' << format_double(k.a) << ',' << format_double(k.c) << ','
              << format_double(k.T1) << ',' << format_double(k.R) << '\n';
        }
        write_file(out / "igw_sweep.csv", csv.str());
        write_json(out / "igw_sweep.json", envelope("igw", cfg));
        std::cout << "wrote " << (out / "igw_sweep.csv").string() << "\n";
        return ok;
      }
      auto d = OffspringDistribution::igw(igw_q0);
      auto k = igw_constants(igw_q0);
      std::ostringstream pmf;
      pmf << "k,q_k\n";
      for (int i = 0; i <= igw_kmax; ++i) pmf << i << ',' << format_double(d.pmf(static_cast<std::size_t>(i))) << '\n';
      write_file(out / "igw_pmf.csv", pmf.str());
      auto tab = tokunaga_analytic(d, igw_K);
      std::ostringstream tcsv;
      write_tokunaga_csv(tcsv, tab);
      write_file(out / "igw_tokunaga.csv", tcsv.str());
      auto h = horton_exponent(TokunagaSequence::self_similar(k.T1, k.a, k.c));
      json j = envelope("igw", cfg);
      j["constants"] = {{"q0", k.q0}, {"a", k.a}, {"c", k.c}, {"T1", k.T1}, {"R", k.R}, {"R_alt", k.R_alt}};
      j["horton_exponent_root"] = h.R;
      j["tokunaga"] = tokunaga_to_json(tab);
      write_json(out / "igw_constants.json", j);
      std::cout << "q0=" << format_double(k.q0) << " a=" << format_double(k.a) << " c=" << format_double(k.c)
                << " T1=" << format_double(k.T1) << " R=" << format_double(k.R) << "\n";
      return ok;
    }
    if (*conv) {
      fs::path out = prepare_out(common);
      auto d = parse_dist(conv_dist);
      auto tr = iterate_pruning(d, conv_steps, conv_tol);
      std::ostringstream csv;
      write_trajectory_csv(csv, tr);
      write_file(out / "trajectory.csv", csv.str());
      json j = envelope("converge", {{"dist", conv_dist}, {"steps", conv_steps}, {"tol", conv_tol}});
      j["law"] = distribution_to_json(d);
      j["status"] = trajectory_status_name(tr.status);
      j["limit_q"] = tr.limit_q;
      j["steps_taken"] = tr.q0_path.size() - 1;
      j["final_q0"] = tr.q0_path.back();
      j["diagnostic"] = tr.diagnostic;
      if (conv_dump) {
        json laws = json::array();
        for (const auto& s : tr.steps) laws.push_back(distribution_to_json(s));
        j["laws"] = laws;
      }
      write_json(out / "converge.json", j);
      std::cout << trajectory_status_name(tr.status);
      if (tr.status == TrajectoryStatus::converged_to_igw) std::cout << "(" << format_double(tr.limit_q) << ")";
      std::cout << " after " << tr.q0_path.size() - 1 << " steps\n";
      return tr.status == TrajectoryStatus::budget_exhausted ? numerical : ok;
    }
    if (*mc) {
      fs::path out = prepare_out(common);
      auto d = parse_dist(mc_dist);
      SampleConfig cfg;
      cfg.seed = mc_seed;
      cfg.n_trees = static_cast<std::uint64_t>(mc_n);
      cfg.max_vertices = static_cast<std::size_t>(mc_maxv);
      cfg.rejection_budget = static_cast<std::uint64_t>(mc_budget);
      cfg.threads = resolve_threads(common.threads);
      cfg.max_order = mc_K;
      auto od = order_distribution(d, mc_K);
      if (od.size() < mc_K || !(od.pi[mc_K] > 0)) throw ConditioningFailure("order K has zero probability");
      auto e = mc_tokunaga(d, mc_K, cfg);
      json config{{"dist", mc_dist},        {"K", mc_K},           {"n", cfg.n_trees},
                  {"seed", cfg.seed},       {"max_vertices", cfg.max_vertices},
                  {"budget", cfg.rejection_budget}, {"threads", cfg.threads}};
      std::ostringstream tcsv, ecsv;
      write_tokunaga_csv(tcsv, e.tokunaga, e.n);
      write_estimates_csv(ecsv, e);
      write_file(out / "mc_tokunaga.csv", tcsv.str());
      write_file(out / "mc_estimates.csv", ecsv.str());
      json j = envelope("mc", config);
      j["seed"] = cfg.seed;
      j["expected_attempts_per_tree"] = 1.0 / od.pi[mc_K];
      j["estimates"] = estimates_to_json(e);
      write_json(out / "mc_summary.json", j);
      std::cout << "accepted " << e.n << " of " << e.attempts << " attempts, censoring rate "
                << format_double(e.censoring_rate) << "\n";
      if (e.budget_exhausted) throw ConditioningFailure("rejection budget exhausted");
      return ok;
    }
    if (*osc) {
      fs::path out = prepare_out(common);
      auto r = oscillatory_invariant(osc_q0, osc_nrange, osc_mmax);
      auto ig = OffspringDistribution::igw(osc_q0);
      std::ostringstream pmf, res;
      pmf << "m,q_oscillatory,q_igw\n";
      for (int m = 0; m <= osc_mmax; ++m)
        pmf << m << ',' << format_double(r.coefficients[m]) << ',' << format_double(ig.pmf(static_cast<std::size_t>(m)))
            << '\n';
      res << "z,residual\n";
      double worst = 0;
      for (double z : standard_grid()) {
        double v = invariance_residual(r.law, {z});
        worst = std::max(worst, v);
        res << format_double(z) << ',' << format_double(v) << '\n';
      }
      write_file(out / "oscillatory_pmf.csv", pmf.str());
      write_file(out / "oscillatory_residual.csv", res.str());
      auto rep = regularity_probe(r.law);
      json j = envelope("oscillatory", {{"q0", osc_q0}, {"n_range", osc_nrange}, {"m_max", osc_mmax}});
      j["law"] = distribution_to_json(r.law);
      j["A"] = r.A;
      j["B"] = r.B;
      j["sign_changes"] = r.sign_changes;
      j["window"] = {r.left, r.right};
      j["criticality_error"] = r.criticality_error;
      j["invariance_residual"] = worst;
      j["L_from_slope"] = r.L_from_slope;
      j["L_from_B"] = r.L_from_B;
      j["probe"] = {{"status", probe_status_name(rep.status)}, {"ratio", rep.ratio},
                    {"depth", rep.depth_reached},          {"phases", rep.phases},
                    {"S1_by_phase", rep.phase_values},     {"spread", rep.spread}};
      write_json(out / "oscillatory.json", j);
      std::cout << "B=" << format_double(r.B) << " A=" << format_double(r.A) << " residual=" << format_double(worst)
                << " probe=" << probe_status_name(rep.status) << " spread=" << format_double(rep.spread) << "\n";
      return ok;
    }
    if (*prune) {
      Tree t = tree_from_json(read_json_file(prune_in));
      for (int i = 0; i < prune_times; ++i) t = horton_prune(t);
      fs::path dest = prune_out.empty() ? prepare_out(common) / "pruned_tree.json" : fs::path(prune_out);
      write_json(dest, tree_to_json(t));
      std::cout << "wrote " << dest.string() << "\n";
      return ok;
    }
    if (*order) {
      Tree t = tree_from_json(read_json_file(order_in));
      auto ot = hs_order_recursive(t);
      json j = envelope("order", {{"in", order_in}});
      j["order_by_pruning"] = hs_order_by_pruning(t);
      j["order_recursive"] = ot.order;
      j["vertex_order"] = ot.vertex_order;
      if (!t.is_empty() && t.is_planted()) {
        auto st = branch_statistics(t);
        j["N"] = std::vector<long long>(st.N.begin() + 1, st.N.end());
        json side = json::array();
        for (int jj = 2; jj <= st.order; ++jj)
          for (int i = 1; i < jj; ++i)
            side.push_back({{"i", i}, {"j", jj}, {"n", st.n_side[i][jj]}, {"n_reg", st.n_side_regular[i][jj]}});
        j["side_branches"] = side;
      }
      std::cout << j.dump(2) << "\n";
      return ok;
    }
    if (*enumerate) {
      fs::path out = prepare_out(common);
      auto d = parse_dist(en_dist);
      auto r = enumerate_conditional(d, en_K, en_maxv);
      json j = envelope("enumerate", {{"dist", en_dist}, {"K", en_K}, {"max_vertices", en_maxv}});
      j["result"] = enumeration_to_json(r);
      write_json(out / "enumeration.json", j);
      std::cout << "covered " << format_double(r.covered_mass) << " of pi_K " << format_double(r.pi_K) << "\n";
      return r.sufficient ? ok : numerical;
    }
  } catch (const ConditioningFailure& e) {
    std::cerr << "conditioning failure: " << e.what() << "\n";
    return conditioning;
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return usage;
  } catch (const json::exception& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return usage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return numerical;
  } catch (const StructuralError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return numerical;
  } catch (const CapacityError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return numerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return numerical;
  }
  return ok;
}
