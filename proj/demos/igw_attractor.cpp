// Iterated pruning of three starting laws.
#include <cstdio>

#include "horton/horton.hpp"

int main() {
  using namespace horton;
  struct Start {
    const char* name;
    OffspringDistribution d;
  };
  Start starts[] = {{"k^-3 tail", OffspringDistribution::zipf_example()},
                    {"(0.6, 0, 0.4)", OffspringDistribution::explicit_finite({0.6, 0.0, 0.4})},
                    {"(0.6, 0, 0.2, 0.2)", OffspringDistribution::explicit_finite({0.6, 0.0, 0.2, 0.2})}};
  for (const auto& s : starts) {
    auto tr = iterate_pruning(s.d, 40, 1e-6);
    std::printf("%s: %s after %zu steps\n", s.name, trajectory_status_name(tr.status), tr.q0_path.size() - 1);
    for (std::size_t k = 0; k < tr.q0_path.size(); k += 5)
      std::printf("  step %2zu  q0 %.6f  mean %.6f  distance %.2e\n", k, tr.q0_path[k], tr.mean_path[k],
                  tr.sup_distance[k]);
  }
}
