// Samples a critical binary tree and prunes it down to the empty tree.
#include <iostream>

#include "horton/horton.hpp"

int main() {
  using namespace horton;
  auto d = OffspringDistribution::binary();
  ConditionedDraw draw = sample_conditioned(d, 4, 2024, 100000);
  if (!draw.tree) return 1;
  std::cout << "order-4 tree after " << draw.attempts << " attempts (expected " << draw.expected_attempts << ")\n";
  Tree t = *draw.tree;
  for (int step = 0; !t.is_empty(); ++step) {
    auto st = branch_statistics(t);
    std::cout << "R^" << step << ": " << t.size() - 1 << " edges, order " << st.order << ", N =";
    for (int k = 1; k <= st.order; ++k) std::cout << ' ' << st.N[k];
    std::cout << '\n';
    t = horton_prune(t);
  }
  std::cout << "empty\n";
}
