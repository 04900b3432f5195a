#include <gtest/gtest.h>

#include <numeric>

#include "horton/sampler.hpp"
#include "horton/tree.hpp"

using namespace horton;

namespace {

const std::string leaf = "()";
std::string node(const std::string& a, const std::string& b) { return "(" + a + b + ")"; }
std::string node(const std::string& a, const std::string& b, const std::string& c) { return "(" + a + b + c + ")"; }
std::string planted(const std::string& s) { return "(" + s + ")"; }

const std::string cherry = node(leaf, leaf);
const std::string perfect3 = node(cherry, cherry);

Tree perfect_binary_4_leaves() { return parse_brackets(planted(perfect3)); }

// order-2 branch of three vertices: two side leaves, two principal leaves at the end
Tree caterpillar() { return parse_brackets(planted(node(leaf, node(leaf, cherry)))); }

// two order-3 subtrees meet at the top vertex, plus one side leaf there and
// a side cherry inside the second order-3 subtree
std::string order4_text() { return planted(node(perfect3, node(cherry, perfect3), leaf)); }

bool same_shape(const Tree& a, const Tree& b) { return canonical_form(a) == canonical_form(b); }

std::vector<Tree> fuzz_trees(const OffspringDistribution& d, int count, std::uint64_t seed) {
  std::vector<Tree> out;
  TreeSampler s(d);
  for (std::uint64_t i = 0; out.size() < static_cast<std::size_t>(count); ++i) {
    auto r = s.sample(seed, i, 20000);
    if (r.status == DrawStatus::ok) out.push_back(std::move(*r.tree));
  }
  return out;
}

std::vector<OffspringDistribution> fuzz_laws() {
  return {OffspringDistribution::binary(), OffspringDistribution::igw(0.75), OffspringDistribution::zipf_example(),
          OffspringDistribution::explicit_finite({0.6, 0.0, 0.3, 0.1})};
}

}  // namespace

TEST(Tree, EmptyAndSingleLeaf) {
  Tree e = Tree::empty();
  EXPECT_TRUE(e.is_empty());
  EXPECT_TRUE(e.is_planted());
  EXPECT_EQ(hs_order_by_pruning(e), 0);
  EXPECT_EQ(hs_order_recursive(e).order, 0);
  EXPECT_TRUE(horton_prune(e) == e);

  Tree l = Tree::single_leaf();
  EXPECT_EQ(l.size(), 2u);
  EXPECT_TRUE(horton_prune(l).is_empty());
  EXPECT_EQ(hs_order_by_pruning(l), 1);
  auto ot = hs_order_recursive(l);
  EXPECT_EQ(ot.order, 1);
  EXPECT_EQ(ot.vertex_order[1], 1);
  auto st = branch_statistics(l);
  ASSERT_EQ(st.order, 1);
  EXPECT_EQ(st.N[1], 1);
}

TEST(Tree, RejectsMalformedInput) {
  EXPECT_THROW(Tree::from_parents({Tree::none, Tree::none}), DomainError);
  EXPECT_THROW(Tree::from_parents({1, 0}), DomainError);
  EXPECT_THROW(Tree::from_child_lists({{1}, {0}}, 0), DomainError);
  EXPECT_THROW(Tree::from_child_lists({{1}, {}}, 0, 1), CapacityError);
  EXPECT_THROW(branch_statistics(Tree::empty()), DomainError);
  EXPECT_THROW(parse_brackets("(()"), DomainError);
}

TEST(SeriesReduce, ChainCollapses) {
  Tree chain = Tree::from_child_lists({{1}, {2}, {3}, {}}, 0);
  EXPECT_FALSE(chain.is_reduced());
  Tree r = series_reduce(chain);
  EXPECT_TRUE(same_shape(r, Tree::single_leaf()));
  EXPECT_TRUE(r.is_reduced());
}

TEST(SeriesReduce, ChainsInsideBranching) {
  // root - v; v has a two-step chain ending in a cherry and a one-step chain ending in a leaf
  std::string in = planted(node("(" + cherry + ")", "(" + leaf + ")"));
  Tree r = series_reduce(parse_brackets(in));
  EXPECT_TRUE(same_shape(r, parse_brackets(planted(node(cherry, leaf)))));
  EXPECT_TRUE(r == series_reduce(r));
}

TEST(SeriesReduce, ReducedTreeUnchanged) {
  Tree t = parse_brackets(order4_text());
  EXPECT_TRUE(t.is_reduced());
  EXPECT_TRUE(series_reduce(t) == t);
}

TEST(HortonPrune, PerfectBinary) {
  Tree t = perfect_binary_4_leaves();
  Tree r = horton_prune(t);
  EXPECT_TRUE(same_shape(r, parse_brackets(planted(cherry))));
  EXPECT_EQ(hs_order_by_pruning(t), 3);
  EXPECT_EQ(hs_order_recursive(t).order, 3);
}

TEST(HortonPrune, OrderFourSequence) {
  Tree t = parse_brackets(order4_text());
  std::vector<std::string> expected = {
      planted(node(cherry, node(leaf, cherry))),
      planted(cherry),
      planted(leaf),
      leaf,
  };
  Tree cur = t;
  for (const auto& e : expected) {
    cur = horton_prune(cur);
    EXPECT_TRUE(same_shape(cur, parse_brackets(e))) << canonical_form(cur);
    EXPECT_TRUE(cur.is_planted());
    EXPECT_TRUE(cur.is_reduced());
  }
  EXPECT_TRUE(cur.is_empty());
  EXPECT_EQ(hs_order_by_pruning(t), 4);
  EXPECT_EQ(hs_order_recursive(t).order, 4);
}

TEST(HortonPrune, RequiresPlanted) { EXPECT_THROW(horton_prune(parse_brackets(cherry)), DomainError); }

TEST(Order, CountingRule) {
  // children of orders {2, 1} and {2, 2}
  auto a = hs_order_recursive(parse_brackets(planted(node(cherry, leaf))));
  EXPECT_EQ(a.order, 2);
  auto b = hs_order_recursive(parse_brackets(planted(node(cherry, cherry))));
  EXPECT_EQ(b.order, 3);
  for (std::size_t v = 0; v < b.tree.size(); ++v) {
    if (b.tree.is_leaf(static_cast<Tree::index>(v))) {
      EXPECT_EQ(b.vertex_order[v], 1);
    }
  }
}

TEST(BranchStatistics, PerfectBinary) {
  auto st = branch_statistics(perfect_binary_4_leaves());
  ASSERT_EQ(st.order, 3);
  EXPECT_EQ(st.N[1], 4);
  EXPECT_EQ(st.N[2], 2);
  EXPECT_EQ(st.N[3], 1);
  // all four leaves hang off order-2 vertices
  EXPECT_EQ(st.n_side[1][2], 4);
  EXPECT_EQ(st.n_side[1][3], 0);
  EXPECT_EQ(st.n_side[2][3], 2);
  for (int j = 2; j <= 3; ++j)
    for (int i = 1; i < j; ++i) EXPECT_EQ(st.n_side_regular[i][j], 0);
}

TEST(BranchStatistics, Caterpillar) {
  auto st = branch_statistics(caterpillar());
  ASSERT_EQ(st.order, 2);
  EXPECT_EQ(st.N[1], 4);
  EXPECT_EQ(st.N[2], 1);
  EXPECT_EQ(st.n_side[1][2], 4);
  EXPECT_EQ(st.n_side_regular[1][2], 2);
  EXPECT_EQ(st.branch_vertices[2], 3);
}

TEST(BranchStatistics, OrderFourHandCount) {
  auto st = branch_statistics(parse_brackets(order4_text()));
  ASSERT_EQ(st.order, 4);
  EXPECT_EQ(st.N[1], 11);
  EXPECT_EQ(st.N[2], 5);
  EXPECT_EQ(st.N[3], 2);
  EXPECT_EQ(st.N[4], 1);
  // side leaf on the top vertex, which is terminal
  EXPECT_EQ(st.n_side[1][4], 1);
  EXPECT_EQ(st.n_side_regular[1][4], 0);
  // side cherry hangs off a regular vertex of an order-3 branch
  EXPECT_EQ(st.n_side[2][3], 5);
  EXPECT_EQ(st.n_side_regular[2][3], 1);
  EXPECT_EQ(st.n_side[3][4], 2);
}

TEST(Canonical, IgnoresChildOrder) {
  Tree a = parse_brackets(planted(node(cherry, leaf)));
  Tree b = parse_brackets(planted(node(leaf, cherry)));
  EXPECT_FALSE(a == b);
  EXPECT_TRUE(same_shape(a, b));
  EXPECT_EQ(canonical_form(parse_brackets(canonical_form(a))), canonical_form(a));
}

TEST(TreeProperties, OrderAlgorithmsAgree) {
  std::uint64_t seed = 11;
  for (const auto& d : fuzz_laws()) {
    for (const auto& t : fuzz_trees(d, 400, seed++)) {
      int k = hs_order_by_pruning(t);
      ASSERT_EQ(k, hs_order_recursive(t).order);
      auto ord = vertex_orders(t);
      EXPECT_EQ(*std::max_element(ord.begin(), ord.end()), k);
    }
  }
}

TEST(TreeProperties, PruningShiftsOrderAndBranches) {
  std::uint64_t seed = 101;
  for (const auto& d : fuzz_laws()) {
    for (const auto& t : fuzz_trees(d, 300, seed++)) {
      Tree r = horton_prune(t);
      int k = hs_order_recursive(t).order;
      ASSERT_EQ(hs_order_recursive(r).order, k - 1);
      EXPECT_TRUE(r.is_planted());
      EXPECT_TRUE(r.is_reduced());
      EXPECT_TRUE(series_reduce(r) == r);
      if (k < 2) continue;
      auto a = branch_statistics(t), b = branch_statistics(r);
      for (int j = 1; j < k; ++j) EXPECT_EQ(b.N[j], a.N[j + 1]);
      for (int j = 2; j < k; ++j)
        for (int i = 1; i < j; ++i) {
          EXPECT_EQ(b.n_side[i][j], a.n_side[i + 1][j + 1]);
          EXPECT_EQ(b.n_side_regular[i][j], a.n_side_regular[i + 1][j + 1]);
        }
    }
  }
}

TEST(TreeProperties, BranchStatisticsConsistency) {
  std::uint64_t seed = 202;
  for (const auto& d : fuzz_laws()) {
    for (const auto& t : fuzz_trees(d, 300, seed++)) {
      auto st = branch_statistics(t);
      EXPECT_EQ(st.N[st.order], 1);
      long long total = std::accumulate(st.branch_vertices.begin(), st.branch_vertices.end(), 0LL);
      EXPECT_EQ(total, static_cast<long long>(t.size()) - 1);
      // vertices with a parent of higher order, plus vertices continuing a
      // branch, plus the single child of the root
      auto ord = vertex_orders(t);
      long long same = 0, side = 0;
      for (std::size_t v = 0; v < t.size(); ++v) {
        auto u = static_cast<Tree::index>(v);
        if (u == t.root() || t.parent(u) == t.root()) continue;
        if (ord[t.parent(u)] == ord[u]) ++same;
      }
      for (int j = 2; j <= st.order; ++j)
        for (int i = 1; i < j; ++i) {
          side += st.n_side[i][j];
          EXPECT_LE(st.n_side_regular[i][j], st.n_side[i][j]);
        }
      EXPECT_EQ(same + side + 1, static_cast<long long>(t.size()) - 1);
    }
  }
}
