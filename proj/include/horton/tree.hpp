#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace horton {

/// Finite rooted tree stored as a parent array plus CSR child lists.
/// Immutable after construction. Child order is kept as given.
class Tree {
 public:
  using index = std::int32_t;
  static constexpr index none = -1;
  static constexpr std::size_t default_cap = 10'000'000;

  /// The empty planted tree: a root without edges.
  static Tree empty() { return from_child_lists({{}}, 0); }

  /// Root with a single leaf child.
  static Tree single_leaf() { return from_child_lists({{1}, {}}, 0); }

  /// Builds from explicit child lists; parents are derived and checked.
  static Tree from_child_lists(const std::vector<std::vector<index>>& children, index root,
                               std::size_t cap = default_cap) {
    if (children.size() > cap) throw CapacityError("tree exceeds node cap");
    Tree t;
    std::size_t n = children.size();
    t.root_ = root;
    t.parent_.assign(n, none);
    t.offsets_.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) t.offsets_[v + 1] = t.offsets_[v] + static_cast<index>(children[v].size());
    t.flat_.reserve(static_cast<std::size_t>(t.offsets_[n]));
    for (std::size_t v = 0; v < n; ++v) {
      for (index c : children[v]) {
        if (c < 0 || static_cast<std::size_t>(c) >= n) throw DomainError("child index out of range");
        if (t.parent_[c] != none) throw DomainError("vertex has two parents");
        t.parent_[c] = static_cast<index>(v);
        t.flat_.push_back(c);
      }
    }
    t.validate();
    return t;
  }

  /// Builds from a parent array; children are listed in increasing index order.
  static Tree from_parents(const std::vector<index>& parent, std::size_t cap = default_cap) {
    if (parent.size() > cap) throw CapacityError("tree exceeds node cap");
    std::size_t n = parent.size();
    Tree t;
    t.parent_ = parent;
    t.offsets_.assign(n + 1, 0);
    t.root_ = none;
    for (std::size_t v = 0; v < n; ++v) {
      index p = parent[v];
      if (p == none) {
        if (t.root_ != none) throw DomainError("more than one root");
        t.root_ = static_cast<index>(v);
      } else {
        if (p < 0 || static_cast<std::size_t>(p) >= n) throw DomainError("parent index out of range");
        ++t.offsets_[p + 1];
      }
    }
    for (std::size_t v = 0; v < n; ++v) t.offsets_[v + 1] += t.offsets_[v];
    t.flat_.assign(static_cast<std::size_t>(t.offsets_[n]), 0);
    std::vector<index> fill(t.offsets_.begin(), t.offsets_.end() - 1);
    for (std::size_t v = 0; v < n; ++v)
      if (parent[v] != none) t.flat_[fill[parent[v]]++] = static_cast<index>(v);
    t.validate();
    return t;
  }

  std::size_t size() const { return parent_.size(); }
  index root() const { return root_; }
  index parent(index v) const { return parent_[v]; }
  std::span<const index> children(index v) const {
    return {flat_.data() + offsets_[v], static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
  }
  std::size_t child_count(index v) const { return static_cast<std::size_t>(offsets_[v + 1] - offsets_[v]); }
  bool is_empty() const { return size() == 1; }
  bool is_leaf(index v) const { return v != root_ && child_count(v) == 0; }

  bool is_planted() const { return is_empty() || child_count(root_) == 1; }

  bool is_reduced() const {
    for (std::size_t v = 0; v < size(); ++v)
      if (static_cast<index>(v) != root_ && child_count(static_cast<index>(v)) == 1) return false;
    return true;
  }

  /// Vertices in breadth-first order from the root.
  std::vector<index> bfs_order() const {
    std::vector<index> order;
    order.reserve(size());
    order.push_back(root_);
    for (std::size_t head = 0; head < order.size(); ++head)
      for (index c : children(order[head])) order.push_back(c);
    return order;
  }

  bool operator==(const Tree& o) const {
    return root_ == o.root_ && parent_ == o.parent_ && offsets_ == o.offsets_ && flat_ == o.flat_;
  }

 private:
  Tree() = default;

  void validate() const {
    if (parent_.empty()) throw DomainError("tree needs a root");
    if (root_ < 0 || static_cast<std::size_t>(root_) >= size()) throw DomainError("root index out of range");
    if (parent_[root_] != none) throw DomainError("root has a parent");
    for (std::size_t v = 0; v < size(); ++v)
      if (static_cast<index>(v) != root_ && parent_[v] == none) throw DomainError("more than one root");
    if (bfs_order().size() != size()) throw DomainError("parent links contain a cycle");
  }

  std::vector<index> parent_;
  std::vector<index> offsets_;
  std::vector<index> flat_;
  index root_ = 0;
};

namespace detail {

/// Rebuilds the subtree induced by vertices passing `keep` (the root is
/// always kept), splicing out non-root vertices with exactly one kept child.
template <class Keep>
Tree rebuild_reduced(const Tree& t, Keep keep) {
  using index = Tree::index;
  auto kept_children = [&](index v, std::vector<index>& out) {
    out.clear();
    for (index c : t.children(v))
      if (keep(c)) out.push_back(c);
  };
  std::vector<std::vector<index>> lists;
  std::vector<index> old_of;  // new index -> old index
  lists.emplace_back();
  old_of.push_back(t.root());
  std::vector<index> buf;
  for (std::size_t head = 0; head < old_of.size(); ++head) {
    kept_children(old_of[head], buf);
    std::vector<index> mine = buf;
    for (index c : mine) {
      std::vector<index> next;
      kept_children(c, next);
      while (next.size() == 1) {
        c = next[0];
        kept_children(c, next);
      }
      lists[head].push_back(static_cast<index>(old_of.size()));
      old_of.push_back(c);
      lists.emplace_back();
      if (old_of.size() > Tree::default_cap) throw CapacityError("tree exceeds node cap");
    }
  }
  return Tree::from_child_lists(lists, 0);
}

}  // namespace detail

/// Removes every non-root vertex with exactly one child.
inline Tree series_reduce(const Tree& t) {
  if (t.is_reduced()) return t;
  return detail::rebuild_reduced(t, [](Tree::index) { return true; });
}

/// Horton pruning: drop the leaves with their parental edges, then series reduce.
inline Tree horton_prune(const Tree& t) {
  if (t.is_empty()) return t;
  if (!t.is_planted()) throw DomainError("horton_prune expects a planted tree");
  return detail::rebuild_reduced(t, [&](Tree::index v) { return t.child_count(v) > 0; });
}

/// Number of prunings needed to reach the empty tree.
inline int hs_order_by_pruning(const Tree& t) {
  int k = 0;
  Tree cur = t;
  while (!cur.is_empty()) {
    cur = horton_prune(cur);
    ++k;
  }
  return k;
}

/// Horton-Strahler order of every vertex by the max / max+1 rule. The
/// root takes the order of the tree; the empty tree gets order 0.
inline std::vector<int> vertex_orders(const Tree& t) {
  std::vector<int> ord(t.size(), 0);
  if (t.is_empty()) return ord;
  auto bfs = t.bfs_order();
  for (auto it = bfs.rbegin(); it != bfs.rend(); ++it) {
    Tree::index v = *it;
    int r = 0, cnt = 0;
    for (Tree::index c : t.children(v)) {
      if (ord[c] > r) {
        r = ord[c];
        cnt = 1;
      } else if (ord[c] == r) {
        ++cnt;
      }
    }
    ord[v] = cnt == 0 ? 1 : (cnt == 1 ? r : r + 1);
  }
  return ord;
}

struct OrderedTree {
  Tree tree;
  std::vector<int> vertex_order;
  int order = 0;
};

inline OrderedTree hs_order_recursive(const Tree& t) {
  OrderedTree out{t, vertex_orders(t), 0};
  out.order = out.vertex_order[t.root()];
  return out;
}

/// Branch counts and side-branch counts of a planted tree. Vectors and
/// matrices are indexed from 1; row and column 0 are unused.
struct BranchStatistics {
  int order = 0;
  std::vector<long long> N;
  std::vector<std::vector<long long>> n_side;
  std::vector<std::vector<long long>> n_side_regular;
  /// Total number of vertices lying in branches of each order.
  std::vector<long long> branch_vertices;
};

inline BranchStatistics branch_statistics(const Tree& t) {
  if (t.is_empty()) throw DomainError("branch statistics undefined for the empty tree");
  if (!t.is_planted()) throw DomainError("branch statistics expect a planted tree");
  auto ord = vertex_orders(t);
  int K = ord[t.root()];
  BranchStatistics s;
  s.order = K;
  s.N.assign(K + 1, 0);
  s.branch_vertices.assign(K + 1, 0);
  s.n_side.assign(K + 1, std::vector<long long>(K + 1, 0));
  s.n_side_regular = s.n_side;
  for (std::size_t u = 0; u < t.size(); ++u) {
    auto v = static_cast<Tree::index>(u);
    if (v == t.root()) continue;
    Tree::index p = t.parent(v);
    int i = ord[v];
    s.branch_vertices[i]++;
    if (p == t.root() || ord[p] != i) s.N[i]++;
    if (p != t.root() && ord[p] > i) {
      int j = ord[p];
      s.n_side[i][j]++;
      bool terminal = std::none_of(t.children(p).begin(), t.children(p).end(),
                                   [&](Tree::index c) { return ord[c] == j; });
      if (!terminal) s.n_side_regular[i][j]++;
    }
  }
  return s;
}

/// Sorted-children bracket string; equal for trees equal up to child order.
inline std::string canonical_form(const Tree& t) {
  std::vector<std::string> form(t.size());
  auto bfs = t.bfs_order();
  for (auto it = bfs.rbegin(); it != bfs.rend(); ++it) {
    Tree::index v = *it;
    std::vector<std::string> parts;
    for (Tree::index c : t.children(v)) parts.push_back(std::move(form[c]));
    std::sort(parts.begin(), parts.end());
    std::string s = "(";
    for (auto& p : parts) s += p;
    s += ")";
    form[v] = std::move(s);
  }
  return form[t.root()];
}

/// Parses the bracket format produced by canonical_form. Children keep
/// their textual order and vertices are numbered in preorder.
inline Tree parse_brackets(std::string_view s) {
  std::vector<Tree::index> parent;
  std::vector<Tree::index> stack;
  for (char ch : s) {
    if (ch == '(') {
      parent.push_back(stack.empty() ? Tree::none : stack.back());
      if (stack.empty() && parent.size() > 1) throw DomainError("bracket string has several roots");
      stack.push_back(static_cast<Tree::index>(parent.size() - 1));
    } else if (ch == ')') {
      if (stack.empty()) throw DomainError("unbalanced bracket string");
      stack.pop_back();
    } else if (ch != ' ') {
      throw DomainError("unexpected character in bracket string");
    }
  }
  if (!stack.empty() || parent.empty()) throw DomainError("unbalanced bracket string");
  return Tree::from_parents(parent);
}

}  // namespace horton
