#pragma once

#include "taxarb/rational.hpp"

#include <string>
#include <vector>

namespace taxarb {

// Event tree carrying the filtration: the atoms of F_t are the time-t
// nodes, identified with the sets of leaves below them.
struct TreeNode {
  int id = 0;        // external identifier used in files and reports
  int time = 0;
  int parent = -1;   // index into ScenarioTree::nodes, -1 for the root
  std::vector<int> children;
  Rational branch_prob;  // conditional probability of this branch, 1 at the root
};

struct ScenarioTree {
  int horizon = 0;                        // T
  std::vector<TreeNode> nodes;            // parents precede children
  std::vector<std::vector<int>> by_time;  // node indices per time 0..T

  const TreeNode& node(int index) const { return nodes[index]; }
  const std::vector<int>& at_time(int t) const { return by_time[t]; }
  const std::vector<int>& leaves() const { return by_time[horizon]; }
  int root() const { return 0; }
  bool is_leaf(int index) const { return nodes[index].children.empty(); }
  int size() const { return static_cast<int>(nodes.size()); }

  // Ancestor of `index` at time t; requires t <= nodes[index].time.
  int ancestor_at(int index, int t) const;

  // True if `ancestor` lies on the path from the root to `index`.
  bool on_path(int ancestor, int index) const;
};

// Incremental construction for programmatic trees. Node ids equal indices.
class TreeBuilder {
 public:
  int add_root();
  int add_child(int parent, const Rational& branch_prob);

  // Computes the horizon as the maximal node time, indexes the tree and
  // checks the structural invariants (every non-leaf path reaches the
  // horizon, times increase by one along edges). Throws on violation.
  ScenarioTree build();

 private:
  std::vector<TreeNode> nodes_;
};

// Finalizes a tree whose nodes were filled in directly (file loaders):
// populates children/by_time from parent links and checks structure.
// Throws std::invalid_argument describing the first structural problem.
void index_tree(ScenarioTree& tree);

// Value-level findings: branch probabilities not positive or sibling sums
// different from one. Structure is assumed sound.
std::vector<std::string> tree_violations(const ScenarioTree& tree);

// Atom of F_t: a time-t node together with the leaves below it.
struct Atom {
  int node = -1;
  std::vector<int> leaves;
};

std::vector<Atom> atoms_at(const ScenarioTree& tree, int t);

std::vector<int> descendant_leaves(const ScenarioTree& tree, int node);

// Product of branch probabilities along the path from the root.
Rational path_probability(const ScenarioTree& tree, int node);

}  // namespace taxarb
