#include "taxarb/tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace taxarb {

int ScenarioTree::ancestor_at(int index, int t) const {
  if (t > nodes[index].time) {
    throw std::invalid_argument("ancestor requested above the node's own time");
  }
  int cur = index;
  while (nodes[cur].time > t) cur = nodes[cur].parent;
  return cur;
}

bool ScenarioTree::on_path(int ancestor, int index) const {
  if (nodes[ancestor].time > nodes[index].time) return false;
  return ancestor_at(index, nodes[ancestor].time) == ancestor;
}

int TreeBuilder::add_root() {
  if (!nodes_.empty()) throw std::invalid_argument("tree already has a root");
  TreeNode root;
  root.id = 0;
  root.time = 0;
  root.parent = -1;
  root.branch_prob = rat(1);
  nodes_.push_back(root);
  return 0;
}

int TreeBuilder::add_child(int parent, const Rational& branch_prob) {
  if (parent < 0 || parent >= static_cast<int>(nodes_.size())) {
    throw std::invalid_argument("child added under a nonexistent parent");
  }
  TreeNode child;
  child.id = static_cast<int>(nodes_.size());
  child.time = nodes_[parent].time + 1;
  child.parent = parent;
  child.branch_prob = branch_prob;
  nodes_.push_back(child);
  nodes_[parent].children.push_back(child.id);
  return child.id;
}

ScenarioTree TreeBuilder::build() {
  ScenarioTree tree;
  tree.nodes = nodes_;
  int horizon = 0;
  for (const TreeNode& n : tree.nodes) horizon = std::max(horizon, n.time);
  tree.horizon = horizon;
  index_tree(tree);
  return tree;
}

void index_tree(ScenarioTree& tree) {
  const int n = tree.size();
  if (n == 0) throw std::invalid_argument("empty tree");
  if (tree.horizon < 0) throw std::invalid_argument("negative horizon");

  for (auto& node : tree.nodes) node.children.clear();

  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const TreeNode& node = tree.nodes[i];
    if (node.parent == -1) {
      ++roots;
      if (node.time != 0) {
        throw std::invalid_argument("root node must sit at time 0");
      }
      if (i != 0) {
        throw std::invalid_argument("root node must come first");
      }
      continue;
    }
    if (node.parent < 0 || node.parent >= n) {
      throw std::invalid_argument("node " + std::to_string(node.id) +
                                  " references a nonexistent parent");
    }
    if (node.parent >= i) {
      throw std::invalid_argument("node " + std::to_string(node.id) +
                                  " appears before its parent");
    }
    if (node.time != tree.nodes[node.parent].time + 1) {
      throw std::invalid_argument("node " + std::to_string(node.id) +
                                  " is not one period after its parent");
    }
    tree.nodes[node.parent].children.push_back(i);
  }
  if (roots != 1) {
    throw std::invalid_argument("tree must have exactly one root");
  }

  tree.by_time.assign(tree.horizon + 1, {});
  for (int i = 0; i < n; ++i) {
    const TreeNode& node = tree.nodes[i];
    if (node.time > tree.horizon) {
      throw std::invalid_argument("node " + std::to_string(node.id) +
                                  " lies beyond the horizon");
    }
    tree.by_time[node.time].push_back(i);
  }

  for (int i = 0; i < n; ++i) {
    const TreeNode& node = tree.nodes[i];
    if (node.children.empty() && node.time != tree.horizon) {
      throw std::invalid_argument("node " + std::to_string(node.id) +
                                  " ends before the horizon");
    }
  }
}

std::vector<std::string> tree_violations(const ScenarioTree& tree) {
  std::vector<std::string> out;
  for (int t = 0; t < tree.horizon; ++t) {
    for (int index : tree.at_time(t)) {
      const TreeNode& node = tree.node(index);
      Rational sum = 0;
      for (int child : node.children) {
        const Rational& p = tree.node(child).branch_prob;
        if (p <= 0) {
          out.push_back("branch probability at node " +
                        std::to_string(tree.node(child).id) +
                        " is not positive");
        }
        sum += p;
      }
      if (sum != 1) {
        out.push_back("branch probabilities under node " +
                      std::to_string(node.id) + " sum to " +
                      format_rational(sum) + ", expected 1");
      }
    }
  }
  return out;
}

std::vector<Atom> atoms_at(const ScenarioTree& tree, int t) {
  if (t < 0 || t > tree.horizon) {
    throw std::invalid_argument("time outside 0..horizon");
  }
  std::vector<Atom> out;
  out.reserve(tree.at_time(t).size());
  for (int index : tree.at_time(t)) {
    out.push_back({index, descendant_leaves(tree, index)});
  }
  return out;
}

std::vector<int> descendant_leaves(const ScenarioTree& tree, int node) {
  std::vector<int> out;
  std::vector<int> stack{node};
  while (!stack.empty()) {
    int cur = stack.back();
    stack.pop_back();
    if (tree.is_leaf(cur)) {
      out.push_back(cur);
      continue;
    }
    const auto& children = tree.node(cur).children;
    for (auto it = children.rbegin(); it != children.rend(); ++it) {
      stack.push_back(*it);
    }
  }
  return out;
}

Rational path_probability(const ScenarioTree& tree, int node) {
  Rational p = 1;
  for (int cur = node; cur != tree.root(); cur = tree.node(cur).parent) {
    p *= tree.node(cur).branch_prob;
  }
  return p;
}

}  // namespace taxarb
