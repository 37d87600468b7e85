#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "hfts/core.hpp"

namespace hfts {

/// Rooted tree of named nodes. Exactly one root, acyclic, every internal
/// node with at least `min_children` children (default 2, lower bound 1).
class HierarchySpec {
 public:
  struct NodeDef {
    std::string id;
    std::vector<std::string> children;  // empty for leaves
  };

  static HierarchySpec build(const std::vector<NodeDef>& defs, int min_children = 2) {
    if (defs.empty()) throw ConfigError("hierarchy: no nodes");
    if (min_children < 1) throw ConfigError("hierarchy: min_children must be >= 1");
    HierarchySpec spec;
    const int v_count = static_cast<int>(defs.size());
    spec.ids_.reserve(defs.size());
    for (const auto& def : defs) {
      if (def.id.empty()) throw ConfigError("hierarchy: empty node id");
      if (spec.index_.count(def.id))
        throw ConfigError("hierarchy: duplicate node id '" + def.id + "'");
      spec.index_.emplace(def.id, static_cast<int>(spec.ids_.size()));
      spec.ids_.push_back(def.id);
    }
    spec.parent_.assign(defs.size(), -1);
    spec.children_.resize(defs.size());
    for (const auto& def : defs) {
      const int v = spec.index_.at(def.id);
      for (const auto& child_id : def.children) {
        auto it = spec.index_.find(child_id);
        if (it == spec.index_.end())
          throw ConfigError("hierarchy: node '" + def.id + "' references undefined child '" +
                            child_id + "'");
        const int c = it->second;
        if (c == v)
          throw ConfigError("hierarchy: node '" + def.id + "' lists itself as a child (cycle)");
        if (spec.parent_[c] != -1)
          throw ConfigError("hierarchy: node '" + child_id + "' has more than one parent");
        spec.parent_[c] = v;
        spec.children_[v].push_back(c);
      }
    }
    int root = -1;
    for (int v = 0; v < v_count; ++v) {
      if (spec.parent_[v] == -1) {
        if (root != -1)
          throw ConfigError("hierarchy: multiple roots ('" + spec.ids_[root] + "', '" +
                            spec.ids_[v] + "')");
        root = v;
      }
    }
    if (root == -1)
      throw ConfigError("hierarchy: no root node; the parent links form a cycle");
    spec.root_ = root;

    // depth + reachability in one walk; unreached nodes sit on a cycle
    spec.depth_.assign(defs.size(), -1);
    std::vector<int> stack{root};
    spec.depth_[root] = 0;
    std::vector<int> order;
    order.reserve(defs.size());
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      order.push_back(v);
      for (int c : spec.children_[v]) {
        spec.depth_[c] = spec.depth_[v] + 1;
        stack.push_back(c);
      }
    }
    if (order.size() != defs.size()) {
      std::string cyclic;
      for (int v = 0; v < v_count; ++v)
        if (spec.depth_[v] == -1) cyclic += (cyclic.empty() ? "" : ", ") + spec.ids_[v];
      throw ConfigError("hierarchy: cycle among unreachable nodes: " + cyclic);
    }
    for (int v = 0; v < v_count; ++v) {
      const auto n_children = static_cast<int>(spec.children_[v].size());
      if (n_children > 0 && n_children < min_children)
        throw ConfigError("hierarchy: internal node '" + spec.ids_[v] + "' has " +
                          std::to_string(n_children) + " children (minimum " +
                          std::to_string(min_children) + ")");
    }
    // children before parents
    spec.post_order_.assign(order.rbegin(), order.rend());
    spec.max_depth_ = 0;
    for (int d : spec.depth_) spec.max_depth_ = std::max(spec.max_depth_, d);
    return spec;
  }

  /// Default simulation topology: root, 2 children, 6 grandchildren, 18 leaves.
  static HierarchySpec fig4() {
    std::vector<NodeDef> defs;
    NodeDef root{"H", {}};
    for (int a = 1; a <= 2; ++a) {
      const std::string mid = "H_" + std::to_string(a);
      root.children.push_back(mid);
      NodeDef mid_def{mid, {}};
      for (int b = 1; b <= 3; ++b) {
        const std::string sub = mid + "_" + std::to_string(b);
        mid_def.children.push_back(sub);
        NodeDef sub_def{sub, {}};
        for (int c = 1; c <= 3; ++c) {
          const std::string leaf = sub + "_" + std::to_string(c);
          sub_def.children.push_back(leaf);
          defs.push_back(NodeDef{leaf, {}});
        }
        defs.push_back(std::move(sub_def));
      }
      defs.push_back(std::move(mid_def));
    }
    defs.push_back(std::move(root));
    return build(defs, 2);
  }

  int node_count() const { return static_cast<int>(ids_.size()); }
  int root() const { return root_; }
  const std::string& id(int v) const { return ids_[static_cast<std::size_t>(v)]; }
  bool contains(const std::string& id) const { return index_.count(id) != 0; }
  int index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw ConfigError("hierarchy: unknown node '" + id + "'");
    return it->second;
  }
  int parent(int v) const { return parent_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& children(int v) const { return children_[static_cast<std::size_t>(v)]; }
  bool is_leaf(int v) const { return children_[static_cast<std::size_t>(v)].empty(); }
  int depth(int v) const { return depth_[static_cast<std::size_t>(v)]; }
  int max_depth() const { return max_depth_; }
  /// Node indices with every child before its parent.
  const std::vector<int>& post_order() const { return post_order_; }
  std::vector<int> leaves() const {
    std::vector<int> out;
    for (int v = 0; v < node_count(); ++v)
      if (is_leaf(v)) out.push_back(v);
    return out;
  }

 private:
  HierarchySpec() = default;
  std::vector<std::string> ids_;
  std::vector<int> parent_;
  std::vector<std::vector<int>> children_;
  std::vector<int> depth_;
  std::vector<int> post_order_;
  std::unordered_map<std::string, int> index_;
  int root_ = -1;
  int max_depth_ = 0;
};

/// Report label for a level at `depth` below the root of a tree of height
/// `max_depth`. Levels are numbered from the bottom, as in the usual table
/// layout: Bottom level, Level 2, ..., Top level.
inline std::string level_label(int depth, int max_depth) {
  if (depth == 0) return "Top level";
  if (depth == max_depth) return "Bottom level";
  return "Level " + std::to_string(max_depth - depth + 1);
}

/// A series for every node of a hierarchy, all on one grid and of one length.
template <typename Scalar = double>
class HierarchyData {
 public:
  HierarchyData(HierarchySpec spec, std::vector<FunctionalTimeSeries<Scalar>> series)
      : spec_(std::move(spec)), series_(std::move(series)) {
    if (static_cast<int>(series_.size()) != spec_.node_count())
      throw DataError("hierarchy data: series count does not match node count");
    for (const auto& s : series_) {
      if (s.grid() != series_.front().grid())
        throw DataError("hierarchy data: all series must share one grid");
      if (s.size() != series_.front().size())
        throw DataError("hierarchy data: all series must have equal length");
    }
    if (series_.front().size() < 1)
      throw DataError("hierarchy data: series are empty");
  }

  const HierarchySpec& spec() const { return spec_; }
  const FunctionalTimeSeries<Scalar>& series(int v) const {
    return series_[static_cast<std::size_t>(v)];
  }
  const FunctionalTimeSeries<Scalar>& series(const std::string& id) const {
    return series_[static_cast<std::size_t>(spec_.index_of(id))];
  }
  Index length() const { return series_.front().size(); }
  const Grid<Scalar>& grid() const { return series_.front().grid(); }

 private:
  HierarchySpec spec_;
  std::vector<FunctionalTimeSeries<Scalar>> series_;
};

/// Completes a hierarchy from per-node observed series. Every leaf must be
/// provided; a missing internal node becomes the sum of its (completed)
/// children plus its error series when one is given. Provided internal
/// series are kept as observed.
template <typename Scalar>
HierarchyData<Scalar> fill_internal_series(
    const HierarchySpec& spec,
    const std::map<std::string, FunctionalTimeSeries<Scalar>>& provided,
    const std::map<std::string, FunctionalTimeSeries<Scalar>>& errors = {}) {
  if (provided.empty()) throw DataError("hierarchy data: no series provided");
  const Grid<Scalar>& grid = provided.begin()->second.grid();
  const Index n_obs = provided.begin()->second.size();
  for (const auto& [id, series] : provided) {
    spec.index_of(id);
    if (series.grid() != grid || series.size() != n_obs)
      throw DataError("hierarchy data: series for '" + id + "' has mismatched shape");
  }
  for (const auto& [id, series] : errors) {
    spec.index_of(id);
    if (series.grid() != grid || series.size() != n_obs)
      throw DataError("hierarchy data: error series for '" + id + "' has mismatched shape");
  }

  const auto v_count = static_cast<std::size_t>(spec.node_count());
  std::vector<Matrix<Scalar>> filled(v_count);
  for (int v : spec.post_order()) {
    const auto uv = static_cast<std::size_t>(v);
    if (auto it = provided.find(spec.id(v)); it != provided.end()) {
      filled[uv] = it->second.values();
      continue;
    }
    if (spec.is_leaf(v))
      throw DataError("hierarchy data: leaf '" + spec.id(v) + "' has no series");
    const auto& kids = spec.children(v);
    Matrix<Scalar> acc = filled[static_cast<std::size_t>(kids[0])];
    for (std::size_t i = 1; i < kids.size(); ++i)
      acc += filled[static_cast<std::size_t>(kids[i])];
    if (auto it = errors.find(spec.id(v)); it != errors.end()) acc += it->second.values();
    filled[uv] = std::move(acc);
  }

  std::vector<FunctionalTimeSeries<Scalar>> by_index;
  by_index.reserve(v_count);
  for (auto& values : filled)
    by_index.push_back(FunctionalTimeSeries<Scalar>(grid, std::move(values)));
  return HierarchyData<Scalar>(spec, std::move(by_index));
}

}  // namespace hfts
