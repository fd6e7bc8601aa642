#pragma once

#include "lvcheck/layout.hpp"
#include "lvcheck/matrix.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace lvcheck {

inline constexpr std::size_t kDefaultThreshold = 37;

struct ComponentNode {
  int node_id = 0;
  std::string resource_id;
  ComponentKind kind = ComponentKind::Text;
  Rect bounds;
  int group_id = 0;
  RawView raw;  // originating view, children stripped
  std::optional<int> label;
};

/// Attribute-free structural node, one per node group.
struct ContainerNode {
  int node_id = 0;
  int group_id = 0;
  std::vector<int> member_ids;
  Rect bounds;  // bounding box of the members
};

enum class EdgeClass { ComponentComponent, ContainerComponent, ContainerContainer };

std::string_view to_string(EdgeClass c);

struct Edge {
  int src = 0;
  int dst = 0;
  double weight = 0.0;
  EdgeClass edge_class = EdgeClass::ComponentComponent;

  bool operator==(const Edge&) const = default;
};

/// Members of one group in level-order traversal of the group's subtree.
struct NodeGroup {
  int group_id = 0;
  std::vector<int> members;
  std::vector<int> levels;  // tree depth of each member, relative to the branch
};

struct NodeSet {
  std::vector<ComponentNode> components;
  std::vector<ContainerNode> containers;
  std::vector<NodeGroup> groups;
};

struct GuiGraph {
  std::vector<ComponentNode> components;
  std::vector<ContainerNode> containers;
  std::vector<NodeGroup> groups;
  std::vector<Edge> edges;

  std::size_t n_real() const noexcept { return components.size() + containers.size(); }
};

struct GraphOptions {
  int adjacency_gap_px = 5;  // strict: gap < this draws an edge
};

/// Groups components under the containers formed by the main branches of
/// the tree. Component ids follow document order; container ids follow the
/// components, ordered top-to-bottom, then left-to-right, then document order.
/// Throws EmptyGui when no component survives.
NodeSet identify_nodes(const LayoutTree& tree);

std::vector<Edge> component_edges(const NodeGroup& group, const std::vector<ComponentNode>& components,
                                  const GraphOptions& opts = {});
std::vector<Edge> container_component_edges(const ContainerNode& container);
/// `containers` must already be in chain order.
std::vector<Edge> container_chain_edges(const std::vector<ContainerNode>& containers);

/// Raw weight of every non container-container edge is the out-degree of its
/// destination over the directed edge list; raw weights are then min-max
/// scaled into [0, 1] (all equal -> 1). Container-container edges stay 1.
GuiGraph assign_weights(GuiGraph graph);

/// identify_nodes + all three edge classes + assign_weights.
GuiGraph build_graph(const LayoutTree& filtered, const GraphOptions& opts = {});

struct GraphTensors {
  Matrix adjacency;     // N x N, symmetric, zero beyond n_real
  Matrix renormalized;  // D^-1/2 (A + I) D^-1/2
  Matrix features;      // N x F
  std::vector<int> labels;            // class index or -1
  std::vector<bool> real_mask;        // row < n_real
  std::vector<bool> component_mask;   // row is a component node

  std::size_t n() const noexcept { return adjacency.rows(); }
};

/// Weighted symmetric adjacency padded to `threshold`. Throws TooManyNodes.
Matrix to_adjacency(const GuiGraph& graph, std::size_t threshold = kDefaultThreshold);

/// Assembles the padded tensors. `features` must be threshold x F with
/// container and padded rows already zero. Throws TooManyNodes.
GraphTensors to_tensors(const GuiGraph& graph, Matrix features, std::size_t threshold = kDefaultThreshold);

Matrix renormalize(const Matrix& adjacency);

/// Deterministic JSON: nodes (id, kind, group) and edges sorted by (src, dst).
std::string dump_graph_json(const GuiGraph& graph);

}  // namespace lvcheck
