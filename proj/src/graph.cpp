#include "lvcheck/graph.hpp"
#include "lvcheck/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>

namespace lvcheck {

namespace {

bool is_component(const RawView& v) { return component_kind(v.view_class).has_value(); }

// Views whose subtrees form one node group.
struct Branch {
  std::vector<const RawView*> starts;
};

struct Visit {
  const RawView* view;
  int level;
};

std::vector<Visit> level_order_components(const Branch& b) {
  std::vector<Visit> out;
  std::deque<Visit> queue;
  for (const auto* s : b.starts) queue.push_back({s, 0});
  while (!queue.empty()) {
    Visit v = queue.front();
    queue.pop_front();
    if (is_component(*v.view)) out.push_back(v);
    for (const auto& c : v.view->children) queue.push_back({&c, v.level + 1});
  }
  return out;
}

Rect bounding_box(const std::vector<Rect>& rects) {
  Rect box = rects.front();
  for (const auto& r : rects) {
    box.x1 = std::min(box.x1, r.x1);
    box.y1 = std::min(box.y1, r.y1);
    box.x2 = std::max(box.x2, r.x2);
    box.y2 = std::max(box.y2, r.y2);
  }
  return box;
}

}  // namespace

std::string_view to_string(EdgeClass c) {
  switch (c) {
    case EdgeClass::ComponentComponent: return "component-component";
    case EdgeClass::ContainerComponent: return "container-component";
    case EdgeClass::ContainerContainer: return "container-container";
  }
  return "unknown";
}

NodeSet identify_nodes(const LayoutTree& tree) {
  if (!tree.root) throw Error(ErrorCode::EmptyGui, "empty layout tree");

  std::unordered_map<const RawView*, std::size_t> doc_index;
  {
    const auto order = tree.preorder();
    for (std::size_t i = 0; i < order.size(); ++i) doc_index.emplace(order[i], i);
  }

  const RawView& top = *tree.root;
  std::vector<Branch> branches;
  if (is_component(top)) {
    branches.push_back({{&top}});
  } else {
    Branch loose;
    for (const auto& child : top.children) {
      if (is_component(child)) {
        loose.starts.push_back(&child);
      } else {
        branches.push_back({{&child}});
      }
    }
    if (!loose.starts.empty()) branches.push_back(std::move(loose));
  }

  struct RawGroup {
    std::vector<Visit> visits;
    std::size_t first_doc;
    Rect box;
  };
  std::vector<RawGroup> raw_groups;
  for (const auto& b : branches) {
    auto visits = level_order_components(b);
    if (visits.empty()) continue;
    std::vector<Rect> rects;
    for (const auto& v : visits) rects.push_back(v.view->bounds);
    raw_groups.push_back({std::move(visits), doc_index.at(b.starts.front()), bounding_box(rects)});
  }
  if (raw_groups.empty()) throw Error(ErrorCode::EmptyGui, "no component-nodes in " + tree.source_path);

  std::stable_sort(raw_groups.begin(), raw_groups.end(), [](const RawGroup& a, const RawGroup& b) {
    if (a.box.y1 != b.box.y1) return a.box.y1 < b.box.y1;
    if (a.box.x1 != b.box.x1) return a.box.x1 < b.box.x1;
    return a.first_doc < b.first_doc;
  });

  // Component ids in document order.
  std::vector<std::pair<std::size_t, std::pair<const RawView*, int>>> all;  // doc, (view, group)
  for (std::size_t g = 0; g < raw_groups.size(); ++g) {
    for (const auto& v : raw_groups[g].visits) all.push_back({doc_index.at(v.view), {v.view, static_cast<int>(g)}});
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  NodeSet out;
  std::unordered_map<const RawView*, int> id_of;
  for (const auto& [doc, vg] : all) {
    const auto& [view, group] = vg;
    ComponentNode c;
    c.node_id = static_cast<int>(out.components.size());
    c.resource_id = view->resource_id.value_or("");
    c.kind = *component_kind(view->view_class);
    c.bounds = view->bounds;
    c.group_id = group;
    c.raw = *view;
    c.raw.children.clear();
    id_of.emplace(view, c.node_id);
    out.components.push_back(std::move(c));
  }

  const int n_components = static_cast<int>(out.components.size());
  for (std::size_t g = 0; g < raw_groups.size(); ++g) {
    NodeGroup group;
    group.group_id = static_cast<int>(g);
    ContainerNode container;
    container.node_id = n_components + static_cast<int>(g);
    container.group_id = static_cast<int>(g);
    container.bounds = raw_groups[g].box;
    for (const auto& v : raw_groups[g].visits) {
      group.members.push_back(id_of.at(v.view));
      group.levels.push_back(v.level);
      container.member_ids.push_back(id_of.at(v.view));
    }
    out.groups.push_back(std::move(group));
    out.containers.push_back(std::move(container));
  }
  return out;
}

std::vector<Edge> component_edges(const NodeGroup& group, const std::vector<ComponentNode>& components,
                                  const GraphOptions& opts) {
  const auto& seq = group.members;
  std::set<std::pair<std::size_t, std::size_t>> pairs;  // traversal positions, first < second
  for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
    if (std::abs(group.levels[k] - group.levels[k + 1]) <= 1) pairs.emplace(k, k + 1);
  }
  for (std::size_t a = 0; a < seq.size(); ++a) {
    for (std::size_t b = a + 1; b < seq.size(); ++b) {
      const auto& ra = components.at(static_cast<std::size_t>(seq[a])).bounds;
      const auto& rb = components.at(static_cast<std::size_t>(seq[b])).bounds;
      if (rect_gap(ra, rb) < opts.adjacency_gap_px) pairs.emplace(a, b);
    }
  }
  std::vector<Edge> out;
  out.reserve(pairs.size());
  for (const auto& [a, b] : pairs) out.push_back({seq[a], seq[b], 0.0, EdgeClass::ComponentComponent});
  return out;
}

std::vector<Edge> container_component_edges(const ContainerNode& container) {
  std::vector<Edge> out;
  for (int m : container.member_ids) out.push_back({container.node_id, m, 0.0, EdgeClass::ContainerComponent});
  return out;
}

std::vector<Edge> container_chain_edges(const std::vector<ContainerNode>& containers) {
  std::vector<Edge> out;
  const std::size_t k = containers.size();
  if (k < 2) return out;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    out.push_back({containers[i].node_id, containers[i + 1].node_id, 1.0, EdgeClass::ContainerContainer});
  }
  // With two containers the closing edge is the same undirected pair.
  if (k > 2) out.push_back({containers[k - 1].node_id, containers[0].node_id, 1.0, EdgeClass::ContainerContainer});
  return out;
}

GuiGraph assign_weights(GuiGraph graph) {
  std::map<int, int> out_degree;
  for (const auto& e : graph.edges) ++out_degree[e.src];

  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (auto& e : graph.edges) {
    if (e.edge_class == EdgeClass::ContainerContainer) continue;
    const double raw = out_degree.contains(e.dst) ? out_degree.at(e.dst) : 0;
    e.weight = raw;
    lo = any ? std::min(lo, raw) : raw;
    hi = any ? std::max(hi, raw) : raw;
    any = true;
  }
  for (auto& e : graph.edges) {
    if (e.edge_class == EdgeClass::ContainerContainer) {
      e.weight = 1.0;
    } else {
      e.weight = hi > lo ? (e.weight - lo) / (hi - lo) : 1.0;
    }
  }
  return graph;
}

GuiGraph build_graph(const LayoutTree& filtered, const GraphOptions& opts) {
  NodeSet nodes = identify_nodes(filtered);
  GuiGraph g;
  for (const auto& group : nodes.groups) {
    auto e = component_edges(group, nodes.components, opts);
    g.edges.insert(g.edges.end(), e.begin(), e.end());
  }
  for (const auto& c : nodes.containers) {
    auto e = container_component_edges(c);
    g.edges.insert(g.edges.end(), e.begin(), e.end());
  }
  auto chain = container_chain_edges(nodes.containers);
  g.edges.insert(g.edges.end(), chain.begin(), chain.end());
  g.components = std::move(nodes.components);
  g.containers = std::move(nodes.containers);
  g.groups = std::move(nodes.groups);
  return assign_weights(std::move(g));
}

Matrix to_adjacency(const GuiGraph& graph, std::size_t threshold) {
  if (graph.n_real() > threshold) {
    throw Error(ErrorCode::TooManyNodes, std::to_string(graph.n_real()) + " nodes exceed threshold " +
                                             std::to_string(threshold));
  }
  Matrix a(threshold, threshold);
  for (const auto& e : graph.edges) {
    const auto s = static_cast<std::size_t>(e.src);
    const auto d = static_cast<std::size_t>(e.dst);
    a(s, d) = e.weight;
    a(d, s) = e.weight;
  }
  return a;
}

GraphTensors to_tensors(const GuiGraph& graph, Matrix features, std::size_t threshold) {
  GraphTensors t;
  t.adjacency = to_adjacency(graph, threshold);
  if (features.rows() != threshold) {
    throw Error(ErrorCode::ShapeMismatch, "feature rows " + std::to_string(features.rows()) +
                                              " != threshold " + std::to_string(threshold));
  }
  t.renormalized = renormalize(t.adjacency);
  t.features = std::move(features);
  t.labels.assign(threshold, -1);
  t.real_mask.assign(threshold, false);
  t.component_mask.assign(threshold, false);
  for (std::size_t i = 0; i < graph.n_real(); ++i) t.real_mask[i] = true;
  for (const auto& c : graph.components) {
    const auto i = static_cast<std::size_t>(c.node_id);
    t.component_mask[i] = true;
    if (c.label) t.labels[i] = *c.label;
  }
  return t;
}

Matrix renormalize(const Matrix& adjacency) {
  const std::size_t n = adjacency.rows();
  std::vector<double> inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = 1.0;
    for (std::size_t j = 0; j < n; ++j) d += adjacency(i, j);
    inv_sqrt[i] = 1.0 / std::sqrt(d);
  }
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double a = adjacency(i, j) + (i == j ? 1.0 : 0.0);
      if (a != 0.0) out(i, j) = inv_sqrt[i] * a * inv_sqrt[j];
    }
  }
  return out;
}

std::string dump_graph_json(const GuiGraph& graph) {
  using nlohmann::ordered_json;
  ordered_json nodes = ordered_json::array();
  for (const auto& c : graph.components) {
    nodes.push_back({{"id", c.node_id},
                     {"kind", std::string(to_string(c.kind))},
                     {"group", c.group_id},
                     {"resource_id", c.resource_id}});
  }
  for (const auto& c : graph.containers) {
    nodes.push_back({{"id", c.node_id}, {"kind", "container"}, {"group", c.group_id}});
  }
  auto edges = graph.edges;
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return std::pair(a.src, a.dst) < std::pair(b.src, b.dst); });
  ordered_json ej = ordered_json::array();
  for (const auto& e : edges) {
    ej.push_back({{"src", e.src}, {"dst", e.dst}, {"weight", e.weight}, {"class", std::string(to_string(e.edge_class))}});
  }
  ordered_json doc;
  doc["n_real"] = graph.n_real();
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(ej);
  return doc.dump(2) + "\n";
}

}  // namespace lvcheck
