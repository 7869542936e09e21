#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "irgraph/errors.hpp"
#include "irgraph/graph/hetero_graph.hpp"

namespace irgraph {

// One schema-reduction target: a node kind (Module excluded) or edge kind.
struct AblationTarget {
  bool is_node = false;
  NodeKind node = NodeKind::Value;
  EdgeKind edge = EdgeKind::TypeOf;

  static AblationTarget for_node(NodeKind k) {
    if (k == NodeKind::Module)
      throw CannotAblateModule();
    AblationTarget t;
    t.is_node = true;
    t.node = k;
    return t;
  }
  static AblationTarget for_edge(EdgeKind k) {
    AblationTarget t;
    t.edge = k;
    return t;
  }
  std::string name() const {
    return is_node ? "node:" + std::string(node_kind_name(node))
                   : "edge:" + std::string(edge_kind_name(edge));
  }
};

// The 13 reduction variants: 5 node kinds (Module excluded) + 8 edge kinds.
inline std::vector<AblationTarget> all_ablation_targets() {
  std::vector<AblationTarget> out;
  for (int k = 0; k < kNodeKindCount; ++k)
    if (static_cast<NodeKind>(k) != NodeKind::Module)
      out.push_back(AblationTarget::for_node(static_cast<NodeKind>(k)));
  for (int e = 0; e < kEdgeKindCount; ++e)
    out.push_back(AblationTarget::for_edge(static_cast<EdgeKind>(e)));
  return out;
}

struct AblationSpec {
  AblationTarget target;
  // Edge kinds whose reverse direction is required so no surviving node
  // kind is left without incoming messages. Derived mechanically from the
  // signature table, never user-supplied. Because this schema materializes
  // the reverse of every edge kind from construction, the set documents
  // which mirrors are load-bearing; kinds with an empty incident set are
  // feature-only (self-loop path).
  std::vector<EdgeKind> bidirectionalize;
  // Surviving node kinds left with no incident edges at all.
  std::vector<NodeKind> feature_only;
};

// Mechanical fix-up rule over the base (forward-direction) signature table:
// a surviving node kind is stranded when no surviving forward edge kind
// reaches it from a DIFFERENT kind; the fix mirrors every surviving edge
// kind incident to the stranded kind.
inline AblationSpec plan_ablation(const AblationTarget& target) {
  if (target.is_node && target.node == NodeKind::Module)
    throw CannotAblateModule();
  const auto& table = relation_table();
  AblationSpec spec;
  spec.target = target;
  auto relation_survives = [&](int r) {
    if (target.is_node)
      return table[r].src != target.node && table[r].dst != target.node;
    return table[r].edge != target.edge;
  };
  for (int k = 0; k < kNodeKindCount; ++k) {
    const NodeKind kind = static_cast<NodeKind>(k);
    if (target.is_node && kind == target.node) continue;
    bool has_incoming = false;
    bool has_incident = false;
    std::vector<EdgeKind> incident;
    for (int r = 0; r < kBaseRelationCount; ++r) {
      if (!relation_survives(r)) continue;
      if (table[r].dst == kind && table[r].src != kind) has_incoming = true;
      if (table[r].src == kind || table[r].dst == kind) {
        has_incident = true;
        incident.push_back(table[r].edge);
      }
    }
    if (has_incoming) continue;
    if (!has_incident) {
      spec.feature_only.push_back(kind);
      continue;
    }
    for (EdgeKind e : incident)
      if (std::find(spec.bidirectionalize.begin(), spec.bidirectionalize.end(),
                    e) == spec.bidirectionalize.end())
        spec.bidirectionalize.push_back(e);
  }
  std::sort(spec.bidirectionalize.begin(), spec.bidirectionalize.end());
  return spec;
}

// Pure transformation: the input graph is copied, never modified. Removing
// a node kind drops its nodes and every incident edge (both directions);
// removing an edge kind drops its edges in both directions. The reverse
// relations named by the fix-up plan are already materialized, so applying
// the plan never adds edges.
inline HeteroGraph ablate(const HeteroGraph& g, const AblationSpec& spec) {
  const auto& table = relation_table();
  HeteroGraph out = g;
  if (spec.target.is_node) {
    const NodeKind k = spec.target.node;
    if (k == NodeKind::Module)
      throw CannotAblateModule();
    out.features[static_cast<int>(k)].resize(
        out.features[static_cast<int>(k)].rows(), 0);
    out.removed_node_kind = static_cast<std::int8_t>(k);
    for (int r = 0; r < kRelationCount; ++r)
      if (table[r].src == k || table[r].dst == k) out.relations[r].edges.clear();
  } else {
    out.removed_edge_kind = static_cast<std::int8_t>(spec.target.edge);
    for (int r = 0; r < kRelationCount; ++r)
      if (table[r].edge == spec.target.edge) out.relations[r].edges.clear();
  }
  return out;
}

inline HeteroGraph ablate(const HeteroGraph& g, const AblationTarget& target) {
  return ablate(g, plan_ablation(target));
}

}  // namespace irgraph
