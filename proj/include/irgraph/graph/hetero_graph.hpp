#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "irgraph/graph/feature_spec.hpp"
#include "irgraph/graph/kinds.hpp"

namespace irgraph {

// One directed edge table. Edges are (source node id, destination node id)
// within the per-kind dense node numbering. The endpoint kinds are stored
// explicitly (initialized from relation_table()) so that validation can
// detect a table that disagrees with the fixed signature.
struct Relation {
  NodeKind src_kind = NodeKind::Value;
  NodeKind dst_kind = NodeKind::Value;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
};

// Heterogeneous program graph: per-kind feature matrices plus the twenty
// fixed relations from relation_table(). Feature matrices are stored
// column-major with one column per node, so each node's feature vector is
// contiguous.
struct HeteroGraph {
  FeatureSpec spec;
  std::array<Eigen::MatrixXf, kNodeKindCount> features;
  std::array<Relation, kRelationCount> relations;
  // Ablation bookkeeping: -1 when nothing was removed.
  std::int8_t removed_node_kind = -1;
  std::int8_t removed_edge_kind = -1;
  // Provenance: module/file name and SHA-256 of the source text.
  std::string source_name;
  std::array<std::uint8_t, 32> source_digest{};

  HeteroGraph() {
    for (int k = 0; k < kNodeKindCount; ++k)
      features[k].resize(0, 0);
    for (int r = 0; r < kRelationCount; ++r) {
      relations[r].src_kind = relation_table()[r].src;
      relations[r].dst_kind = relation_table()[r].dst;
    }
  }

  explicit HeteroGraph(FeatureSpec s) : HeteroGraph() { spec = std::move(s); }

  Eigen::Index node_count(NodeKind k) const {
    return features[static_cast<int>(k)].cols();
  }

  Eigen::Index total_node_count() const {
    Eigen::Index n = 0;
    for (const auto& m : features) n += m.cols();
    return n;
  }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& r : relations) n += r.edges.size();
    return n;
  }

  std::size_t edge_count(EdgeKind k) const {
    std::size_t n = 0;
    for (int r = 0; r < kRelationCount; ++r)
      if (relation_table()[r].edge == k) n += relations[r].edges.size();
    return n;
  }

  bool kind_removed(NodeKind k) const {
    return removed_node_kind == static_cast<std::int8_t>(k);
  }

  bool kind_removed(EdgeKind k) const {
    return removed_edge_kind == static_cast<std::int8_t>(k);
  }
};

// Exact equality: spec JSON, dimensions, feature bytes, edges, provenance,
// and ablation bookkeeping all match.
inline bool graphs_equal(const HeteroGraph& a, const HeteroGraph& b) {
  if (a.spec.to_json() != b.spec.to_json()) return false;
  if (a.removed_node_kind != b.removed_node_kind) return false;
  if (a.removed_edge_kind != b.removed_edge_kind) return false;
  if (a.source_name != b.source_name) return false;
  if (a.source_digest != b.source_digest) return false;
  for (int k = 0; k < kNodeKindCount; ++k) {
    if (a.features[k].rows() != b.features[k].rows()) return false;
    if (a.features[k].cols() != b.features[k].cols()) return false;
    if (a.features[k].size() > 0 &&
        (a.features[k].array() != b.features[k].array()).any())
      return false;
  }
  for (int r = 0; r < kRelationCount; ++r) {
    if (a.relations[r].src_kind != b.relations[r].src_kind) return false;
    if (a.relations[r].dst_kind != b.relations[r].dst_kind) return false;
    if (a.relations[r].edges != b.relations[r].edges) return false;
  }
  return true;
}

}  // namespace irgraph
