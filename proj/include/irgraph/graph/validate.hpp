#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "irgraph/graph/hetero_graph.hpp"

namespace irgraph {

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Checks every structural invariant of a HeteroGraph and reports all
// violations with node/edge ids. Checks that concern an ablated kind are
// skipped for graphs that record a removal.
inline ValidationReport validate_graph(const HeteroGraph& g) {
  ValidationReport rep;
  auto violation = [&rep](std::string s) {
    rep.violations.push_back(std::move(s));
  };
  const auto& table = relation_table();

  // Exactly one Module node.
  const Eigen::Index modules = g.node_count(NodeKind::Module);
  if (g.kind_removed(NodeKind::Module)) {
    if (modules != 0)
      violation("module kind marked removed but " + std::to_string(modules) +
                " module nodes present");
  } else if (modules != 1) {
    violation("expected exactly one module node, found " +
              std::to_string(modules));
  }

  // Feature widths and one-hot / multi-hot discipline.
  for (int k = 0; k < kNodeKindCount; ++k) {
    const NodeKind kind = static_cast<NodeKind>(k);
    const auto& mat = g.features[k];
    if (g.kind_removed(kind)) {
      if (mat.cols() != 0)
        violation(std::string(node_kind_name(kind)) +
                  " kind marked removed but nodes present");
      continue;
    }
    if (mat.cols() > 0 && mat.rows() != g.spec.width(kind)) {
      violation(std::string(node_kind_name(kind)) + " feature width " +
                std::to_string(mat.rows()) + " != spec width " +
                std::to_string(g.spec.width(kind)));
      continue;
    }
    int offset = 0;
    for (const auto& [field, fw] : g.spec.fields(kind)) {
      for (Eigen::Index j = 0; j < mat.cols(); ++j) {
        int ones = 0;
        bool binary = true;
        for (int i = 0; i < fw; ++i) {
          const float x = mat(offset + i, j);
          if (x == 1.0f) ++ones;
          else if (x != 0.0f) binary = false;
        }
        const std::string where = std::string(node_kind_name(kind)) +
                                  " node " + std::to_string(j) + " field " +
                                  field;
        if (!binary) {
          violation(where + " has entries outside {0,1}");
          continue;
        }
        if (field == "is_constant") continue;  // free flag
        if (field == "attribute_set") continue;  // multi-hot
        if (field == "bias") {
          if (ones != 1) violation(where + " bias slot != 1");
          continue;
        }
        if (ones != 1)
          violation(where + " has " + std::to_string(ones) +
                    " ones, expected exactly 1");
      }
      offset += fw;
    }
  }

  // Relation signatures and endpoint ranges.
  for (int r = 0; r < kRelationCount; ++r) {
    const auto& rel = g.relations[r];
    if (rel.src_kind != table[r].src || rel.dst_kind != table[r].dst)
      violation(std::string("relation ") + table[r].name +
                " signature mismatch: stored " +
                node_kind_name(rel.src_kind) + "->" +
                node_kind_name(rel.dst_kind) + ", expected " +
                node_kind_name(table[r].src) + "->" +
                node_kind_name(table[r].dst));
    const Eigen::Index src_limit = g.node_count(rel.src_kind);
    const Eigen::Index dst_limit = g.node_count(rel.dst_kind);
    for (std::size_t e = 0; e < rel.edges.size(); ++e) {
      const auto [s, d] = rel.edges[e];
      if (s >= src_limit || d >= dst_limit)
        violation(std::string("relation ") + table[r].name + " edge " +
                  std::to_string(e) + " (" + std::to_string(s) + "," +
                  std::to_string(d) + ") endpoint out of range");
    }
  }

  // Mirrored relations hold exactly the reversed edge multiset.
  for (int r = 0; r < kBaseRelationCount; ++r) {
    auto fwd = g.relations[r].edges;
    auto rev = g.relations[mirror_relation(r)].edges;
    for (auto& [s, d] : fwd) std::swap(s, d);
    std::sort(fwd.begin(), fwd.end());
    std::sort(rev.begin(), rev.end());
    if (fwd != rev)
      violation(std::string("relation ") + table[r].name +
                " mirror is not the reversed edge multiset");
  }

  // Every Value node has exactly one outgoing TypeOf edge.
  if (!g.kind_removed(NodeKind::Value) && !g.kind_removed(NodeKind::Type) &&
      !g.kind_removed(EdgeKind::TypeOf)) {
    std::vector<int> counts(static_cast<std::size_t>(
                                g.node_count(NodeKind::Value)),
                            0);
    for (const auto& [s, d] : g.relations[0].edges)
      if (s < counts.size()) ++counts[s];
    for (std::size_t v = 0; v < counts.size(); ++v)
      if (counts[v] != 1)
        violation("value node " + std::to_string(v) + " has " +
                  std::to_string(counts[v]) + " type_of edges, expected 1");
  }

  // Symbol reciprocity: (module->value) iff (value->module).
  if (!g.kind_removed(NodeKind::Value) && !g.kind_removed(NodeKind::Module) &&
      !g.kind_removed(EdgeKind::Symbol)) {
    auto out = g.relations[5].edges;
    auto in = g.relations[6].edges;
    for (auto& [s, d] : out) std::swap(s, d);
    std::sort(out.begin(), out.end());
    std::sort(in.begin(), in.end());
    if (out != in)
      violation("symbol edges are not reciprocal between the two directions");
  }

  return rep;
}

}  // namespace irgraph
