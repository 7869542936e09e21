#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

namespace irgraph {

enum class NodeKind : std::uint8_t {
  Value = 0,
  Type = 1,
  Size = 2,
  Module = 3,
  Attributes = 4,
  Instruction = 5,
};

constexpr int kNodeKindCount = 6;

inline const char* node_kind_name(NodeKind k) {
  static const char* names[kNodeKindCount] = {"value",  "type",       "size",
                                              "module", "attributes", "instruction"};
  return names[static_cast<int>(k)];
}

inline std::optional<NodeKind> node_kind_from_name(const std::string& s) {
  for (int i = 0; i < kNodeKindCount; ++i)
    if (s == node_kind_name(static_cast<NodeKind>(i)))
      return static_cast<NodeKind>(i);
  return std::nullopt;
}

enum class EdgeKind : std::uint8_t {
  TypeOf = 0,
  Dataflow = 1,
  Attribute = 2,
  Cfg = 3,
  SizeOf = 4,
  Symbol = 5,
  Includes = 6,
  Contains = 7,
};

constexpr int kEdgeKindCount = 8;

inline const char* edge_kind_name(EdgeKind k) {
  static const char* names[kEdgeKindCount] = {
      "type_of", "dataflow", "attribute", "cfg",
      "size_of", "symbol",   "includes",  "contains"};
  return names[static_cast<int>(k)];
}

inline std::optional<EdgeKind> edge_kind_from_name(const std::string& s) {
  for (int i = 0; i < kEdgeKindCount; ++i)
    if (s == edge_kind_name(static_cast<EdgeKind>(i)))
      return static_cast<EdgeKind>(i);
  return std::nullopt;
}

// A typed relation: one directed edge table between two fixed node kinds.
// The first ten relations carry the semantic directions; relations 10..19
// are their mirrored counterparts so that message passing can propagate
// against the semantic direction as well.
struct RelationSig {
  EdgeKind edge;
  NodeKind src;
  NodeKind dst;
  const char* name;
};

constexpr int kBaseRelationCount = 10;
constexpr int kRelationCount = 2 * kBaseRelationCount;

inline const std::array<RelationSig, kRelationCount>& relation_table() {
  static const std::array<RelationSig, kRelationCount> table = {{
      {EdgeKind::TypeOf, NodeKind::Value, NodeKind::Type, "type_of"},
      {EdgeKind::Dataflow, NodeKind::Instruction, NodeKind::Value,
       "dataflow_def"},
      {EdgeKind::Dataflow, NodeKind::Value, NodeKind::Instruction,
       "dataflow_use"},
      {EdgeKind::Attribute, NodeKind::Value, NodeKind::Attributes,
       "attribute"},
      {EdgeKind::SizeOf, NodeKind::Type, NodeKind::Size, "size_of"},
      {EdgeKind::Symbol, NodeKind::Module, NodeKind::Value, "symbol_out"},
      {EdgeKind::Symbol, NodeKind::Value, NodeKind::Module, "symbol_in"},
      {EdgeKind::Cfg, NodeKind::Instruction, NodeKind::Instruction, "cfg"},
      {EdgeKind::Includes, NodeKind::Type, NodeKind::Type, "includes"},
      {EdgeKind::Contains, NodeKind::Value, NodeKind::Value, "contains"},
      {EdgeKind::TypeOf, NodeKind::Type, NodeKind::Value, "type_of_rev"},
      {EdgeKind::Dataflow, NodeKind::Value, NodeKind::Instruction,
       "dataflow_def_rev"},
      {EdgeKind::Dataflow, NodeKind::Instruction, NodeKind::Value,
       "dataflow_use_rev"},
      {EdgeKind::Attribute, NodeKind::Attributes, NodeKind::Value,
       "attribute_rev"},
      {EdgeKind::SizeOf, NodeKind::Size, NodeKind::Type, "size_of_rev"},
      {EdgeKind::Symbol, NodeKind::Value, NodeKind::Module, "symbol_out_rev"},
      {EdgeKind::Symbol, NodeKind::Module, NodeKind::Value, "symbol_in_rev"},
      {EdgeKind::Cfg, NodeKind::Instruction, NodeKind::Instruction,
       "cfg_rev"},
      {EdgeKind::Includes, NodeKind::Type, NodeKind::Type, "includes_rev"},
      {EdgeKind::Contains, NodeKind::Value, NodeKind::Value, "contains_rev"},
  }};
  return table;
}

inline int mirror_relation(int r) {
  return r < kBaseRelationCount ? r + kBaseRelationCount
                                : r - kBaseRelationCount;
}

}  // namespace irgraph
