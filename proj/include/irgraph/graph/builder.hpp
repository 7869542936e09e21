#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "irgraph/errors.hpp"
#include "irgraph/graph/hetero_graph.hpp"
#include "irgraph/ir/ast.hpp"

namespace irgraph {

struct BuildOptions {
  bool lenient = false;
  std::string source_name;
  std::array<std::uint8_t, 32> source_digest{};
};

// Builds the heterogeneous program graph from a parsed module.
//
// Node id assignment is deterministic: the Module node first, then one Value
// node per global and per function (symbol pass), then — walking globals and
// functions in declaration order — constants from global initializers,
// argument values, and SSA locals in first-encounter order. Type, Size, and
// Attributes nodes are created on demand in encounter order and
// deduplicated (types by interned identity, sizes by byte count, attribute
// nodes by set contents, constants module-wide by (type, literal) key).
class GraphBuilder {
public:
  GraphBuilder(const IrModule& m, const FeatureSpec& spec, BuildOptions opts)
      : m_(m), spec_(spec), opts_(std::move(opts)) {}

  HeteroGraph build() {
    g_.spec = spec_;
    g_.source_name = opts_.source_name;
    g_.source_digest = opts_.source_digest;

    module_node_ = add_node(NodeKind::Module, encode_module(spec_));

    // Symbol pass: every global and function gets its Value node up front so
    // cross-references resolve regardless of declaration order.
    for (const auto& glob : m_.globals) {
      const std::uint32_t v = create_value(ValueKind::GlobalVariable, false,
                                           std::nullopt, glob.value_type);
      symbol_nodes_[glob.name] = v;
      add_edge(kRelSymbolOut, module_node_, v);
      add_edge(kRelSymbolIn, v, module_node_);
    }
    for (const auto& fn : m_.functions) {
      const std::uint32_t v = create_value(ValueKind::FunctionRef, false,
                                           std::nullopt, fn.type);
      symbol_nodes_[fn.name] = v;
      add_edge(kRelSymbolOut, module_node_, v);
      add_edge(kRelSymbolIn, v, module_node_);
      if (!fn.attrs.empty())
        add_edge(kRelAttribute, v, ensure_attrs(fn.attrs));
    }

    // Content pass: initializers, arguments, instructions.
    for (const auto& glob : m_.globals) {
      if (!glob.initializer) continue;
      const std::uint32_t child = ensure_operand(*glob.initializer);
      add_edge(kRelContains, symbol_nodes_.at(glob.name), child);
    }
    for (const auto& fn : m_.functions) build_function(fn);

    finish_features();
    return std::move(g_);
  }

private:
  // Relation indices, matching relation_table().
  static constexpr int kRelTypeOf = 0;
  static constexpr int kRelDataflowDef = 1;
  static constexpr int kRelDataflowUse = 2;
  static constexpr int kRelAttribute = 3;
  static constexpr int kRelSizeOf = 4;
  static constexpr int kRelSymbolOut = 5;
  static constexpr int kRelSymbolIn = 6;
  static constexpr int kRelCfg = 7;
  static constexpr int kRelIncludes = 8;
  static constexpr int kRelContains = 9;

  std::uint32_t add_node(NodeKind k, std::vector<float> row) {
    auto& rows = staged_[static_cast<int>(k)];
    rows.push_back(std::move(row));
    return static_cast<std::uint32_t>(rows.size() - 1);
  }

  void add_edge(int relation, std::uint32_t src, std::uint32_t dst) {
    g_.relations[relation].edges.emplace_back(src, dst);
    g_.relations[mirror_relation(relation)].edges.emplace_back(dst, src);
  }

  // Creates a Value node and its mandatory TypeOf edge.
  std::uint32_t create_value(ValueKind kind, bool constant,
                             std::optional<std::int64_t> magnitude,
                             TypeRef type) {
    const std::uint32_t v =
        add_node(NodeKind::Value,
                 encode_value(spec_, static_cast<int>(kind), constant,
                              magnitude, opts_.lenient));
    add_edge(kRelTypeOf, v, ensure_type(type));
    return v;
  }

  std::uint32_t ensure_type(TypeRef t) {
    if (t == kNoType) {
      // Only reachable from lenient parses that skipped a construct.
      if (!opts_.lenient)
        throw InternalInconsistency("value with no type reached the builder");
      if (!opaque_fallback_) {
        opaque_fallback_ = add_node(
            NodeKind::Type,
            encode_type(spec_, static_cast<int>(TypeKind::Opaque),
                        std::nullopt, true));
      }
      return *opaque_fallback_;
    }
    if (auto it = type_nodes_.find(t); it != type_nodes_.end())
      return it->second;
    const TypeDesc& d = m_.types.at(t);
    std::optional<std::int64_t> bits;
    if (d.kind == TypeKind::Integer || d.kind == TypeKind::Float)
      bits = d.bit_width;
    const std::uint32_t node = add_node(
        NodeKind::Type,
        encode_type(spec_, static_cast<int>(d.kind), bits, opts_.lenient));
    type_nodes_.emplace(t, node);  // inserted before recursion: cycle guard

    if (m_.types.is_sized(t))
      add_edge(kRelSizeOf, node, ensure_size(m_.types.byte_size(t)));

    // Includes edges to nested types, deduplicated per (src, dst).
    std::vector<TypeRef> children;
    if (d.element != kNoType) children.push_back(d.element);
    for (TypeRef member : d.members) children.push_back(member);
    std::set<std::uint32_t> seen;
    for (TypeRef c : children) {
      const std::uint32_t cn = ensure_type(c);
      if (seen.insert(cn).second) add_edge(kRelIncludes, node, cn);
    }
    return node;
  }

  std::uint32_t ensure_size(std::uint64_t bytes) {
    if (auto it = size_nodes_.find(bytes); it != size_nodes_.end())
      return it->second;
    const std::uint32_t node =
        add_node(NodeKind::Size, encode_size(spec_, bytes));
    size_nodes_.emplace(bytes, node);
    return node;
  }

  std::uint32_t ensure_attrs(const AttributeSet& set) {
    const std::string key = set.key();
    if (auto it = attr_nodes_.find(key); it != attr_nodes_.end())
      return it->second;
    std::vector<int> indices;
    for (Attr a : set.entries) indices.push_back(static_cast<int>(a));
    const std::uint32_t node =
        add_node(NodeKind::Attributes,
                 encode_attributes(spec_, indices, opts_.lenient));
    attr_nodes_.emplace(key, node);
    return node;
  }

  // Resolves an operand to its Value node, creating constant nodes (with
  // Contains edges to their components) and forward-referenced locals on
  // first encounter.
  std::uint32_t ensure_operand(const ValueInfo& v) {
    switch (v.kind) {
      case ValueKind::Argument:
      case ValueKind::Local: {
        if (auto it = local_nodes_.find(v.id); it != local_nodes_.end())
          return it->second;
        const std::uint32_t node =
            create_value(v.kind, false, std::nullopt, v.type);
        local_nodes_.emplace(v.id, node);
        return node;
      }
      case ValueKind::GlobalVariable:
      case ValueKind::FunctionRef: {
        if (auto it = symbol_nodes_.find(v.id); it != symbol_nodes_.end())
          return it->second;
        if (!opts_.lenient)
          throw InternalInconsistency("operand references unknown symbol @" +
                                      v.id);
        const std::uint32_t node =
            create_value(v.kind, false, std::nullopt, v.type);
        symbol_nodes_.emplace(v.id, node);
        return node;
      }
      default:
        return ensure_constant(v);
    }
  }

  std::uint32_t ensure_constant(const ValueInfo& v) {
    const std::string key = m_.types.print(v.type) + "|" + v.id;
    if (auto it = constant_nodes_.find(key); it != constant_nodes_.end())
      return it->second;
    std::optional<std::int64_t> magnitude;
    if (v.kind == ValueKind::ConstantInt) magnitude = v.int_value;
    const std::uint32_t node =
        create_value(v.kind, is_constant_kind(v.kind), magnitude, v.type);
    constant_nodes_.emplace(key, node);
    for (const auto& child : v.children)
      add_edge(kRelContains, node, ensure_operand(child));
    return node;
  }

  void build_function(const Function& fn) {
    if (fn.is_declaration) return;
    local_nodes_.clear();
    for (std::size_t i = 0; i < fn.args.size(); ++i) {
      const auto& arg = fn.args[i];
      const std::uint32_t node =
          create_value(ValueKind::Argument, false, std::nullopt, arg.type);
      local_nodes_.emplace(arg.id, node);
      if (i < fn.arg_attrs.size() && !fn.arg_attrs[i].empty())
        add_edge(kRelAttribute, node, ensure_attrs(fn.arg_attrs[i]));
    }

    std::unordered_map<std::string, std::uint32_t> block_entry;
    std::vector<std::pair<std::uint32_t, const Instruction*>> terminators;
    for (const auto& block : fn.blocks) {
      std::uint32_t prev = 0;
      bool has_prev = false;
      for (const auto& ins : block.instructions) {
        std::optional<std::int64_t> align;
        if (ins.alignment) align = *ins.alignment;
        const std::uint32_t node = add_node(
            NodeKind::Instruction,
            encode_instruction(spec_, static_cast<int>(ins.opcode), align,
                               opts_.lenient));
        if (!has_prev) block_entry.emplace(block.label, node);
        if (has_prev) add_edge(kRelCfg, prev, node);
        prev = node;
        has_prev = true;

        for (const auto& op : ins.operands)
          add_edge(kRelDataflowUse, ensure_operand(op), node);
        if (ins.result) {
          std::uint32_t rv;
          if (auto it = local_nodes_.find(ins.result->id);
              it != local_nodes_.end()) {
            rv = it->second;  // forward-referenced by an earlier phi
          } else {
            rv = create_value(ValueKind::Local, false, std::nullopt,
                              ins.result_type);
            local_nodes_.emplace(ins.result->id, rv);
          }
          add_edge(kRelDataflowDef, node, rv);
        }
        if (is_terminator(ins.opcode) && !ins.successors.empty())
          terminators.emplace_back(node, &ins);
      }
    }
    for (const auto& [node, ins] : terminators) {
      for (const auto& label : ins->successors) {
        const auto it = block_entry.find(label);
        if (it == block_entry.end()) {
          if (!opts_.lenient)
            throw InternalInconsistency("terminator references unknown block %" +
                                        label);
          continue;
        }
        add_edge(kRelCfg, node, it->second);
      }
    }
  }

  void finish_features() {
    for (int k = 0; k < kNodeKindCount; ++k) {
      const auto& rows = staged_[k];
      const int width = spec_.width(static_cast<NodeKind>(k));
      Eigen::MatrixXf& mat = g_.features[k];
      mat.resize(width, static_cast<Eigen::Index>(rows.size()));
      for (std::size_t j = 0; j < rows.size(); ++j)
        for (int i = 0; i < width; ++i)
          mat(i, static_cast<Eigen::Index>(j)) = rows[j][i];
    }
  }

  const IrModule& m_;
  const FeatureSpec& spec_;
  BuildOptions opts_;
  HeteroGraph g_;
  std::uint32_t module_node_ = 0;
  std::optional<std::uint32_t> opaque_fallback_;
  std::array<std::vector<std::vector<float>>, kNodeKindCount> staged_;
  std::unordered_map<TypeRef, std::uint32_t> type_nodes_;
  std::unordered_map<std::uint64_t, std::uint32_t> size_nodes_;
  std::unordered_map<std::string, std::uint32_t> attr_nodes_;
  std::unordered_map<std::string, std::uint32_t> constant_nodes_;
  std::unordered_map<std::string, std::uint32_t> symbol_nodes_;
  std::unordered_map<std::string, std::uint32_t> local_nodes_;
};

inline HeteroGraph build_graph(const IrModule& m, const FeatureSpec& spec,
                               BuildOptions opts = {}) {
  return GraphBuilder(m, spec, opts).build();
}

}  // namespace irgraph
