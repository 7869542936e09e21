#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "irgraph/errors.hpp"
#include "irgraph/graph/kinds.hpp"
#include "irgraph/ir/ast.hpp"
#include "irgraph/ir/types.hpp"
#include "irgraph/sha256.hpp"

namespace irgraph {

// Bucket lookup table. Either an exact-match table (slot per listed value)
// or a range table (slot i holds values <= upper_bounds[i]). Values matching
// nothing land in the trailing `other` slot; an optional leading `none` slot
// holds absent values.
struct BucketTable {
  bool has_none = false;
  std::vector<std::int64_t> exact;
  std::vector<std::int64_t> upper_bounds;

  int slots() const {
    const int body = static_cast<int>(exact.empty() ? upper_bounds.size()
                                                    : exact.size());
    return (has_none ? 1 : 0) + body + 1;
  }

  int slot_for(std::optional<std::int64_t> v) const {
    if (!v) return 0;  // callers guarantee has_none when passing nullopt
    const int base = has_none ? 1 : 0;
    if (!exact.empty()) {
      for (std::size_t i = 0; i < exact.size(); ++i)
        if (*v == exact[i]) return base + static_cast<int>(i);
      return slots() - 1;
    }
    for (std::size_t i = 0; i < upper_bounds.size(); ++i)
      if (*v <= upper_bounds[i]) return base + static_cast<int>(i);
    return slots() - 1;
  }
};

// Signed magnitude table for integer constant payloads. Slot layout:
// [none][zero][positive by |v| <= bound ...][negative ...][other].
struct SignedBucketTable {
  std::vector<std::int64_t> abs_upper_bounds;

  int slots() const {
    return 2 + 2 * static_cast<int>(abs_upper_bounds.size()) + 1;
  }

  int slot_for(std::optional<std::int64_t> v) const {
    if (!v) return 0;
    if (*v == 0) return 1;
    const bool neg = *v < 0;
    const std::uint64_t mag =
        neg ? 0 - static_cast<std::uint64_t>(*v)
            : static_cast<std::uint64_t>(*v);
    const int base = neg ? 2 + static_cast<int>(abs_upper_bounds.size()) : 2;
    for (std::size_t i = 0; i < abs_upper_bounds.size(); ++i)
      if (mag <= static_cast<std::uint64_t>(abs_upper_bounds[i]))
        return base + static_cast<int>(i);
    return slots() - 1;
  }
};

// Versioned description of every node feature layout: vocabularies, bucket
// tables, and the derived per-kind field list. Serialized as JSON and
// embedded in every .irg file so graphs stay self-describing.
struct FeatureSpec {
  std::uint32_t version = 1;
  std::vector<std::string> value_kinds;
  std::vector<std::string> type_kinds;
  std::vector<std::string> opcodes;
  std::vector<std::string> attributes;
  BucketTable alignment;
  BucketTable bit_width;
  BucketTable size;
  SignedBucketTable magnitude;

  std::vector<std::pair<std::string, int>> fields(NodeKind k) const {
    switch (k) {
      case NodeKind::Value:
        return {{"value_kind", static_cast<int>(value_kinds.size())},
                {"is_constant", 1},
                {"int_magnitude", magnitude.slots()}};
      case NodeKind::Type:
        return {{"type_kind", static_cast<int>(type_kinds.size())},
                {"bit_width", bit_width.slots()}};
      case NodeKind::Size:
        return {{"size_bucket", size.slots()}};
      case NodeKind::Module:
        return {{"bias", 1}};
      case NodeKind::Attributes:
        return {{"attribute_set", static_cast<int>(attributes.size())}};
      case NodeKind::Instruction:
        return {{"opcode", static_cast<int>(opcodes.size())},
                {"alignment", this->alignment.slots()}};
    }
    return {};
  }

  int width(NodeKind k) const {
    int w = 0;
    for (const auto& [name, fw] : fields(k)) w += fw;
    return w;
  }

  // Offset of a named field within the kind's feature vector.
  std::pair<int, int> segment(NodeKind k, const std::string& field) const {
    int off = 0;
    for (const auto& [name, fw] : fields(k)) {
      if (name == field) return {off, fw};
      off += fw;
    }
    throw InternalInconsistency("unknown feature field '" + field + "' for " +
                                node_kind_name(k));
  }

  static FeatureSpec standard() {
    FeatureSpec s;
    for (int i = 0; i < kValueKindCount; ++i)
      s.value_kinds.push_back(value_kind_name(static_cast<ValueKind>(i)));
    for (int i = 0; i < kTypeKindCount; ++i)
      s.type_kinds.push_back(type_kind_name(static_cast<TypeKind>(i)));
    for (int i = 0; i < kOpcodeCount; ++i)
      s.opcodes.push_back(opcode_name(static_cast<Opcode>(i)));
    for (int i = 0; i < kAttrCount; ++i)
      s.attributes.push_back(attr_name(static_cast<Attr>(i)));
    s.alignment.has_none = true;
    s.alignment.exact = {1, 2, 4, 8, 16, 32, 64};
    s.bit_width.has_none = true;
    s.bit_width.upper_bounds = {1, 8, 16, 32, 64, 128, 256, 512, 1024, 4096};
    s.size.has_none = false;
    for (int i = 0; i < 16; ++i)
      s.size.upper_bounds.push_back((std::int64_t{1} << (i + 1)) - 2);
    s.magnitude.abs_upper_bounds = {1, 3, 7, 15, 31, 63, 127};
    return s;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["version"] = version;
    j["vocabularies"] = {{"value_kind", value_kinds},
                         {"type_kind", type_kinds},
                         {"opcode", opcodes},
                         {"attribute", attributes}};
    auto bucket = [](const BucketTable& b) {
      nlohmann::ordered_json t;
      t["none"] = b.has_none;
      if (!b.exact.empty()) t["exact"] = b.exact;
      else t["upper_bounds"] = b.upper_bounds;
      return t;
    };
    j["buckets"] = {{"alignment", bucket(alignment)},
                    {"bit_width", bucket(bit_width)},
                    {"size", bucket(size)},
                    {"magnitude", nlohmann::ordered_json{
                                      {"abs_upper_bounds",
                                       magnitude.abs_upper_bounds}}}};
    nlohmann::ordered_json f;
    nlohmann::ordered_json w;
    for (int i = 0; i < kNodeKindCount; ++i) {
      const NodeKind k = static_cast<NodeKind>(i);
      nlohmann::ordered_json fk = nlohmann::ordered_json::array();
      for (const auto& [name, fw] : fields(k))
        fk.push_back(nlohmann::ordered_json::array({name, fw}));
      f[node_kind_name(k)] = fk;
      w[node_kind_name(k)] = width(k);
    }
    j["fields"] = f;
    j["widths"] = w;
    return j;
  }

  static FeatureSpec from_json(const nlohmann::json& j) {
    FeatureSpec s;
    try {
      s.version = j.at("version").get<std::uint32_t>();
      if (s.version != 1)
        throw FormatError("unsupported feature spec version " +
                          std::to_string(s.version));
      const auto& v = j.at("vocabularies");
      s.value_kinds = v.at("value_kind").get<std::vector<std::string>>();
      s.type_kinds = v.at("type_kind").get<std::vector<std::string>>();
      s.opcodes = v.at("opcode").get<std::vector<std::string>>();
      s.attributes = v.at("attribute").get<std::vector<std::string>>();
      auto bucket = [](const nlohmann::json& t) {
        BucketTable b;
        b.has_none = t.at("none").get<bool>();
        if (t.contains("exact"))
          b.exact = t.at("exact").get<std::vector<std::int64_t>>();
        else
          b.upper_bounds =
              t.at("upper_bounds").get<std::vector<std::int64_t>>();
        return b;
      };
      const auto& bk = j.at("buckets");
      s.alignment = bucket(bk.at("alignment"));
      s.bit_width = bucket(bk.at("bit_width"));
      s.size = bucket(bk.at("size"));
      s.magnitude.abs_upper_bounds =
          bk.at("magnitude").at("abs_upper_bounds")
              .get<std::vector<std::int64_t>>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("malformed feature spec: ") + e.what());
    }
    s.validate();
    if (j.contains("widths")) {  // cross-check stored widths if present
      for (int i = 0; i < kNodeKindCount; ++i) {
        const NodeKind k = static_cast<NodeKind>(i);
        const auto it = j.at("widths").find(node_kind_name(k));
        if (it != j.at("widths").end() && it->get<int>() != s.width(k))
          throw FormatError(std::string("feature spec width mismatch for ") +
                            node_kind_name(k));
      }
    }
    return s;
  }

  void validate() const {
    auto closed = [](const std::vector<std::string>& vocab,
                     const char* what) {
      if (vocab.empty()) throw FormatError(std::string(what) + " vocabulary empty");
      const std::string& last = vocab.back();
      const bool fallback = last == "other" || last == "constant_other" ||
                            last == "opaque";
      if (!fallback)
        throw FormatError(std::string(what) +
                          " vocabulary does not end with a fallback slot");
    };
    closed(value_kinds, "value_kind");
    closed(type_kinds, "type_kind");
    closed(opcodes, "opcode");
    closed(attributes, "attribute");
    auto increasing = [](const std::vector<std::int64_t>& b,
                         const char* what) {
      for (std::size_t i = 1; i < b.size(); ++i)
        if (b[i - 1] >= b[i])
          throw FormatError(std::string(what) +
                            " bucket boundaries not strictly increasing");
    };
    increasing(alignment.exact, "alignment");
    increasing(alignment.upper_bounds, "alignment");
    increasing(bit_width.upper_bounds, "bit_width");
    increasing(size.upper_bounds, "size");
    increasing(magnitude.abs_upper_bounds, "magnitude");
    for (int i = 0; i < kNodeKindCount; ++i)
      if (width(static_cast<NodeKind>(i)) <= 0)
        throw FormatError("non-positive feature width");
  }

  Digest digest_bytes() const { return sha256(to_json().dump()); }
  std::string digest() const { return to_hex(digest_bytes()); }
};

// ---- encoders -------------------------------------------------------------

namespace detail {

inline int checked_index(int idx, int limit, bool lenient, const char* what) {
  if (idx >= 0 && idx < limit) return idx;
  if (lenient) return limit - 1;  // clamp into the fallback slot
  throw FeatureOverflow(std::string(what) + " index " + std::to_string(idx) +
                        " outside vocabulary of size " +
                        std::to_string(limit));
}

}  // namespace detail

inline std::vector<float> encode_value(const FeatureSpec& s, int value_kind,
                                       bool is_constant,
                                       std::optional<std::int64_t> magnitude,
                                       bool lenient = false) {
  std::vector<float> f(s.width(NodeKind::Value), 0.0f);
  const int nk = static_cast<int>(s.value_kinds.size());
  f[detail::checked_index(value_kind, nk, lenient, "value_kind")] = 1.0f;
  if (is_constant) f[nk] = 1.0f;
  f[nk + 1 + s.magnitude.slot_for(magnitude)] = 1.0f;
  return f;
}

inline std::vector<float> encode_type(const FeatureSpec& s, int type_kind,
                                      std::optional<std::int64_t> bits,
                                      bool lenient = false) {
  std::vector<float> f(s.width(NodeKind::Type), 0.0f);
  const int nk = static_cast<int>(s.type_kinds.size());
  f[detail::checked_index(type_kind, nk, lenient, "type_kind")] = 1.0f;
  f[nk + s.bit_width.slot_for(bits)] = 1.0f;
  return f;
}

inline std::vector<float> encode_size(const FeatureSpec& s,
                                      std::uint64_t bytes) {
  std::vector<float> f(s.width(NodeKind::Size), 0.0f);
  f[s.size.slot_for(static_cast<std::int64_t>(bytes))] = 1.0f;
  return f;
}

inline std::vector<float> encode_module(const FeatureSpec& s) {
  std::vector<float> f(s.width(NodeKind::Module), 0.0f);
  f[0] = 1.0f;
  return f;
}

inline std::vector<float> encode_attributes(const FeatureSpec& s,
                                            const std::vector<int>& attrs,
                                            bool lenient = false) {
  std::vector<float> f(s.width(NodeKind::Attributes), 0.0f);
  const int nk = static_cast<int>(s.attributes.size());
  for (int a : attrs)
    f[detail::checked_index(a, nk, lenient, "attribute")] = 1.0f;
  return f;
}

inline std::vector<float> encode_instruction(
    const FeatureSpec& s, int opcode,
    std::optional<std::int64_t> alignment, bool lenient = false) {
  std::vector<float> f(s.width(NodeKind::Instruction), 0.0f);
  const int nk = static_cast<int>(s.opcodes.size());
  f[detail::checked_index(opcode, nk, lenient, "opcode")] = 1.0f;
  f[nk + s.alignment.slot_for(alignment)] = 1.0f;
  return f;
}

}  // namespace irgraph
