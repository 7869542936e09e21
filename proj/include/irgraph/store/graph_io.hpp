#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <string_view>

#include "irgraph/graph/hetero_graph.hpp"
#include "irgraph/store/binary.hpp"

namespace irgraph {

// .irg container, version 1. Little-endian throughout.
//
//   magic            8 bytes "IRGRAPH\0"
//   version          u32 (= 1)
//   feature spec     u64 length + canonical JSON bytes
//   ablation         i8 removed node kind + i8 removed edge kind (-1 = none)
//   provenance       u64 length + source name bytes, 32-byte source digest
//   node counts      6 x u32 (kind order)
//   features         per kind: count x width f32, node-major (row = node)
//   relations        20 x { u8 src kind, u8 dst kind, u64 count,
//                           count x (u32 src, u32 dst) }
//
// Bytes are a pure function of the graph: no timestamps, no padding.

inline constexpr char kGraphMagic[8] = {'I', 'R', 'G', 'R', 'A', 'P', 'H', 0};
inline constexpr std::uint32_t kGraphVersion = 1;

inline std::string serialize_graph(const HeteroGraph& g) {
  store::Writer w;
  w.bytes(kGraphMagic, 8);
  w.u32(kGraphVersion);
  w.str(g.spec.to_json().dump());
  w.i8(g.removed_node_kind);
  w.i8(g.removed_edge_kind);
  w.str(g.source_name);
  w.bytes(g.source_digest.data(), g.source_digest.size());
  for (int k = 0; k < kNodeKindCount; ++k) {
    const auto cols = g.features[k].cols();
    if (cols > std::numeric_limits<std::uint32_t>::max())
      throw SerializationOverflow("node count exceeds u32 for kind " +
                                  std::string(node_kind_name(
                                      static_cast<NodeKind>(k))));
    w.u32(static_cast<std::uint32_t>(cols));
  }
  for (int k = 0; k < kNodeKindCount; ++k) {
    const auto& mat = g.features[k];
    for (Eigen::Index j = 0; j < mat.cols(); ++j)
      for (Eigen::Index i = 0; i < mat.rows(); ++i) w.f32(mat(i, j));
  }
  for (int r = 0; r < kRelationCount; ++r) {
    const auto& rel = g.relations[r];
    w.u8(static_cast<std::uint8_t>(rel.src_kind));
    w.u8(static_cast<std::uint8_t>(rel.dst_kind));
    w.u64(rel.edges.size());
    for (const auto& [s, d] : rel.edges) {
      w.u32(s);
      w.u32(d);
    }
  }
  return w.buffer();
}

inline HeteroGraph deserialize_graph(std::string_view bytes,
                                     std::string_view what = "<memory>") {
  store::Reader r(bytes);
  const char* magic = r.take(8);
  if (std::string_view(magic, 8) != std::string_view(kGraphMagic, 8))
    throw FormatError("bad magic in " + std::string(what));
  const std::uint32_t version = r.u32();
  if (version != kGraphVersion)
    throw FormatError("unsupported version " + std::to_string(version) +
                      " in " + std::string(what));
  FeatureSpec spec;
  try {
    spec = FeatureSpec::from_json(
        nlohmann::json::parse(r.str()));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed feature spec in " + std::string(what) + ": " +
                      e.what());
  }
  HeteroGraph g(spec);
  g.removed_node_kind = r.i8();
  g.removed_edge_kind = r.i8();
  if (g.removed_node_kind < -1 || g.removed_node_kind >= kNodeKindCount ||
      g.removed_edge_kind < -1 || g.removed_edge_kind >= kEdgeKindCount)
    throw FormatError("ablation marker out of range in " + std::string(what));
  g.source_name = r.str();
  const char* digest = r.take(g.source_digest.size());
  std::memcpy(g.source_digest.data(), digest, g.source_digest.size());
  std::uint32_t counts[kNodeKindCount];
  for (auto& c : counts) c = r.u32();
  for (int k = 0; k < kNodeKindCount; ++k) {
    const int width = g.spec.width(static_cast<NodeKind>(k));
    auto& mat = g.features[k];
    mat.resize(width, static_cast<Eigen::Index>(counts[k]));
    for (Eigen::Index j = 0; j < mat.cols(); ++j)
      for (Eigen::Index i = 0; i < mat.rows(); ++i) mat(i, j) = r.f32();
  }
  for (int rel_i = 0; rel_i < kRelationCount; ++rel_i) {
    auto& rel = g.relations[rel_i];
    const std::uint8_t sk = r.u8();
    const std::uint8_t dk = r.u8();
    if (sk >= kNodeKindCount || dk >= kNodeKindCount)
      throw FormatError("relation endpoint kind out of range in " +
                        std::string(what));
    rel.src_kind = static_cast<NodeKind>(sk);
    rel.dst_kind = static_cast<NodeKind>(dk);
    const std::uint64_t n = r.u64();
    rel.edges.clear();
    rel.edges.reserve(n);
    for (std::uint64_t e = 0; e < n; ++e) {
      const std::uint32_t s = r.u32();
      const std::uint32_t d = r.u32();
      rel.edges.emplace_back(s, d);
    }
  }
  if (!r.at_end())
    throw FormatError("length mismatch: " +
                      std::to_string(bytes.size() - r.pos()) +
                      " trailing bytes in " + std::string(what));
  return g;
}

inline void save_graph(const HeteroGraph& g,
                       const std::filesystem::path& path) {
  store::write_file_atomic(path, serialize_graph(g));
}

inline HeteroGraph load_graph(const std::filesystem::path& path) {
  return deserialize_graph(store::read_file(path), path.string());
}

}  // namespace irgraph
