#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <vector>

#include "irgraph/graph/hetero_graph.hpp"
#include "irgraph/sha256.hpp"

namespace irgraph {

namespace detail {

inline void update_u32_le(Sha256& h, std::uint32_t v) {
  std::uint8_t b[4] = {static_cast<std::uint8_t>(v),
                       static_cast<std::uint8_t>(v >> 8),
                       static_cast<std::uint8_t>(v >> 16),
                       static_cast<std::uint8_t>(v >> 24)};
  h.update(b, 4);
}

inline void update_f32_le(Sha256& h, float x) {
  std::uint32_t bits;
  std::memcpy(&bits, &x, 4);
  update_u32_le(h, bits);
}

}  // namespace detail

// Relabeling-invariant structural hash: Weisfeiler-Leman color refinement
// over (node kind, feature vector, multiset of incoming neighbor colors per
// typed relation), iterated until the color partition stops refining, then a
// hash of the sorted color multiset. Identifier names and provenance do not
// participate, so consistently renamed modules hash equal; any feature or
// edge difference (including Cfg order) separates the digests.
inline Digest canonical_digest_bytes(const HeteroGraph& g) {
  const auto& table = relation_table();

  // Initial colors: hash of (kind, feature row).
  std::array<std::vector<Digest>, kNodeKindCount> color;
  std::size_t total = 0;
  for (int k = 0; k < kNodeKindCount; ++k) {
    const auto& mat = g.features[k];
    color[k].resize(static_cast<std::size_t>(mat.cols()));
    total += color[k].size();
    for (Eigen::Index j = 0; j < mat.cols(); ++j) {
      Sha256 h;
      const std::uint8_t kb = static_cast<std::uint8_t>(k);
      h.update(&kb, 1);
      detail::update_u32_le(h, static_cast<std::uint32_t>(mat.rows()));
      for (Eigen::Index i = 0; i < mat.rows(); ++i)
        detail::update_f32_le(h, mat(i, j));
      color[k][static_cast<std::size_t>(j)] = h.finish();
    }
  }

  auto distinct_count = [&color]() {
    std::vector<Digest> all;
    for (const auto& v : color) all.insert(all.end(), v.begin(), v.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all.size();
  };

  std::size_t classes = distinct_count();
  for (std::size_t round = 0; round < total; ++round) {
    // Gather incoming neighbor colors per relation.
    std::array<std::vector<std::vector<Digest>>, kRelationCount> incoming;
    for (int r = 0; r < kRelationCount; ++r) {
      const int dk = static_cast<int>(table[r].dst);
      incoming[r].resize(color[dk].size());
      for (const auto& [s, d] : g.relations[r].edges)
        incoming[r][d].push_back(color[static_cast<int>(table[r].src)][s]);
    }
    std::array<std::vector<Digest>, kNodeKindCount> next;
    for (int k = 0; k < kNodeKindCount; ++k) {
      next[k].resize(color[k].size());
      for (std::size_t j = 0; j < color[k].size(); ++j) {
        Sha256 h;
        h.update(color[k][j].data(), color[k][j].size());
        for (int r = 0; r < kRelationCount; ++r) {
          if (static_cast<int>(table[r].dst) != k) continue;
          auto& nbrs = incoming[r][j];
          std::sort(nbrs.begin(), nbrs.end());
          const std::uint8_t rb = static_cast<std::uint8_t>(r);
          h.update(&rb, 1);
          detail::update_u32_le(h, static_cast<std::uint32_t>(nbrs.size()));
          for (const auto& c : nbrs) h.update(c.data(), c.size());
        }
        next[k][j] = h.finish();
      }
    }
    color = std::move(next);
    const std::size_t refined = distinct_count();
    if (refined == classes) break;  // partition stable
    classes = refined;
  }

  Sha256 h;
  const std::uint8_t removed[2] = {
      static_cast<std::uint8_t>(g.removed_node_kind + 1),
      static_cast<std::uint8_t>(g.removed_edge_kind + 1)};
  h.update(removed, 2);
  for (int k = 0; k < kNodeKindCount; ++k)
    detail::update_u32_le(h, static_cast<std::uint32_t>(color[k].size()));
  std::vector<Digest> all;
  for (const auto& v : color) all.insert(all.end(), v.begin(), v.end());
  std::sort(all.begin(), all.end());
  for (const auto& c : all) h.update(c.data(), c.size());
  return h.finish();
}

inline std::string canonical_digest(const HeteroGraph& g) {
  return to_hex(canonical_digest_bytes(g));
}

}  // namespace irgraph
