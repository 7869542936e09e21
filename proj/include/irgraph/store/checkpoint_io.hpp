#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "irgraph/sha256.hpp"
#include "irgraph/store/binary.hpp"

namespace irgraph {

// Parameter checkpoint container, version 1. Same discipline as .irg:
// little-endian, byte-deterministic, atomic writes.
//
//   magic         8 bytes "IRGCKPT\0"
//   version       u32 (= 1)
//   spec digest   32 bytes (SHA-256 of the FeatureSpec the params bind to)
//   dims          u32 h1, u32 h2, u32 E
//   sections      u32 count, then per section:
//                   u64 name length + name bytes, u64 count, count x f64
struct Checkpoint {
  Digest spec_digest{};
  std::uint32_t h1 = 0, h2 = 0, embed_dim = 0;
  std::vector<std::pair<std::string, std::vector<double>>> sections;
};

inline constexpr char kCheckpointMagic[8] = {'I', 'R', 'G', 'C',
                                             'K', 'P', 'T', 0};
inline constexpr std::uint32_t kCheckpointVersion = 1;

inline std::string serialize_checkpoint(const Checkpoint& c) {
  store::Writer w;
  w.bytes(kCheckpointMagic, 8);
  w.u32(kCheckpointVersion);
  w.bytes(c.spec_digest.data(), c.spec_digest.size());
  w.u32(c.h1);
  w.u32(c.h2);
  w.u32(c.embed_dim);
  w.u32(static_cast<std::uint32_t>(c.sections.size()));
  for (const auto& [name, data] : c.sections) {
    w.str(name);
    w.u64(data.size());
    for (double v : data) w.f64(v);
  }
  return w.buffer();
}

inline Checkpoint deserialize_checkpoint(std::string_view bytes,
                                         std::string_view what = "<memory>") {
  store::Reader r(bytes);
  const char* magic = r.take(8);
  if (std::string_view(magic, 8) != std::string_view(kCheckpointMagic, 8))
    throw FormatError("bad magic in " + std::string(what));
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion)
    throw FormatError("unsupported version " + std::to_string(version) +
                      " in " + std::string(what));
  Checkpoint c;
  std::memcpy(c.spec_digest.data(), r.take(c.spec_digest.size()),
              c.spec_digest.size());
  c.h1 = r.u32();
  c.h2 = r.u32();
  c.embed_dim = r.u32();
  const std::uint32_t n = r.u32();
  c.sections.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    std::string name = r.str();
    const std::uint64_t count = r.u64();
    std::vector<double> data;
    data.reserve(count);
    for (std::uint64_t j = 0; j < count; ++j) data.push_back(r.f64());
    c.sections.emplace_back(std::move(name), std::move(data));
  }
  if (!r.at_end())
    throw FormatError("length mismatch: " +
                      std::to_string(bytes.size() - r.pos()) +
                      " trailing bytes in " + std::string(what));
  return c;
}

inline void save_checkpoint(const Checkpoint& c,
                            const std::filesystem::path& path) {
  store::write_file_atomic(path, serialize_checkpoint(c));
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return deserialize_checkpoint(store::read_file(path), path.string());
}

}  // namespace irgraph
