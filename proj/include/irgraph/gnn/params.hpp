#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "irgraph/errors.hpp"
#include "irgraph/graph/feature_spec.hpp"
#include "irgraph/rng.hpp"
#include "irgraph/store/checkpoint_io.hpp"

namespace irgraph {

struct GnnDims {
  int h1 = 64;
  int h2 = 64;
  int embed = 256;
};

// Kinds eligible for masking and prediction heads (all but Module), in
// node-kind order.
inline const std::vector<NodeKind>& maskable_kinds() {
  static const std::vector<NodeKind> kinds = {
      NodeKind::Value, NodeKind::Type, NodeKind::Size, NodeKind::Attributes,
      NodeKind::Instruction};
  return kinds;
}

// The categorical field each head predicts for its kind.
inline const char* head_field(NodeKind k) {
  switch (k) {
    case NodeKind::Value: return "value_kind";
    case NodeKind::Type: return "type_kind";
    case NodeKind::Size: return "size_bucket";
    case NodeKind::Attributes: return "attribute_set";
    case NodeKind::Instruction: return "opcode";
    default:
      throw InternalInconsistency("no prediction head for kind " +
                                  std::string(node_kind_name(k)));
  }
}

// All trainable parameters, stored as one flat 64-bit vector with a fixed
// registry of named matrix segments. The registry order is part of the
// serialization contract (checkpoints store sections in registry order).
class GnnParams {
 public:
  struct Segment {
    std::string name;
    std::size_t offset;
    int rows;
    int cols;
  };

  GnnParams(FeatureSpec spec, GnnDims dims, int classes = 0)
      : spec_(std::move(spec)), dims_(dims), classes_(classes) {
    build_registry();
    flat_.assign(total_, 0.0);
  }

  const FeatureSpec& spec() const { return spec_; }
  const GnnDims& dims() const { return dims_; }
  int classes() const { return classes_; }
  std::size_t size() const { return total_; }
  std::vector<double>& flat() { return flat_; }
  const std::vector<double>& flat() const { return flat_; }
  const std::vector<Segment>& segments() const { return segments_; }

  bool has(const std::string& name) const { return index_.count(name) != 0; }

  const Segment& segment(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end())
      throw InternalInconsistency("unknown parameter segment " + name);
    return segments_[it->second];
  }

  // Matrix view over this parameter vector (column-major).
  Eigen::Map<Eigen::MatrixXd> mat(const std::string& name) {
    const Segment& s = segment(name);
    return {flat_.data() + s.offset, s.rows, s.cols};
  }
  Eigen::Map<const Eigen::MatrixXd> mat(const std::string& name) const {
    const Segment& s = segment(name);
    return {flat_.data() + s.offset, s.rows, s.cols};
  }
  // Matrix view over an external buffer with this registry's layout
  // (used for gradient and optimizer-state vectors).
  Eigen::Map<Eigen::MatrixXd> mat_in(std::vector<double>& buf,
                                     const std::string& name) const {
    const Segment& s = segment(name);
    if (buf.size() != total_)
      throw ShapeMismatch("buffer size does not match parameter layout");
    return {buf.data() + s.offset, s.rows, s.cols};
  }

  // Glorot-uniform weights, zero biases; deterministic per seed.
  static GnnParams init(const FeatureSpec& spec, GnnDims dims,
                        std::uint64_t seed, int classes = 0) {
    if (dims.h1 <= 0 || dims.h2 <= 0 || dims.embed <= 0)
      throw ShapeMismatch("embedding dims must be positive");
    GnnParams p(spec, dims, classes);
    Rng rng(seed);
    for (const Segment& s : p.segments_) {
      const bool is_bias =
          s.name.find(".bias.") != std::string::npos ||
          (s.name.size() > 2 &&
           s.name.compare(s.name.size() - 2, 2, ".b") == 0);
      if (is_bias) continue;  // already zero
      const double a = std::sqrt(6.0 / (s.rows + s.cols));
      for (int i = 0; i < s.rows * s.cols; ++i)
        p.flat_[s.offset + i] = (2.0 * rng.uniform() - 1.0) * a;
    }
    return p;
  }

  Checkpoint to_checkpoint() const {
    Checkpoint c;
    c.spec_digest = spec_.digest_bytes();
    c.h1 = static_cast<std::uint32_t>(dims_.h1);
    c.h2 = static_cast<std::uint32_t>(dims_.h2);
    c.embed_dim = static_cast<std::uint32_t>(dims_.embed);
    for (const Segment& s : segments_) {
      std::vector<double> data(flat_.begin() + s.offset,
                               flat_.begin() + s.offset + s.rows * s.cols);
      c.sections.emplace_back(s.name, std::move(data));
    }
    return c;
  }

  static GnnParams from_checkpoint(const Checkpoint& c,
                                   const FeatureSpec& spec) {
    if (spec.digest_bytes() != c.spec_digest)
      throw FormatError(
          "checkpoint was trained against a different feature layout");
    GnnDims dims{static_cast<int>(c.h1), static_cast<int>(c.h2),
                 static_cast<int>(c.embed_dim)};
    int classes = 0;
    for (const auto& [name, data] : c.sections)
      if (name == "cls.b") classes = static_cast<int>(data.size());
    GnnParams p(spec, dims, classes);
    if (c.sections.size() != p.segments_.size())
      throw FormatError("checkpoint section count does not match layout");
    for (std::size_t i = 0; i < c.sections.size(); ++i) {
      const auto& [name, data] = c.sections[i];
      const Segment& s = p.segments_[i];
      if (name != s.name ||
          data.size() != static_cast<std::size_t>(s.rows) * s.cols)
        throw FormatError("checkpoint section " + name +
                          " does not match layout segment " + s.name);
      std::copy(data.begin(), data.end(), p.flat_.begin() + s.offset);
    }
    return p;
  }

 private:
  void add(const std::string& name, int rows, int cols) {
    index_[name] = segments_.size();
    segments_.push_back({name, total_, rows, cols});
    total_ += static_cast<std::size_t>(rows) * cols;
  }

  void build_registry() {
    const auto& table = relation_table();
    for (int k = 0; k < kNodeKindCount; ++k)
      add("in_proj." + std::string(node_kind_name(static_cast<NodeKind>(k))),
          dims_.h1, spec_.width(static_cast<NodeKind>(k)));
    for (int r = 0; r < kRelationCount; ++r)
      add("l1.rel." + std::string(table[r].name), dims_.h1, dims_.h1);
    for (int k = 0; k < kNodeKindCount; ++k)
      add("l1.self." + std::string(node_kind_name(static_cast<NodeKind>(k))),
          dims_.h1, dims_.h1);
    for (int k = 0; k < kNodeKindCount; ++k)
      add("l1.bias." + std::string(node_kind_name(static_cast<NodeKind>(k))),
          dims_.h1, 1);
    for (int r = 0; r < kRelationCount; ++r)
      add("l2.rel." + std::string(table[r].name), dims_.h2, dims_.h1);
    for (int k = 0; k < kNodeKindCount; ++k)
      add("l2.self." + std::string(node_kind_name(static_cast<NodeKind>(k))),
          dims_.h2, dims_.h1);
    for (int k = 0; k < kNodeKindCount; ++k)
      add("l2.bias." + std::string(node_kind_name(static_cast<NodeKind>(k))),
          dims_.h2, 1);
    add("pool.proj", dims_.embed, dims_.h2);
    for (NodeKind k : maskable_kinds())
      add("mask." + std::string(node_kind_name(k)), spec_.width(k), 1);
    for (NodeKind k : maskable_kinds()) {
      const auto [off, width] = spec_.segment(k, head_field(k));
      (void)off;
      add("head." + std::string(node_kind_name(k)) + ".w", width, dims_.h2);
      add("head." + std::string(node_kind_name(k)) + ".b", width, 1);
    }
    if (classes_ > 0) {
      add("cls.w", classes_, dims_.embed);
      add("cls.b", classes_, 1);
    }
  }

  FeatureSpec spec_;
  GnnDims dims_;
  int classes_ = 0;
  std::vector<double> flat_;
  std::vector<Segment> segments_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t total_ = 0;
};

}  // namespace irgraph
