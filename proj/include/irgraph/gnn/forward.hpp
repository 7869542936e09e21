#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "irgraph/errors.hpp"
#include "irgraph/gnn/params.hpp"
#include "irgraph/graph/hetero_graph.hpp"

namespace irgraph {

// Node ids (within one kind) whose input features are replaced by that
// kind's learned mask vector during the forward pass.
struct MaskSpec {
  NodeKind kind = NodeKind::Value;
  std::vector<std::uint32_t> ids;
};

// Every intermediate needed to run the exact backward pass.
struct ForwardTape {
  std::array<Eigen::MatrixXd, kNodeKindCount> X;        // inputs (post-mask)
  std::array<Eigen::MatrixXd, kNodeKindCount> A0;       // input projection
  std::array<Eigen::MatrixXd, kNodeKindCount> Z1, A1;   // layer 1
  std::array<Eigen::MatrixXd, kNodeKindCount> Z2, A2;   // layer 2
  std::array<std::vector<double>, kRelationCount> inv_deg;  // per dst node
  Eigen::VectorXd pooled;     // mean over all nodes of A2
  Eigen::VectorXd graph_emb;  // pool.proj * pooled
  Eigen::Index total_nodes = 0;
};

namespace detail {

// Shared message-passing step: out_k = self_k * in_k + bias_k
//   + sum over relations r of mean over incoming edges of (W_r * in_src).
// Reduction order is fixed (relation index order, stored edge order), so
// results are bit-deterministic.
inline void layer_forward(const HeteroGraph& g, const GnnParams& p,
                          const std::string& prefix,
                          const std::array<Eigen::MatrixXd, kNodeKindCount>& in,
                          std::array<Eigen::MatrixXd, kNodeKindCount>& out,
                          std::array<std::vector<double>, kRelationCount>&
                              inv_deg) {
  const auto& table = relation_table();
  for (int k = 0; k < kNodeKindCount; ++k) {
    const char* kn = node_kind_name(static_cast<NodeKind>(k));
    out[k].noalias() = p.mat(prefix + ".self." + kn) * in[k];
    out[k].colwise() += p.mat(prefix + ".bias." + kn).col(0);
  }
  for (int r = 0; r < kRelationCount; ++r) {
    const auto& rel = g.relations[r];
    if (rel.edges.empty()) continue;
    const int s = static_cast<int>(rel.src_kind);
    const int d = static_cast<int>(rel.dst_kind);
    if (inv_deg[r].empty()) {
      std::vector<double> deg(static_cast<std::size_t>(out[d].cols()), 0.0);
      for (const auto& e : rel.edges) ++deg[e.second];
      inv_deg[r].resize(deg.size(), 0.0);
      for (std::size_t i = 0; i < deg.size(); ++i)
        inv_deg[r][i] = deg[i] > 0.0 ? 1.0 / deg[i] : 0.0;
    }
    const Eigen::MatrixXd msg =
        p.mat(prefix + ".rel." + table[r].name) * in[s];
    for (const auto& [src, dst] : rel.edges)
      out[d].col(dst) += inv_deg[r][dst] * msg.col(src);
  }
}

// Backward through one message-passing step. `dZ` is the gradient at the
// pre-activation output; accumulates parameter gradients and returns the
// gradient w.r.t. the layer input.
inline std::array<Eigen::MatrixXd, kNodeKindCount> layer_backward(
    const HeteroGraph& g, const GnnParams& p, const std::string& prefix,
    const std::array<Eigen::MatrixXd, kNodeKindCount>& in,
    const std::array<Eigen::MatrixXd, kNodeKindCount>& dZ,
    const std::array<std::vector<double>, kRelationCount>& inv_deg,
    std::vector<double>& grad) {
  const auto& table = relation_table();
  std::array<Eigen::MatrixXd, kNodeKindCount> din;
  for (int k = 0; k < kNodeKindCount; ++k) {
    const char* kn = node_kind_name(static_cast<NodeKind>(k));
    p.mat_in(grad, prefix + ".self." + kn).noalias() +=
        dZ[k] * in[k].transpose();
    p.mat_in(grad, prefix + ".bias." + kn).col(0) += dZ[k].rowwise().sum();
    din[k].noalias() = p.mat(prefix + ".self." + kn).transpose() * dZ[k];
  }
  for (int r = 0; r < kRelationCount; ++r) {
    const auto& rel = g.relations[r];
    if (rel.edges.empty()) continue;
    const int s = static_cast<int>(rel.src_kind);
    const int d = static_cast<int>(rel.dst_kind);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(dZ[d].rows(), in[s].cols());
    for (const auto& [src, dst] : rel.edges)
      c.col(src) += inv_deg[r][dst] * dZ[d].col(dst);
    p.mat_in(grad, prefix + ".rel." + table[r].name).noalias() +=
        c * in[s].transpose();
    din[s].noalias() +=
        p.mat(prefix + ".rel." + table[r].name).transpose() * c;
  }
  return din;
}

}  // namespace detail

// Two message-passing layers with ReLU, mean pooling over all nodes, and a
// linear projection to the output embedding dimension.
inline ForwardTape gnn_forward(const HeteroGraph& g, const GnnParams& p,
                               const MaskSpec* mask = nullptr) {
  for (int k = 0; k < kNodeKindCount; ++k)
    if (g.spec.width(static_cast<NodeKind>(k)) !=
        p.spec().width(static_cast<NodeKind>(k)))
      throw ShapeMismatch("graph feature widths do not match parameters");
  ForwardTape t;
  for (int k = 0; k < kNodeKindCount; ++k) {
    t.X[k] = g.features[k].cast<double>();
    if (mask && static_cast<int>(mask->kind) == k) {
      const auto mv =
          p.mat("mask." + std::string(node_kind_name(mask->kind))).col(0);
      for (std::uint32_t id : mask->ids) t.X[k].col(id) = mv;
    }
    t.A0[k].noalias() =
        p.mat("in_proj." +
              std::string(node_kind_name(static_cast<NodeKind>(k)))) *
        t.X[k];
    t.total_nodes += t.X[k].cols();
  }
  if (t.total_nodes == 0) throw EmptyGraph("graph has no nodes");
  detail::layer_forward(g, p, "l1", t.A0, t.Z1, t.inv_deg);
  for (int k = 0; k < kNodeKindCount; ++k) t.A1[k] = t.Z1[k].cwiseMax(0.0);
  detail::layer_forward(g, p, "l2", t.A1, t.Z2, t.inv_deg);
  for (int k = 0; k < kNodeKindCount; ++k) t.A2[k] = t.Z2[k].cwiseMax(0.0);
  t.pooled = Eigen::VectorXd::Zero(p.dims().h2);
  for (int k = 0; k < kNodeKindCount; ++k)
    if (t.A2[k].cols() > 0) t.pooled += t.A2[k].rowwise().sum();
  t.pooled /= static_cast<double>(t.total_nodes);
  t.graph_emb.noalias() = p.mat("pool.proj") * t.pooled;
  return t;
}

// Projected node embeddings in canonical order (kind order, then id):
// column j is pool.proj * A2 for the j-th node. Used as prompt node rows.
inline Eigen::MatrixXd projected_node_rows(const GnnParams& p,
                                           const ForwardTape& t) {
  Eigen::MatrixXd rows(p.dims().embed, t.total_nodes);
  Eigen::Index at = 0;
  const auto proj = p.mat("pool.proj");
  for (int k = 0; k < kNodeKindCount; ++k) {
    if (t.A2[k].cols() == 0) continue;
    rows.middleCols(at, t.A2[k].cols()).noalias() = proj * t.A2[k];
    at += t.A2[k].cols();
  }
  return rows;
}

// Exact backward pass. Upstream gradients:
//   d_graph_emb   gradient at the pooled graph embedding (size 0 = none),
//   d_node_rows   gradient at projected_node_rows (0x0 = none),
//   d_a2          per-kind gradient at the layer-2 activations (empty = none).
// Parameter gradients accumulate into `grad` (laid out like p.flat()).
inline void gnn_backward(const HeteroGraph& g, const GnnParams& p,
                         const ForwardTape& t,
                         const Eigen::VectorXd& d_graph_emb,
                         const Eigen::MatrixXd& d_node_rows,
                         const std::array<Eigen::MatrixXd, kNodeKindCount>&
                             d_a2,
                         const MaskSpec* mask, std::vector<double>& grad) {
  if (grad.size() != p.size())
    throw ShapeMismatch("gradient buffer does not match parameter layout");
  std::array<Eigen::MatrixXd, kNodeKindCount> dA2;
  for (int k = 0; k < kNodeKindCount; ++k) {
    dA2[k] = Eigen::MatrixXd::Zero(t.A2[k].rows(), t.A2[k].cols());
    if (d_a2[k].size() > 0) dA2[k] += d_a2[k];
  }
  // Pooling + projection backward.
  if (d_graph_emb.size() > 0) {
    p.mat_in(grad, "pool.proj").noalias() +=
        d_graph_emb * t.pooled.transpose();
    const Eigen::VectorXd d_pooled =
        p.mat("pool.proj").transpose() * d_graph_emb /
        static_cast<double>(t.total_nodes);
    for (int k = 0; k < kNodeKindCount; ++k)
      if (dA2[k].cols() > 0) dA2[k].colwise() += d_pooled;
  }
  // Node-row projection backward (canonical order).
  if (d_node_rows.size() > 0) {
    Eigen::Index at = 0;
    const auto proj = p.mat("pool.proj");
    for (int k = 0; k < kNodeKindCount; ++k) {
      const Eigen::Index n = t.A2[k].cols();
      if (n == 0) continue;
      const auto slice = d_node_rows.middleCols(at, n);
      p.mat_in(grad, "pool.proj").noalias() += slice * t.A2[k].transpose();
      dA2[k].noalias() += proj.transpose() * slice;
      at += n;
    }
  }
  // Layer 2.
  std::array<Eigen::MatrixXd, kNodeKindCount> dZ2;
  for (int k = 0; k < kNodeKindCount; ++k)
    dZ2[k] = dA2[k].cwiseProduct(
        (t.Z2[k].array() > 0.0).cast<double>().matrix());
  auto dA1 = detail::layer_backward(g, p, "l2", t.A1, dZ2, t.inv_deg, grad);
  // Layer 1.
  std::array<Eigen::MatrixXd, kNodeKindCount> dZ1;
  for (int k = 0; k < kNodeKindCount; ++k)
    dZ1[k] = dA1[k].cwiseProduct(
        (t.Z1[k].array() > 0.0).cast<double>().matrix());
  auto dA0 = detail::layer_backward(g, p, "l1", t.A0, dZ1, t.inv_deg, grad);
  // Input projection and mask vectors.
  for (int k = 0; k < kNodeKindCount; ++k) {
    const char* kn = node_kind_name(static_cast<NodeKind>(k));
    p.mat_in(grad, "in_proj." + std::string(kn)).noalias() +=
        dA0[k] * t.X[k].transpose();
    if (mask && static_cast<int>(mask->kind) == k && !mask->ids.empty()) {
      const Eigen::MatrixXd dX =
          p.mat("in_proj." + std::string(kn)).transpose() * dA0[k];
      auto mg = p.mat_in(grad, "mask." + std::string(kn));
      for (std::uint32_t id : mask->ids) mg.col(0) += dX.col(id);
    }
  }
}

}  // namespace irgraph
