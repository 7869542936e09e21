#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "irgraph/errors.hpp"
#include "irgraph/gnn/forward.hpp"
#include "irgraph/gnn/params.hpp"

namespace irgraph {

namespace detail {

// Numerically stable softmax cross-entropy. Returns the loss; when dz is
// non-null it receives softmax(z) - one_hot(target).
inline double softmax_xent(const Eigen::VectorXd& z, int target,
                           Eigen::VectorXd* dz) {
  const double m = z.maxCoeff();
  const Eigen::VectorXd e = (z.array() - m).exp();
  const double sum = e.sum();
  const double loss = std::log(sum) + m - z(target);
  if (dz) {
    *dz = e / sum;
    (*dz)(target) -= 1.0;
  }
  return loss;
}

// Stable elementwise binary cross-entropy on logits, averaged over slots.
// dz receives (sigmoid(z) - y) / slots.
inline double mean_bce(const Eigen::VectorXd& z, const Eigen::VectorXd& y,
                       Eigen::VectorXd* dz) {
  const auto n = z.size();
  double loss = 0.0;
  if (dz) dz->resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double zi = z(i), yi = y(i);
    loss += std::max(zi, 0.0) - zi * yi + std::log1p(std::exp(-std::abs(zi)));
    if (dz) (*dz)(i) = (1.0 / (1.0 + std::exp(-zi)) - yi) / n;
  }
  return loss / n;
}

inline void check_finite(double loss, const std::string& what) {
  if (!std::isfinite(loss)) throw NonFiniteLoss(what + " loss is not finite");
}

}  // namespace detail

// Cross-entropy of the per-kind prediction head against each masked node's
// categorical label (taken from the pre-mask stored features), averaged over
// the masked nodes. Gradients for one sample accumulate into `grad` when
// non-null; batch averaging is the caller's job.
inline double masked_loss(const HeteroGraph& g, const GnnParams& p,
                          const MaskSpec& plan,
                          std::vector<double>* grad = nullptr) {
  if (plan.ids.empty())
    throw InternalInconsistency("mask plan has no masked nodes");
  const int k = static_cast<int>(plan.kind);
  const std::string kn = node_kind_name(plan.kind);
  const auto [field_off, field_w] = p.spec().segment(plan.kind,
                                                     head_field(plan.kind));
  ForwardTape t = gnn_forward(g, p, &plan);
  const auto hw = p.mat("head." + kn + ".w");
  const auto hb = p.mat("head." + kn + ".b").col(0);
  const bool multi_label = plan.kind == NodeKind::Attributes;
  const double inv_m = 1.0 / static_cast<double>(plan.ids.size());

  double loss = 0.0;
  std::array<Eigen::MatrixXd, kNodeKindCount> dA2;
  if (grad)
    dA2[k] = Eigen::MatrixXd::Zero(t.A2[k].rows(), t.A2[k].cols());
  for (std::uint32_t id : plan.ids) {
    const Eigen::VectorXd z = hw * t.A2[k].col(id) + hb;
    const Eigen::VectorXd target =
        g.features[k].col(id).segment(field_off, field_w).cast<double>();
    Eigen::VectorXd dz;
    if (multi_label) {
      loss += detail::mean_bce(z, target, grad ? &dz : nullptr);
    } else {
      int label = 0;
      target.maxCoeff(&label);
      loss += detail::softmax_xent(z, label, grad ? &dz : nullptr);
    }
    if (grad) {
      dz *= inv_m;
      p.mat_in(*grad, "head." + kn + ".w").noalias() +=
          dz * t.A2[k].col(id).transpose();
      p.mat_in(*grad, "head." + kn + ".b").col(0) += dz;
      dA2[k].col(id).noalias() += hw.transpose() * dz;
    }
  }
  loss *= inv_m;
  detail::check_finite(loss, "masked");
  if (grad)
    gnn_backward(g, p, t, Eigen::VectorXd(), Eigen::MatrixXd(), dA2, &plan,
                 *grad);
  return loss;
}

// Linear head over the graph embedding with softmax cross-entropy.
inline double classification_loss(const HeteroGraph& g, const GnnParams& p,
                                  int label,
                                  std::vector<double>* grad = nullptr) {
  if (p.classes() < 2)
    throw InternalInconsistency("params carry no classification head");
  if (label < 0 || label >= p.classes())
    throw InternalInconsistency("label out of range");
  ForwardTape t = gnn_forward(g, p);
  const Eigen::VectorXd z =
      p.mat("cls.w") * t.graph_emb + p.mat("cls.b").col(0);
  Eigen::VectorXd dz;
  const double loss = detail::softmax_xent(z, label, grad ? &dz : nullptr);
  detail::check_finite(loss, "classification");
  if (grad) {
    p.mat_in(*grad, "cls.w").noalias() += dz * t.graph_emb.transpose();
    p.mat_in(*grad, "cls.b").col(0) += dz;
    const Eigen::VectorXd d_emb = p.mat("cls.w").transpose() * dz;
    std::array<Eigen::MatrixXd, kNodeKindCount> no_da2{};
    gnn_backward(g, p, t, d_emb, Eigen::MatrixXd(), no_da2, nullptr, *grad);
  }
  return loss;
}

// Argmax class; ties break to the lowest index.
inline int predict_class(const HeteroGraph& g, const GnnParams& p) {
  if (p.classes() < 2)
    throw InternalInconsistency("params carry no classification head");
  ForwardTape t = gnn_forward(g, p);
  const Eigen::VectorXd z =
      p.mat("cls.w") * t.graph_emb + p.mat("cls.b").col(0);
  int best = 0;
  for (int i = 1; i < z.size(); ++i)
    if (z(i) > z(best)) best = i;
  return best;
}

}  // namespace irgraph
