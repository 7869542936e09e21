#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "irgraph/errors.hpp"

namespace irgraph {

struct AdamWConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

struct AdamWState {
  std::vector<double> m, v;
  std::uint64_t step = 0;

  explicit AdamWState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

// One AdamW update with decoupled weight decay:
//   theta <- theta - lr * m_hat / (sqrt(v_hat) + eps) - lr * wd * theta
inline void adamw_step(std::vector<double>& params,
                       const std::vector<double>& grad, AdamWState& st,
                       const AdamWConfig& cfg) {
  if (params.size() != grad.size() || params.size() != st.m.size())
    throw ShapeMismatch("optimizer buffers do not match parameter count");
  st.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    st.m[i] = cfg.beta1 * st.m[i] + (1.0 - cfg.beta1) * g;
    st.v[i] = cfg.beta2 * st.v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = st.m[i] / bc1;
    const double v_hat = st.v[i] / bc2;
    params[i] -= cfg.lr * (m_hat / (std::sqrt(v_hat) + cfg.eps) +
                           cfg.weight_decay * params[i]);
  }
}

}  // namespace irgraph
