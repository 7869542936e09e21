#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "irgraph/errors.hpp"
#include "irgraph/rng.hpp"
#include "irgraph/sha256.hpp"
#include "irgraph/store/checkpoint_io.hpp"

namespace irgraph {

// Deterministic stand-in decoder: byte-level vocabulary (256 bytes + BOS +
// EOS), sinusoidal positions, two single-head causal self-attention layers
// with tanh MLPs and residual connections, tied input/output embedding.
// Its parameters are immutable during fine-tuning; only gradients w.r.t.
// the input rows are ever computed.
struct FrozenLm {
  static constexpr int kVocab = 258;
  static constexpr int kBos = 256;
  static constexpr int kEos = 257;

  struct Layer {
    Eigen::MatrixXd wq, wk, wv, wo;  // embed x embed
    Eigen::MatrixXd w1;              // d_ff x embed
    Eigen::VectorXd b1;              // d_ff
    Eigen::MatrixXd w2;              // embed x d_ff
    Eigen::VectorXd b2;              // embed
  };

  int embed = 0;
  int d_ff = 0;
  int context = 1024;
  Eigen::MatrixXd emb;  // kVocab x embed (tied output head)
  std::vector<Layer> layers;
};

inline FrozenLm init_lm(int embed, std::uint64_t seed, int context = 1024) {
  if (embed <= 0) throw ShapeMismatch("model width must be positive");
  FrozenLm lm;
  lm.embed = embed;
  lm.d_ff = 2 * embed;
  lm.context = context;
  Rng rng(seed);
  auto glorot = [&rng](Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
    for (Eigen::Index c = 0; c < cols; ++c)
      for (Eigen::Index r = 0; r < rows; ++r)
        m(r, c) = (2.0 * rng.uniform() - 1.0) * a;
    return m;
  };
  lm.emb = glorot(FrozenLm::kVocab, embed);
  lm.layers.resize(2);
  for (auto& l : lm.layers) {
    l.wq = glorot(embed, embed);
    l.wk = glorot(embed, embed);
    l.wv = glorot(embed, embed);
    l.wo = glorot(embed, embed);
    l.w1 = glorot(lm.d_ff, embed);
    l.b1 = Eigen::VectorXd::Zero(lm.d_ff);
    l.w2 = glorot(embed, lm.d_ff);
    l.b2 = Eigen::VectorXd::Zero(embed);
  }
  return lm;
}

// Sinusoidal positional encoding, embed x n, column = position.
inline Eigen::MatrixXd positional_encoding(int embed, Eigen::Index n) {
  Eigen::MatrixXd pe(embed, n);
  for (Eigen::Index pos = 0; pos < n; ++pos)
    for (int i = 0; i < embed; ++i) {
      const double rate =
          std::pow(10000.0, -static_cast<double>(i - i % 2) / embed);
      pe(i, pos) = (i % 2 == 0) ? std::sin(pos * rate) : std::cos(pos * rate);
    }
  return pe;
}

struct LmTape {
  struct Layer {
    Eigen::MatrixXd x_in;  // embed x n (layer input)
    Eigen::MatrixXd q, k, v;
    Eigen::MatrixXd attn;  // n x n column-softmax weights
    Eigen::MatrixXd x1;    // post-attention residual
    Eigen::MatrixXd t;     // tanh activations, d_ff x n
  };
  std::vector<Layer> layers;
  Eigen::MatrixXd x_out;  // embed x n (final hidden states)
};

// Rows are E-dimensional input embeddings, one column per position.
// Returns next-token logits (kVocab x n).
inline Eigen::MatrixXd lm_forward(const Eigen::MatrixXd& rows,
                                  const FrozenLm& lm, LmTape* tape = nullptr) {
  if (rows.rows() != lm.embed)
    throw DimensionMismatch("input rows have width " +
                            std::to_string(rows.rows()) + ", model width is " +
                            std::to_string(lm.embed));
  const Eigen::Index n = rows.cols();
  if (n > lm.context)
    throw ContextOverflow("sequence of " + std::to_string(n) +
                          " rows exceeds context " +
                          std::to_string(lm.context));
  const double scale = 1.0 / std::sqrt(static_cast<double>(lm.embed));
  Eigen::MatrixXd x = rows + positional_encoding(lm.embed, n);
  if (tape) tape->layers.resize(lm.layers.size());
  for (std::size_t li = 0; li < lm.layers.size(); ++li) {
    const auto& l = lm.layers[li];
    const Eigen::MatrixXd q = l.wq * x;
    const Eigen::MatrixXd k = l.wk * x;
    const Eigen::MatrixXd v = l.wv * x;
    // Causal column softmax of k_i . q_j over keys i <= j.
    Eigen::MatrixXd attn = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::VectorXd s = (k.leftCols(j + 1).transpose() * q.col(j)) * scale;
      const double m = s.maxCoeff();
      Eigen::VectorXd e = (s.array() - m).exp();
      attn.col(j).head(j + 1) = e / e.sum();
    }
    const Eigen::MatrixXd x1 = x + l.wo * (v * attn);
    const Eigen::MatrixXd t = (l.w1 * x1).colwise() + l.b1;
    const Eigen::MatrixXd th = t.array().tanh();
    Eigen::MatrixXd x2 = x1 + ((l.w2 * th).colwise() + l.b2);
    if (tape) {
      auto& tl = tape->layers[li];
      tl.x_in = x;
      tl.q = q;
      tl.k = k;
      tl.v = v;
      tl.attn = attn;
      tl.x1 = x1;
      tl.t = th;
    }
    x = std::move(x2);
  }
  if (tape) tape->x_out = x;
  return lm.emb * x;
}

// Gradient of the loss w.r.t. the input rows, given the gradient at the
// logits. LM parameters never receive gradients (frozen by construction).
inline Eigen::MatrixXd lm_backward_inputs(const FrozenLm& lm,
                                          const LmTape& tape,
                                          const Eigen::MatrixXd& d_logits) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(lm.embed));
  Eigen::MatrixXd dx = lm.emb.transpose() * d_logits;
  for (std::size_t li = lm.layers.size(); li-- > 0;) {
    const auto& l = lm.layers[li];
    const auto& tl = tape.layers[li];
    // MLP backward: x2 = x1 + w2 tanh(w1 x1 + b1) + b2
    const Eigen::MatrixXd dt = l.w2.transpose() * dx;
    const Eigen::MatrixXd du =
        dt.cwiseProduct((1.0 - tl.t.array().square()).matrix());
    Eigen::MatrixXd dx1 = dx + l.w1.transpose() * du;
    // Attention backward: x1 = x_in + wo (v attn)
    const Eigen::MatrixXd d_attn_out = l.wo.transpose() * dx1;
    const Eigen::MatrixXd dv = d_attn_out * tape.layers[li].attn.transpose();
    const Eigen::MatrixXd da = tl.v.transpose() * d_attn_out;  // n x n
    Eigen::MatrixXd ds(da.rows(), da.cols());
    for (Eigen::Index j = 0; j < da.cols(); ++j) {
      const auto a = tl.attn.col(j);
      const double dot = a.dot(da.col(j));
      ds.col(j) = a.cwiseProduct(da.col(j)) - dot * a;
    }
    const Eigen::MatrixXd dq = (tl.k * ds) * scale;
    const Eigen::MatrixXd dk = (tl.q * ds.transpose()) * scale;
    dx = dx1 + l.wq.transpose() * dq + l.wk.transpose() * dk +
         l.wv.transpose() * dv;
  }
  return dx;  // positional encoding is additive: identity backward
}

inline Checkpoint lm_to_checkpoint(const FrozenLm& lm) {
  Checkpoint c;
  c.spec_digest = sha256("toy-lm-v1");
  c.h1 = static_cast<std::uint32_t>(lm.layers.size());
  c.h2 = static_cast<std::uint32_t>(lm.d_ff);
  c.embed_dim = static_cast<std::uint32_t>(lm.embed);
  auto put = [&c](const std::string& name, const Eigen::MatrixXd& m) {
    c.sections.emplace_back(
        name, std::vector<double>(m.data(), m.data() + m.size()));
  };
  c.sections.emplace_back(
      "context", std::vector<double>{static_cast<double>(lm.context)});
  put("emb", lm.emb);
  for (std::size_t i = 0; i < lm.layers.size(); ++i) {
    const std::string p = "l" + std::to_string(i) + ".";
    const auto& l = lm.layers[i];
    put(p + "wq", l.wq);
    put(p + "wk", l.wk);
    put(p + "wv", l.wv);
    put(p + "wo", l.wo);
    put(p + "w1", l.w1);
    put(p + "b1", l.b1);
    put(p + "w2", l.w2);
    put(p + "b2", l.b2);
  }
  return c;
}

inline FrozenLm lm_from_checkpoint(const Checkpoint& c) {
  if (c.spec_digest != sha256("toy-lm-v1"))
    throw FormatError("checkpoint is not a toy language model");
  FrozenLm lm;
  lm.embed = static_cast<int>(c.embed_dim);
  lm.d_ff = static_cast<int>(c.h2);
  lm.layers.resize(c.h1);
  std::size_t at = 0;
  auto next = [&c, &at](const std::string& name, Eigen::Index rows,
                        Eigen::Index cols) {
    if (at >= c.sections.size() || c.sections[at].first != name ||
        c.sections[at].second.size() !=
            static_cast<std::size_t>(rows) * cols)
      throw FormatError("model checkpoint section mismatch at " + name);
    Eigen::MatrixXd m(rows, cols);
    std::copy(c.sections[at].second.begin(), c.sections[at].second.end(),
              m.data());
    ++at;
    return m;
  };
  lm.context = static_cast<int>(next("context", 1, 1)(0, 0));
  lm.emb = next("emb", FrozenLm::kVocab, lm.embed);
  for (std::size_t i = 0; i < lm.layers.size(); ++i) {
    const std::string p = "l" + std::to_string(i) + ".";
    auto& l = lm.layers[i];
    l.wq = next(p + "wq", lm.embed, lm.embed);
    l.wk = next(p + "wk", lm.embed, lm.embed);
    l.wv = next(p + "wv", lm.embed, lm.embed);
    l.wo = next(p + "wo", lm.embed, lm.embed);
    l.w1 = next(p + "w1", lm.d_ff, lm.embed);
    l.b1 = next(p + "b1", lm.d_ff, 1);
    l.w2 = next(p + "w2", lm.embed, lm.d_ff);
    l.b2 = next(p + "b2", lm.embed, 1);
  }
  if (at != c.sections.size())
    throw FormatError("model checkpoint has unexpected extra sections");
  return lm;
}

// Bit-exact parameter fingerprint; the frozen contract asserts it is
// unchanged across any number of fine-tuning steps.
inline std::string lm_digest(const FrozenLm& lm) {
  return to_hex(sha256(serialize_checkpoint(lm_to_checkpoint(lm))));
}

// Whitespace-free byte tokenizer: one token per byte of the text.
inline std::vector<int> byte_tokenize(std::string_view text) {
  std::vector<int> out;
  out.reserve(text.size());
  for (char ch : text) out.push_back(static_cast<std::uint8_t>(ch));
  return out;
}

}  // namespace irgraph
