#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "irgraph/errors.hpp"
#include "irgraph/gnn/adamw.hpp"
#include "irgraph/gnn/forward.hpp"
#include "irgraph/gnn/objectives.hpp"
#include "irgraph/lm/toy_lm.hpp"
#include "irgraph/store/binary.hpp"

namespace irgraph {

struct PromptSegments {
  Eigen::Index bos = 0;
  Eigen::Index graph = 1;
  Eigen::Index node_begin = 2;
  Eigen::Index node_count = 0;
  Eigen::Index token_begin = 0;
  Eigen::Index token_count = 0;
  Eigen::Index eos = 0;
};

struct PromptSequence {
  Eigen::MatrixXd rows;  // embed x (node_count + token_count + 3)
  PromptSegments seg;
  bool truncated = false;  // node rows dropped by the cap
};

// Rows in fixed order: BOS, graph embedding, projected node embeddings in
// canonical node order, token embeddings, EOS. `max_node_rows` of 0 means
// unlimited; a positive cap drops node rows in reverse canonical order.
inline PromptSequence assemble_prompt(const Eigen::VectorXd& graph_emb,
                                      const Eigen::MatrixXd& node_rows,
                                      const std::vector<int>& token_ids,
                                      const FrozenLm& lm,
                                      Eigen::Index max_node_rows = 0) {
  if (graph_emb.size() != lm.embed)
    throw DimensionMismatch("graph embedding width " +
                            std::to_string(graph_emb.size()) +
                            " does not match model width " +
                            std::to_string(lm.embed));
  if (node_rows.cols() > 0 && node_rows.rows() != lm.embed)
    throw DimensionMismatch("node row width does not match model width");
  for (int id : token_ids)
    if (id < 0 || id >= FrozenLm::kVocab)
      throw DimensionMismatch("token id " + std::to_string(id) +
                              " outside vocabulary");
  PromptSequence p;
  Eigen::Index nv = node_rows.cols();
  if (max_node_rows > 0 && nv > max_node_rows) {
    nv = max_node_rows;
    p.truncated = true;
  }
  const Eigen::Index nt = static_cast<Eigen::Index>(token_ids.size());
  const Eigen::Index total = nv + nt + 3;
  if (total > lm.context)
    throw ContextOverflow("prompt of " + std::to_string(total) +
                          " rows exceeds context " +
                          std::to_string(lm.context));
  p.rows.resize(lm.embed, total);
  p.rows.col(0) = lm.emb.row(FrozenLm::kBos).transpose();
  p.rows.col(1) = graph_emb;
  if (nv > 0) p.rows.middleCols(2, nv) = node_rows.leftCols(nv);
  for (Eigen::Index i = 0; i < nt; ++i)
    p.rows.col(2 + nv + i) = lm.emb.row(token_ids[i]).transpose();
  p.rows.col(total - 1) = lm.emb.row(FrozenLm::kEos).transpose();
  p.seg.node_count = nv;
  p.seg.token_begin = 2 + nv;
  p.seg.token_count = nt;
  p.seg.eos = total - 1;
  return p;
}

// One fine-tuning example: question tokens condition, answer tokens (and
// the closing EOS) are supervised next-token targets.
struct PromptSample {
  std::vector<int> question;
  std::vector<int> answer;
};

// Next-token cross-entropy over the answer and EOS positions. Gradients
// flow through the frozen model into the graph/node rows and from there
// into the graph-network parameters (accumulated into `grad`).
inline double soft_prompt_loss(const HeteroGraph& g, const GnnParams& p,
                               const FrozenLm& lm, const PromptSample& sample,
                               std::vector<double>* grad = nullptr,
                               Eigen::Index max_node_rows = 0) {
  if (sample.answer.empty())
    throw EmptyInput("fine-tuning sample has no target tokens");
  ForwardTape tape = gnn_forward(g, p);
  const Eigen::MatrixXd node_rows = projected_node_rows(p, tape);
  std::vector<int> tokens = sample.question;
  tokens.insert(tokens.end(), sample.answer.begin(), sample.answer.end());
  PromptSequence prompt =
      assemble_prompt(tape.graph_emb, node_rows, tokens, lm, max_node_rows);

  LmTape lm_tape;
  const Eigen::MatrixXd logits = lm_forward(prompt.rows, lm, &lm_tape);

  // Position c is supervised when position c+1 holds an answer token or EOS.
  const Eigen::Index tb = prompt.seg.token_begin;
  const Eigen::Index m = static_cast<Eigen::Index>(sample.question.size());
  std::vector<std::pair<Eigen::Index, int>> targets;
  for (std::size_t i = 0; i < sample.answer.size(); ++i)
    targets.emplace_back(tb + m + static_cast<Eigen::Index>(i) - 1,
                         sample.answer[i]);
  targets.emplace_back(prompt.seg.eos - 1, FrozenLm::kEos);

  double loss = 0.0;
  Eigen::MatrixXd d_logits;
  if (grad) d_logits = Eigen::MatrixXd::Zero(logits.rows(), logits.cols());
  const double inv = 1.0 / static_cast<double>(targets.size());
  for (const auto& [col, tok] : targets) {
    Eigen::VectorXd dz;
    loss += detail::softmax_xent(logits.col(col), tok, grad ? &dz : nullptr);
    if (grad) d_logits.col(col) = dz * inv;
  }
  loss *= inv;
  detail::check_finite(loss, "soft-prompt");
  if (grad) {
    const Eigen::MatrixXd d_rows = lm_backward_inputs(lm, lm_tape, d_logits);
    const Eigen::VectorXd d_graph = d_rows.col(1);
    Eigen::MatrixXd d_nodes =
        Eigen::MatrixXd::Zero(p.dims().embed, tape.total_nodes);
    if (prompt.seg.node_count > 0)
      d_nodes.leftCols(prompt.seg.node_count) =
          d_rows.middleCols(2, prompt.seg.node_count);
    std::array<Eigen::MatrixXd, kNodeKindCount> no_da2{};
    gnn_backward(g, p, tape, d_graph, d_nodes, no_da2, nullptr, *grad);
  }
  return loss;
}

// One optimizer step on the graph-network parameters; the model is frozen.
inline double finetune_step(GnnParams& p, const FrozenLm& lm,
                            const HeteroGraph& g, const PromptSample& sample,
                            AdamWState& state, const AdamWConfig& cfg,
                            Eigen::Index max_node_rows = 0) {
  std::vector<double> grad(p.size(), 0.0);
  const double loss = soft_prompt_loss(g, p, lm, sample, &grad, max_node_rows);
  adamw_step(p.flat(), grad, state, cfg);
  return loss;
}

// Binary prefix export: u32 row count, u32 width, then row-major
// little-endian f32 rows — the graph embedding followed by the projected
// node embeddings in canonical order.
inline std::string serialize_prompt_prefix(const Eigen::VectorXd& graph_emb,
                                           const Eigen::MatrixXd& node_rows) {
  store::Writer w;
  w.u32(static_cast<std::uint32_t>(1 + node_rows.cols()));
  w.u32(static_cast<std::uint32_t>(graph_emb.size()));
  for (Eigen::Index i = 0; i < graph_emb.size(); ++i)
    w.f32(static_cast<float>(graph_emb(i)));
  for (Eigen::Index c = 0; c < node_rows.cols(); ++c)
    for (Eigen::Index i = 0; i < node_rows.rows(); ++i)
      w.f32(static_cast<float>(node_rows(i, c)));
  return w.buffer();
}

inline void export_prompt_prefix(const HeteroGraph& g, const GnnParams& p,
                                 const std::filesystem::path& path) {
  ForwardTape tape = gnn_forward(g, p);
  store::write_file_atomic(
      path, serialize_prompt_prefix(tape.graph_emb,
                                    projected_node_rows(p, tape)));
}

}  // namespace irgraph
