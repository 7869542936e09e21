#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "irgraph/gnn/adamw.hpp"
#include "irgraph/gnn/objectives.hpp"
#include "irgraph/graph/hetero_graph.hpp"
#include "irgraph/rng.hpp"
#include "irgraph/sha256.hpp"
#include "irgraph/store/graph_io.hpp"
#include "irgraph/train/config.hpp"

namespace irgraph {

// Picks one node kind uniformly among the maskable kinds present in the
// graph and masks max(1, round(rate * count)) of its nodes, sampled without
// replacement (ids sorted ascending).
inline MaskSpec sample_mask(const HeteroGraph& g, double rate, Rng& rng) {
  std::vector<NodeKind> eligible;
  for (NodeKind k : maskable_kinds())
    if (g.node_count(k) > 0) eligible.push_back(k);
  if (eligible.empty())
    throw EmptyGraph("no maskable nodes in graph");
  MaskSpec plan;
  plan.kind = eligible[rng.below(eligible.size())];
  const auto count = static_cast<std::uint32_t>(g.node_count(plan.kind));
  const auto m = static_cast<std::uint32_t>(
      std::max<long long>(1, std::llround(rate * count)));
  plan.ids = rng.sample(count, std::min(m, count));
  return plan;
}

struct PretrainResult {
  std::vector<double> params;     // final parameter vector
  std::string metrics_jsonl;      // one JSON object per optimizer step
  std::string corpus_digest;      // hash over the serialized input graphs
  double initial_loss = 0.0;      // loss at step 1
  double final_loss = 0.0;        // loss at the last step
};

inline std::string corpus_digest(const std::vector<HeteroGraph>& graphs) {
  Sha256 h;
  for (const auto& g : graphs) {
    const Digest d = sha256(serialize_graph(g));
    h.update(d.data(), d.size());
  }
  return to_hex(h.finish());
}

// Masked-node pretraining: per optimizer step, every graph in the batch
// gets a fresh mask plan; gradients are averaged over the batch. Fully
// deterministic given (graphs, config): the parameter stream is seeded by
// cfg.seed, the masking/shuffle stream by a fixed derivation of it.
inline PretrainResult pretrain(const std::vector<HeteroGraph>& graphs,
                               const std::vector<std::string>& names,
                               const TrainConfig& cfg, GnnParams& params) {
  if (graphs.empty()) throw EmptyInput("pretraining corpus is empty");
  cfg.validate();
  Rng stream(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  AdamWState state(params.size());
  const AdamWConfig opt = cfg.optimizer();

  PretrainResult out;
  out.corpus_digest = corpus_digest(graphs);
  std::string log;
  std::vector<double> grad(params.size());
  std::vector<std::size_t> order(graphs.size());
  std::iota(order.begin(), order.end(), 0);

  const int steps_per_epoch = static_cast<int>(
      (graphs.size() + cfg.batch_size - 1) / cfg.batch_size);
  const int total_steps = cfg.max_steps > 0
                              ? cfg.max_steps
                              : cfg.epochs * steps_per_epoch;
  int step = 0;
  while (step < total_steps) {
    stream.shuffle(order);
    for (int b = 0; b < steps_per_epoch && step < total_steps; ++b) {
      const std::size_t begin = static_cast<std::size_t>(b) * cfg.batch_size;
      const std::size_t end =
          std::min(begin + cfg.batch_size, graphs.size());
      std::fill(grad.begin(), grad.end(), 0.0);
      double loss = 0.0;
      nlohmann::json kinds = nlohmann::json::array();
      for (std::size_t i = begin; i < end; ++i) {
        const std::size_t gi = order[i];
        const MaskSpec plan = sample_mask(graphs[gi], cfg.mask_rate, stream);
        kinds.push_back(node_kind_name(plan.kind));
        try {
          loss += masked_loss(graphs[gi], params, plan, &grad);
        } catch (const NonFiniteLoss& e) {
          throw NonFiniteLoss(std::string(e.what()) + " on graph " +
                              (gi < names.size() ? names[gi]
                                                 : std::to_string(gi)));
        }
      }
      const double scale = 1.0 / static_cast<double>(end - begin);
      loss *= scale;
      for (double& v : grad) v *= scale;
      adamw_step(params.flat(), grad, state, opt);
      ++step;
      if (step == 1) out.initial_loss = loss;
      out.final_loss = loss;
      log += nlohmann::json{{"step", step},
                            {"loss", loss},
                            {"masked_kind", kinds}}
                 .dump() +
             "\n";
    }
  }
  out.params = params.flat();
  out.metrics_jsonl = std::move(log);
  return out;
}

}  // namespace irgraph
