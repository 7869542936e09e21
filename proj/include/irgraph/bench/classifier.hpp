#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "irgraph/bench/metrics.hpp"
#include "irgraph/gnn/adamw.hpp"
#include "irgraph/gnn/objectives.hpp"
#include "irgraph/rng.hpp"
#include "irgraph/train/config.hpp"

namespace irgraph {

struct ClassifierResult {
  GnnParams params;
  std::string metrics_jsonl;         // one JSON object per epoch
  double final_train_accuracy = 0.0;
};

// Joint training of the message-passing network and a linear class head
// with softmax cross-entropy. Starts from `init` when given (its parameter
// registry must be a prefix of the extended one: same feature spec and
// dims, with or without an existing class head), otherwise from seeded
// initialization. Deterministic given (graphs, labels, cfg).
inline ClassifierResult train_classifier(const std::vector<HeteroGraph>& graphs,
                                         const std::vector<int>& labels,
                                         const TrainConfig& cfg,
                                         const GnnParams* init = nullptr) {
  if (graphs.empty()) throw EmptyInput("classification corpus is empty");
  if (graphs.size() != labels.size())
    throw ShapeMismatch("graph/label count mismatch: " +
                        std::to_string(graphs.size()) + " vs " +
                        std::to_string(labels.size()));
  cfg.validate();
  const std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2)
    throw DegenerateLabels("corpus carries " +
                           std::to_string(distinct.size()) +
                           " distinct label(s), need at least 2");
  const int classes = *distinct.rbegin() + 1;
  if (*distinct.begin() < 0)
    throw FormatError("negative class label");

  GnnParams params =
      GnnParams::init(graphs.front().spec, cfg.dims, cfg.seed, classes);
  if (init) {
    if (init->spec().to_json() != params.spec().to_json())
      throw ShapeMismatch("initial checkpoint was built for a different "
                          "feature layout");
    if (init->dims().h1 != cfg.dims.h1 || init->dims().h2 != cfg.dims.h2 ||
        init->dims().embed != cfg.dims.embed)
      throw ShapeMismatch("initial checkpoint dimensions differ from config");
    if (init->classes() != 0 && init->classes() != classes)
      throw ShapeMismatch("initial checkpoint classifies " +
                          std::to_string(init->classes()) +
                          " classes, corpus has " + std::to_string(classes));
    const auto& src = init->flat();
    std::copy(src.begin(), src.end(), params.flat().begin());
  }

  Rng stream(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  AdamWState state(params.size());
  const AdamWConfig opt = cfg.optimizer();
  std::vector<double> grad(params.size());
  std::vector<std::size_t> order(graphs.size());
  std::iota(order.begin(), order.end(), 0);

  ClassifierResult out{std::move(params), {}, 0.0};
  const int steps_per_epoch = static_cast<int>(
      (graphs.size() + cfg.batch_size - 1) / cfg.batch_size);
  int step = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    stream.shuffle(order);
    double epoch_loss = 0.0;
    for (int b = 0; b < steps_per_epoch; ++b) {
      if (cfg.max_steps > 0 && step >= cfg.max_steps) break;
      const std::size_t begin = static_cast<std::size_t>(b) * cfg.batch_size;
      const std::size_t end = std::min(begin + cfg.batch_size, graphs.size());
      std::fill(grad.begin(), grad.end(), 0.0);
      double loss = 0.0;
      for (std::size_t i = begin; i < end; ++i) {
        const std::size_t gi = order[i];
        loss += classification_loss(graphs[gi], out.params, labels[gi], &grad);
      }
      const double scale = 1.0 / static_cast<double>(end - begin);
      loss *= scale;
      for (double& v : grad) v *= scale;
      adamw_step(out.params.flat(), grad, state, opt);
      ++step;
      epoch_loss += loss;
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < graphs.size(); ++i)
      if (predict_class(graphs[i], out.params) == labels[i]) ++hits;
    out.final_train_accuracy =
        static_cast<double>(hits) / static_cast<double>(graphs.size());
    out.metrics_jsonl +=
        nlohmann::json{{"epoch", epoch},
                       {"loss", epoch_loss / std::max(1, steps_per_epoch)},
                       {"accuracy", out.final_train_accuracy}}
            .dump() +
        "\n";
    if (cfg.max_steps > 0 && step >= cfg.max_steps) break;
  }
  return out;
}

inline std::vector<int> predict_all(const std::vector<HeteroGraph>& graphs,
                                    const GnnParams& params) {
  std::vector<int> preds;
  preds.reserve(graphs.size());
  for (const auto& g : graphs) preds.push_back(predict_class(g, params));
  return preds;
}

// One evaluation row: metric value plus a per-class breakdown.
struct EvalReport {
  std::string variant;  // "full" or an ablation target name
  std::string metric;   // "accuracy", "error-rate", or "pairwise"
  double value = 0.0;
  struct ClassRow {
    int label = 0;
    std::size_t total = 0;
    std::size_t correct = 0;
  };
  std::vector<ClassRow> per_class;

  nlohmann::json to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : per_class)
      rows.push_back({{"label", r.label},
                      {"total", r.total},
                      {"correct", r.correct}});
    return {{"variant", variant},
            {"metric", metric},
            {"value", value},
            {"per_class", rows}};
  }
};

// pair_ids may be empty for the accuracy/error-rate metrics; the pairwise
// metric requires every sample to carry a pair id.
inline EvalReport evaluate_predictions(const std::vector<int>& preds,
                                       const std::vector<int>& labels,
                                       const std::vector<std::string>& pair_ids,
                                       const std::string& metric,
                                       const std::string& variant) {
  EvalReport rep;
  rep.variant = variant;
  rep.metric = metric;
  if (metric == "accuracy") {
    rep.value = accuracy(preds, labels);
  } else if (metric == "error-rate") {
    rep.value = error_rate(preds, labels);
  } else if (metric == "pairwise") {
    rep.value = pairwise_accuracy(preds, labels, pair_ids);
  } else {
    throw FormatError("unknown metric '" + metric +
                      "' (expected accuracy, error-rate, or pairwise)");
  }
  std::map<int, EvalReport::ClassRow> rows;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto& r = rows[labels[i]];
    r.label = labels[i];
    r.total += 1;
    r.correct += preds[i] == labels[i] ? 1 : 0;
  }
  for (auto& [label, row] : rows) rep.per_class.push_back(row);
  return rep;
}

}  // namespace irgraph
