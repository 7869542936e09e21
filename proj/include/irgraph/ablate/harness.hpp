#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "irgraph/ablate/ablate.hpp"
#include "irgraph/bench/classifier.hpp"
#include "irgraph/bench/corpus.hpp"

namespace irgraph {

struct AblationRow {
  std::string variant;  // "full" or target name
  double value = 0.0;
  double delta_vs_full = 0.0;
  std::vector<std::string> bidirectionalized;
  std::vector<std::string> feature_only;
};

struct AblationReport {
  std::string task;
  std::string metric;
  std::uint64_t seed = 0;
  double holdout_fraction = 0.0;
  std::vector<AblationRow> rows;  // full baseline first, then 13 targets

  nlohmann::json to_json() const {
    nlohmann::json out;
    out["task"] = task;
    out["metric"] = metric;
    out["seed"] = seed;
    out["holdout_fraction"] = holdout_fraction;
    out["rows"] = nlohmann::json::array();
    for (const auto& r : rows)
      out["rows"].push_back({{"variant", r.variant},
                             {"value", r.value},
                             {"delta_vs_full", r.delta_vs_full},
                             {"bidirectionalized", r.bidirectionalized},
                             {"feature_only", r.feature_only}});
    return out;
  }
};

// Schema-reduction study: trains one classifier from scratch per variant —
// the untouched graphs first, then each of the 13 reduction targets — with
// identical seed and config, and reports the held-out metric plus its delta
// against the full baseline. 14 rows total.
inline AblationReport run_ablation(const LabeledCorpus& corpus,
                                   const std::vector<HeteroGraph>& graphs,
                                   const TrainConfig& cfg,
                                   double holdout_fraction,
                                   const std::string& task,
                                   const std::string& metric = "accuracy") {
  if (graphs.size() != corpus.items.size())
    throw ShapeMismatch("corpus lists " + std::to_string(corpus.items.size()) +
                        " items but " + std::to_string(graphs.size()) +
                        " graphs were supplied");
  const auto [train_idx, eval_idx] =
      split_corpus(corpus, holdout_fraction, cfg.seed);

  AblationReport report;
  report.task = task;
  report.metric = metric;
  report.seed = cfg.seed;
  report.holdout_fraction = holdout_fraction;

  auto run_variant = [&](const std::vector<HeteroGraph>& gs,
                         const std::string& variant) {
    std::vector<HeteroGraph> train_graphs;
    std::vector<int> train_labels;
    for (std::size_t i : train_idx) {
      train_graphs.push_back(gs[i]);
      train_labels.push_back(corpus.items[i].label);
    }
    ClassifierResult r = train_classifier(train_graphs, train_labels, cfg);
    std::vector<HeteroGraph> eval_graphs;
    std::vector<int> eval_labels;
    std::vector<std::string> eval_pairs;
    for (std::size_t i : eval_idx) {
      eval_graphs.push_back(gs[i]);
      eval_labels.push_back(corpus.items[i].label);
      eval_pairs.push_back(corpus.items[i].pair_id);
    }
    const std::vector<int> preds = predict_all(eval_graphs, r.params);
    return evaluate_predictions(preds, eval_labels, eval_pairs, metric,
                                variant)
        .value;
  };

  AblationRow full;
  full.variant = "full";
  full.value = run_variant(graphs, "full");
  report.rows.push_back(full);

  for (const AblationTarget& target : all_ablation_targets()) {
    const AblationSpec spec = plan_ablation(target);
    std::vector<HeteroGraph> reduced;
    reduced.reserve(graphs.size());
    for (const auto& g : graphs) reduced.push_back(ablate(g, spec));
    AblationRow row;
    row.variant = target.name();
    row.value = run_variant(reduced, row.variant);
    row.delta_vs_full = row.value - full.value;
    for (EdgeKind e : spec.bidirectionalize)
      row.bidirectionalized.emplace_back(edge_kind_name(e));
    for (NodeKind k : spec.feature_only)
      row.feature_only.emplace_back(node_kind_name(k));
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace irgraph
