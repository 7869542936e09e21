#pragma once

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "irgraph/lm/prompt.hpp"
#include "irgraph/rng.hpp"
#include "irgraph/store/binary.hpp"
#include "irgraph/train/config.hpp"

namespace irgraph {

// One question/answer record tied to an IR or graph file.
struct QaRecord {
  std::string path;  // relative to the corpus directory
  std::string question;
  std::string answer;
};

// qa.jsonl: one {"file", "question", "answer"} object per line.
inline std::vector<QaRecord> load_qa(const std::filesystem::path& qa_jsonl) {
  const std::string text = store::read_file(qa_jsonl);
  std::vector<QaRecord> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(qa_jsonl.string() + ":" + std::to_string(line_no) +
                        ": " + e.what());
    }
    if (!j.contains("file") || !j.contains("question") ||
        !j.contains("answer"))
      throw FormatError(qa_jsonl.string() + ":" + std::to_string(line_no) +
                        ": record needs 'file', 'question', and 'answer'");
    out.push_back({j.at("file").get<std::string>(),
                   j.at("question").get<std::string>(),
                   j.at("answer").get<std::string>()});
  }
  if (out.empty())
    throw EmptyInput("qa corpus " + qa_jsonl.string() + " lists no samples");
  return out;
}

struct FinetuneResult {
  std::vector<double> params;
  std::string metrics_jsonl;  // one JSON object per optimizer step
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

// Soft-prompt fine-tuning: the decoder stays frozen, only graph-network
// parameters move. Same batching/stream discipline as pretraining, so the
// result is fully determined by (graphs, samples, config).
inline FinetuneResult finetune(const std::vector<HeteroGraph>& graphs,
                               const std::vector<PromptSample>& samples,
                               const std::vector<std::string>& names,
                               const FrozenLm& lm, const TrainConfig& cfg,
                               GnnParams& params,
                               Eigen::Index max_node_rows = 0) {
  if (graphs.empty()) throw EmptyInput("fine-tuning corpus is empty");
  if (graphs.size() != samples.size())
    throw ShapeMismatch("graph/sample count mismatch: " +
                        std::to_string(graphs.size()) + " vs " +
                        std::to_string(samples.size()));
  cfg.validate();
  Rng stream(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  AdamWState state(params.size());
  const AdamWConfig opt = cfg.optimizer();

  FinetuneResult out;
  std::vector<double> grad(params.size());
  std::vector<std::size_t> order(graphs.size());
  std::iota(order.begin(), order.end(), 0);

  const int steps_per_epoch = static_cast<int>(
      (graphs.size() + cfg.batch_size - 1) / cfg.batch_size);
  const int total_steps =
      cfg.max_steps > 0 ? cfg.max_steps : cfg.epochs * steps_per_epoch;
  int step = 0;
  while (step < total_steps) {
    stream.shuffle(order);
    for (int b = 0; b < steps_per_epoch && step < total_steps; ++b) {
      const std::size_t begin = static_cast<std::size_t>(b) * cfg.batch_size;
      const std::size_t end = std::min(begin + cfg.batch_size, graphs.size());
      std::fill(grad.begin(), grad.end(), 0.0);
      double loss = 0.0;
      for (std::size_t i = begin; i < end; ++i) {
        const std::size_t gi = order[i];
        try {
          loss += soft_prompt_loss(graphs[gi], params, lm, samples[gi], &grad,
                                   max_node_rows);
        } catch (const NonFiniteLoss& e) {
          throw NonFiniteLoss(std::string(e.what()) + " on sample " +
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
      out.metrics_jsonl +=
          nlohmann::json{{"step", step}, {"loss", loss}}.dump() + "\n";
    }
  }
  out.params = params.flat();
  return out;
}

}  // namespace irgraph
