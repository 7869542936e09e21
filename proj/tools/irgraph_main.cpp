// irgraph: command-line front end over the header-only library.
//
// Exit codes: 0 success, 1 internal error, 2 usage/input error,
// 3 unsupported IR construct. Every subcommand supports --json for
// machine-readable output on stdout; errors go to stderr with the
// library's stable error code tags.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "irgraph/ablate/harness.hpp"
#include "irgraph/bench/classifier.hpp"
#include "irgraph/bench/corpus.hpp"
#include "irgraph/graph/digest.hpp"
#include "irgraph/graph/validate.hpp"
#include "irgraph/ir/printer.hpp"
#include "irgraph/lm/prompt.hpp"
#include "irgraph/store/checkpoint_io.hpp"
#include "irgraph/train/finetune.hpp"
#include "irgraph/train/masked.hpp"

namespace fs = std::filesystem;
using namespace irgraph;

namespace {

int exit_code_for(const Error& e) {
  const std::string& c = e.code();
  if (c == "unsupported-construct") return 3;
  if (c == "syntax-error" || c == "unresolved-reference" || c == "io-error" ||
      c == "format-error" || c == "empty-input" || c == "unpaired-sample" ||
      c == "degenerate-labels" || c == "cannot-ablate-module")
    return 2;
  return 1;
}

FeatureSpec load_spec(const std::string& path) {
  if (path.empty()) return FeatureSpec::standard();
  return FeatureSpec::from_json(nlohmann::json::parse(store::read_file(path)));
}

HeteroGraph load_any_graph(const std::string& path, const FeatureSpec& spec,
                           bool lenient) {
  const fs::path p(path);
  if (p.extension() == ".irg") return load_graph(p);
  ParseOptions popts;
  popts.lenient = lenient;
  const std::string text = store::read_file(p);
  BuildOptions bopts;
  bopts.lenient = lenient;
  bopts.source_name = p.filename().string();
  bopts.source_digest = sha256(text);
  return build_graph(parse_module_ex(text, bopts.source_name, popts).module,
                     spec, bopts);
}

// Training-command config: JSON file plus CLI overrides. An explicit seed
// (flag or config key) is mandatory for anything that trains.
struct TrainArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  int epochs = -1;
  int batch = -1;
  int steps = -1;
  double lr = -1.0;
  double mask_rate = -1.0;
  double weight_decay = -1.0;
  int h1 = -1, h2 = -1, embed = -1;
  bool seed_set = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path,
                    "training config JSON (flags override it)");
    cmd->add_option("--seed", seed, "training seed (required)")
        ->each([this](const std::string&) { seed_set = true; });
    cmd->add_option("--epochs", epochs, "override: epochs");
    cmd->add_option("--batch", batch, "override: batch size");
    cmd->add_option("--steps", steps, "override: exact optimizer step count");
    cmd->add_option("--lr", lr, "override: learning rate");
    cmd->add_option("--mask-rate", mask_rate, "override: mask rate");
    cmd->add_option("--weight-decay", weight_decay, "override: weight decay");
    cmd->add_option("--h1", h1, "override: first hidden width");
    cmd->add_option("--h2", h2, "override: second hidden width");
    cmd->add_option("--embed", embed, "override: embedding dimension");
  }

  TrainConfig resolve() const {
    TrainConfig cfg;
    bool have_seed = false;
    if (!config_path.empty()) {
      const nlohmann::json j =
          nlohmann::json::parse(store::read_file(config_path));
      cfg = TrainConfig::from_json(j);
      have_seed = j.contains("seed");
    }
    if (seed_set) {
      cfg.seed = seed;
      have_seed = true;
    }
    if (!have_seed)
      throw FormatError(
          "training requires an explicit seed (--seed or a 'seed' key in "
          "--config)");
    if (epochs >= 0) cfg.epochs = epochs;
    if (batch >= 0) cfg.batch_size = batch;
    if (steps >= 0) cfg.max_steps = steps;
    if (lr >= 0) cfg.learning_rate = lr;
    if (mask_rate >= 0) cfg.mask_rate = mask_rate;
    if (weight_decay >= 0) cfg.weight_decay = weight_decay;
    if (h1 > 0) cfg.dims.h1 = h1;
    if (h2 > 0) cfg.dims.h2 = h2;
    if (embed > 0) cfg.dims.embed = embed;
    cfg.validate();
    return cfg;
  }
};

// Deterministic corpus-directory listing: every .ll/.irg file, sorted by
// file name.
std::vector<fs::path> list_corpus_dir(const std::string& dir) {
  if (!fs::is_directory(dir))
    throw IoError("corpus directory not found: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension();
    if (ext == ".ll" || ext == ".irg") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) {
              return a.filename().string() < b.filename().string();
            });
  if (files.empty()) throw EmptyInput("no .ll or .irg files in " + dir);
  return files;
}

// Manifest path: accept either the manifest file itself or a directory
// holding manifest.jsonl.
fs::path resolve_manifest(const std::string& path) {
  if (fs::is_directory(path)) return fs::path(path) / "manifest.jsonl";
  return path;
}

nlohmann::json census_json(const HeteroGraph& g) {
  nlohmann::json nodes, edges;
  for (int k = 0; k < kNodeKindCount; ++k)
    nodes[node_kind_name(static_cast<NodeKind>(k))] =
        g.node_count(static_cast<NodeKind>(k));
  for (int e = 0; e < kEdgeKindCount; ++e)
    edges[edge_kind_name(static_cast<EdgeKind>(e))] =
        g.edge_count(static_cast<EdgeKind>(e));
  return {{"nodes", nodes}, {"edges", edges}};
}

void emit(const nlohmann::json& j, bool json_mode,
          const std::string& human) {
  if (json_mode)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << human;
}

// ---- subcommand bodies ----------------------------------------------------

struct ParseOpts {
  std::string file;
  bool lenient = false;
  bool json = false;
  bool print = false;
};

void cmd_parse(const ParseOpts& o) {
  ParseOptions popts;
  popts.lenient = o.lenient;
  const std::string text = store::read_file(o.file);
  const ParseResult r =
      parse_module_ex(text, fs::path(o.file).filename().string(), popts);
  nlohmann::json flags = nlohmann::json::array();
  std::string human = "ok: " + std::to_string(r.module.functions.size()) +
                      " function(s), " +
                      std::to_string(r.module.instruction_count()) +
                      " instruction(s), " +
                      std::to_string(r.module.globals.size()) + " global(s)\n";
  for (const auto& f : r.flags) {
    flags.push_back({{"construct", f.construct}, {"line", f.line}});
    human += "  skipped unsupported '" + f.construct + "' at line " +
             std::to_string(f.line) + "\n";
  }
  if (o.print) human = print_module(r.module);
  emit({{"ok", true},
        {"functions", r.module.functions.size()},
        {"instructions", r.module.instruction_count()},
        {"globals", r.module.globals.size()},
        {"flags", flags}},
       o.json, human);
}

struct GraphOpts {
  std::string file;
  std::string out;
  std::string spec_path;
  bool lenient = false;
  bool json = false;
};

void cmd_graph(const GraphOpts& o) {
  const FeatureSpec spec = load_spec(o.spec_path);
  const HeteroGraph g = load_any_graph(o.file, spec, o.lenient);
  const ValidationReport report = validate_graph(g);
  if (!report.ok()) {
    std::string msg = "graph failed validation:";
    for (const auto& v : report.violations) msg += "\n  " + v;
    throw InternalInconsistency(msg);
  }
  if (!o.out.empty()) save_graph(g, o.out);
  nlohmann::json j = census_json(g);
  j["digest"] = canonical_digest(g);
  j["source"] = g.source_name;
  if (!o.out.empty()) j["output"] = o.out;
  std::string human = "graph: " + std::to_string(g.total_node_count()) +
                      " nodes, " + std::to_string(g.edge_count()) +
                      " directed edges (both directions)\n" +
                      "digest: " + j["digest"].get<std::string>() + "\n";
  if (!o.out.empty()) human += "wrote " + o.out + "\n";
  emit(j, o.json, human);
}

struct EmbedOpts {
  std::string file;
  std::string params_path;
  std::string spec_path;
  bool nodes = false;
  bool lenient = false;
  bool json = false;
};

void cmd_embed(const EmbedOpts& o) {
  const FeatureSpec spec = load_spec(o.spec_path);
  const HeteroGraph g = load_any_graph(o.file, spec, o.lenient);
  const GnnParams p =
      GnnParams::from_checkpoint(load_checkpoint(o.params_path), g.spec);
  const ForwardTape tape = gnn_forward(g, p);
  nlohmann::json j;
  j["embedding"] = std::vector<double>(
      tape.graph_emb.data(), tape.graph_emb.data() + tape.graph_emb.size());
  if (o.nodes) {
    const Eigen::MatrixXd rows = projected_node_rows(p, tape);
    nlohmann::json nodes = nlohmann::json::array();
    for (Eigen::Index c = 0; c < rows.cols(); ++c)
      nodes.push_back(std::vector<double>(rows.col(c).data(),
                                          rows.col(c).data() + rows.rows()));
    j["node_embeddings"] = nodes;
  }
  // The embedding itself is the payload: print JSON in both modes.
  std::cout << j.dump(2) << "\n";
}

struct PretrainOpts {
  TrainArgs train;
  std::string corpus;
  std::string out;
  std::string metrics;
  std::string spec_path;
  bool lenient = false;
  bool json = false;
};

void cmd_pretrain(const PretrainOpts& o) {
  const TrainConfig cfg = o.train.resolve();
  const FeatureSpec spec = load_spec(o.spec_path);
  const std::vector<fs::path> files = list_corpus_dir(o.corpus);
  std::vector<HeteroGraph> graphs(files.size());
  std::vector<std::string> names(files.size());
  parallel_for(files.size(), [&](std::size_t i) {
    names[i] = files[i].filename().string();
    graphs[i] = load_any_graph(files[i].string(), spec, o.lenient);
  });
  GnnParams params = GnnParams::init(spec, cfg.dims, cfg.seed);
  const PretrainResult r = pretrain(graphs, names, cfg, params);
  save_checkpoint(params.to_checkpoint(), o.out);
  if (!o.metrics.empty()) store::write_file_atomic(o.metrics, r.metrics_jsonl);
  nlohmann::json j{{"checkpoint", o.out},
                   {"graphs", graphs.size()},
                   {"corpus_digest", r.corpus_digest},
                   {"initial_loss", r.initial_loss},
                   {"final_loss", r.final_loss},
                   {"config", cfg.to_json()}};
  emit(j, o.json,
       "pretrained on " + std::to_string(graphs.size()) + " graph(s): loss " +
           std::to_string(r.initial_loss) + " -> " +
           std::to_string(r.final_loss) + "\nwrote " + o.out + "\n");
}

struct FinetuneOpts {
  TrainArgs train;
  std::string corpus;
  std::string lm_path;
  std::string gnn_path;
  std::string out;
  std::string metrics;
  std::string spec_path;
  int max_node_rows = 0;
  bool lenient = false;
  bool json = false;
};

void cmd_finetune(const FinetuneOpts& o) {
  TrainConfig cfg = o.train.resolve();
  const FeatureSpec spec = load_spec(o.spec_path);
  const FrozenLm lm = lm_from_checkpoint(load_checkpoint(o.lm_path));
  GnnParams params =
      GnnParams::from_checkpoint(load_checkpoint(o.gnn_path), spec);
  if (params.dims().embed != lm.embed)
    throw DimensionMismatch(
        "graph checkpoint embeds at dimension " +
        std::to_string(params.dims().embed) + " but the decoder expects " +
        std::to_string(lm.embed));
  cfg.dims = params.dims();

  const std::vector<QaRecord> qa =
      load_qa(fs::path(o.corpus) / "qa.jsonl");
  std::vector<HeteroGraph> graphs(qa.size());
  std::vector<PromptSample> samples(qa.size());
  std::vector<std::string> names(qa.size());
  parallel_for(qa.size(), [&](std::size_t i) {
    names[i] = qa[i].path;
    graphs[i] = load_any_graph((fs::path(o.corpus) / qa[i].path).string(),
                               spec, o.lenient);
    samples[i] = {byte_tokenize(qa[i].question), byte_tokenize(qa[i].answer)};
  });
  const std::string digest_before = lm_digest(lm);
  const FinetuneResult r =
      finetune(graphs, samples, names, lm, cfg, params, o.max_node_rows);
  if (lm_digest(lm) != digest_before)
    throw InternalInconsistency("frozen decoder changed during fine-tuning");
  save_checkpoint(params.to_checkpoint(), o.out);
  if (!o.metrics.empty()) store::write_file_atomic(o.metrics, r.metrics_jsonl);
  nlohmann::json j{{"checkpoint", o.out},
                   {"samples", qa.size()},
                   {"initial_loss", r.initial_loss},
                   {"final_loss", r.final_loss},
                   {"lm_digest", digest_before},
                   {"config", cfg.to_json()}};
  emit(j, o.json,
       "fine-tuned on " + std::to_string(qa.size()) + " sample(s): loss " +
           std::to_string(r.initial_loss) + " -> " +
           std::to_string(r.final_loss) + "\nwrote " + o.out + "\n");
}

struct PromptExportOpts {
  std::string file;
  std::string gnn_path;
  std::string out;
  std::string spec_path;
  bool lenient = false;
  bool json = false;
};

void cmd_prompt_export(const PromptExportOpts& o) {
  const FeatureSpec spec = load_spec(o.spec_path);
  const HeteroGraph g = load_any_graph(o.file, spec, o.lenient);
  const GnnParams p =
      GnnParams::from_checkpoint(load_checkpoint(o.gnn_path), g.spec);
  export_prompt_prefix(g, p, o.out);
  const auto rows = 1 + g.total_node_count();
  emit({{"output", o.out},
        {"rows", rows},
        {"width", p.dims().embed}},
       o.json,
       "wrote " + o.out + ": " + std::to_string(rows) + " rows x " +
           std::to_string(p.dims().embed) + " floats\n");
}

struct AblateOpts {
  TrainArgs train;
  std::string corpus;
  std::string task = "cfg-loop";
  std::string metric = "accuracy";
  std::string out;
  std::string spec_path;
  double holdout = 0.3;
  bool json = false;
};

void cmd_ablate(const AblateOpts& o) {
  const TrainConfig cfg = o.train.resolve();
  const FeatureSpec spec = load_spec(o.spec_path);
  const LabeledCorpus corpus = load_labeled_corpus(resolve_manifest(o.corpus));
  const std::vector<HeteroGraph> graphs = load_corpus_graphs(corpus, spec);
  const AblationReport report =
      run_ablation(corpus, graphs, cfg, o.holdout, o.task, o.metric);
  nlohmann::json j = report.to_json();
  j["config"] = cfg.to_json();
  if (!o.out.empty()) store::write_file_atomic(o.out, j.dump(2) + "\n");
  std::string human;
  for (const auto& row : report.rows) {
    char line[160];
    std::snprintf(line, sizeof line, "%-18s %s %.4f  delta %+.4f\n",
                  row.variant.c_str(), o.metric.c_str(), row.value,
                  row.delta_vs_full);
    human += line;
  }
  if (!o.out.empty()) human += "wrote " + o.out + "\n";
  emit(j, o.json, human);
}

struct EvalOpts {
  TrainArgs train;
  std::string corpus;
  std::string gnn_path;
  std::string metric = "accuracy";
  std::string out;
  std::string spec_path;
  double holdout = 0.3;
  bool do_train = false;
  bool json = false;
};

void cmd_eval(const EvalOpts& o) {
  const FeatureSpec spec = load_spec(o.spec_path);
  const LabeledCorpus corpus = load_labeled_corpus(resolve_manifest(o.corpus));
  const std::vector<HeteroGraph> graphs = load_corpus_graphs(corpus, spec);

  nlohmann::json j;
  EvalReport report;
  std::size_t n_eval = corpus.items.size();
  if (o.do_train) {
    // Train on the pair-aware holdout split, evaluate on the held-out side.
    const TrainConfig cfg = o.train.resolve();
    const auto [train_idx, eval_idx] =
        split_corpus(corpus, o.holdout, cfg.seed);
    std::vector<HeteroGraph> tg;
    std::vector<int> tl;
    for (std::size_t i : train_idx) {
      tg.push_back(graphs[i]);
      tl.push_back(corpus.items[i].label);
    }
    GnnParams base = GnnParams::init(spec, cfg.dims, cfg.seed);
    const GnnParams* init = nullptr;
    GnnParams loaded = std::move(base);
    if (!o.gnn_path.empty()) {
      loaded = GnnParams::from_checkpoint(load_checkpoint(o.gnn_path), spec);
      init = &loaded;
    }
    const ClassifierResult r = train_classifier(tg, tl, cfg, init);
    std::vector<HeteroGraph> eg;
    std::vector<int> el;
    std::vector<std::string> ep;
    for (std::size_t i : eval_idx) {
      eg.push_back(graphs[i]);
      el.push_back(corpus.items[i].label);
      ep.push_back(corpus.items[i].pair_id);
    }
    report = evaluate_predictions(predict_all(eg, r.params), el, ep, o.metric,
                                  "heldout");
    n_eval = eval_idx.size();
    if (!o.out.empty()) save_checkpoint(r.params.to_checkpoint(), o.out);
    j = report.to_json();
    j["train_accuracy"] = r.final_train_accuracy;
    j["train_size"] = train_idx.size();
    j["eval_size"] = eval_idx.size();
    j["config"] = cfg.to_json();
    if (!o.out.empty()) j["checkpoint"] = o.out;
  } else {
    if (o.gnn_path.empty())
      throw FormatError("eval needs --gnn (a classifier checkpoint) unless "
                        "--train is given");
    const GnnParams p =
        GnnParams::from_checkpoint(load_checkpoint(o.gnn_path), spec);
    if (p.classes() < 2)
      throw FormatError("checkpoint " + o.gnn_path +
                        " carries no classification head");
    std::vector<int> labels;
    std::vector<std::string> pairs;
    for (const auto& item : corpus.items) {
      labels.push_back(item.label);
      pairs.push_back(item.pair_id);
    }
    report = evaluate_predictions(predict_all(graphs, p), labels, pairs,
                                  o.metric, "full");
    j = report.to_json();
  }
  char line[96];
  std::snprintf(line, sizeof line, "%s %s = %.4f over %zu item(s)\n",
                report.variant.c_str(), report.metric.c_str(), report.value,
                n_eval);
  emit(j, o.json, line);
}

struct MakeCorpusOpts {
  std::string task = "cfg-loop";
  int n = 100;
  std::uint64_t seed = 0;
  std::string out;
  bool json = false;
};

void cmd_make_corpus(const MakeCorpusOpts& o) {
  const LabeledCorpus c =
      make_toy_corpus(toy_task_from_name(o.task), o.n, o.seed, o.out);
  int positive = 0;
  for (const auto& item : c.items) positive += item.label == 1 ? 1 : 0;
  emit({{"manifest", (fs::path(o.out) / "manifest.jsonl").string()},
        {"items", c.items.size()},
        {"positive", positive},
        {"task", o.task},
        {"seed", o.seed}},
       o.json,
       "wrote " + std::to_string(c.items.size()) + " file(s) under " + o.out +
           " (" + std::to_string(positive) + " positive)\n");
}

struct InitLmOpts {
  std::string out;
  int embed = 64;
  int context = 1024;
  std::uint64_t seed = 1;
  bool json = false;
};

void cmd_init_lm(const InitLmOpts& o) {
  const FrozenLm lm = init_lm(o.embed, o.seed, o.context);
  save_checkpoint(lm_to_checkpoint(lm), o.out);
  emit({{"checkpoint", o.out},
        {"embed", o.embed},
        {"context", o.context},
        {"seed", o.seed},
        {"digest", lm_digest(lm)}},
       o.json,
       "wrote frozen decoder stub " + o.out + " (embed " +
           std::to_string(o.embed) + ")\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heterogeneous program-graph toolkit for LLVM IR"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "irgraph 1.0");

  auto parse_opts = std::make_shared<ParseOpts>();
  auto* parse_cmd = app.add_subcommand("parse", "parse an IR file");
  parse_cmd->add_option("file", parse_opts->file, "IR file")->required();
  parse_cmd->add_flag("--lenient", parse_opts->lenient,
                      "skip unsupported constructs instead of failing");
  parse_cmd->add_flag("--json", parse_opts->json, "JSON output");
  parse_cmd->add_flag("--print", parse_opts->print,
                      "print the canonical form");
  parse_cmd->callback([parse_opts]() { cmd_parse(*parse_opts); });

  auto graph_opts = std::make_shared<GraphOpts>();
  auto* graph_cmd =
      app.add_subcommand("graph", "build and validate a program graph");
  graph_cmd->add_option("file", graph_opts->file, "IR or .irg file")
      ->required();
  graph_cmd->add_option("-o,--output", graph_opts->out, "write .irg here");
  graph_cmd->add_option("--spec", graph_opts->spec_path,
                        "feature layout JSON");
  graph_cmd->add_flag("--lenient", graph_opts->lenient,
                      "skip unsupported constructs");
  graph_cmd->add_flag("--json", graph_opts->json, "JSON output");
  graph_cmd->callback([graph_opts]() { cmd_graph(*graph_opts); });

  auto embed_opts = std::make_shared<EmbedOpts>();
  auto* embed_cmd =
      app.add_subcommand("embed", "print graph (and node) embeddings");
  embed_cmd->add_option("file", embed_opts->file, "IR or .irg file")
      ->required();
  embed_cmd->add_option("--params,--gnn", embed_opts->params_path,
                        "graph-network checkpoint")
      ->required();
  embed_cmd->add_option("--spec", embed_opts->spec_path,
                        "feature layout JSON");
  embed_cmd->add_flag("--nodes", embed_opts->nodes,
                      "include per-node embeddings");
  embed_cmd->add_flag("--lenient", embed_opts->lenient,
                      "skip unsupported constructs");
  embed_cmd->add_flag("--json", embed_opts->json, "JSON output");
  embed_cmd->callback([embed_opts]() { cmd_embed(*embed_opts); });

  auto pre_opts = std::make_shared<PretrainOpts>();
  auto* pre_cmd =
      app.add_subcommand("pretrain", "masked-node pretraining over a corpus");
  pre_cmd->add_option("--corpus", pre_opts->corpus,
                      "directory of .ll/.irg files")
      ->required();
  pre_cmd->add_option("-o,--output", pre_opts->out, "checkpoint path")
      ->required();
  pre_cmd->add_option("--metrics", pre_opts->metrics,
                      "write JSON-lines metrics here");
  pre_cmd->add_option("--spec", pre_opts->spec_path, "feature layout JSON");
  pre_cmd->add_flag("--lenient", pre_opts->lenient,
                    "skip unsupported constructs");
  pre_cmd->add_flag("--json", pre_opts->json, "JSON output");
  pre_opts->train.attach(pre_cmd);
  pre_cmd->callback([pre_opts]() { cmd_pretrain(*pre_opts); });

  auto ft_opts = std::make_shared<FinetuneOpts>();
  auto* ft_cmd = app.add_subcommand(
      "finetune", "soft-prompt fine-tuning against the frozen decoder");
  ft_cmd->add_option("--corpus", ft_opts->corpus,
                     "directory with qa.jsonl and the referenced IR files")
      ->required();
  ft_cmd->add_option("--lm", ft_opts->lm_path, "frozen decoder checkpoint")
      ->required();
  ft_cmd->add_option("--gnn", ft_opts->gnn_path,
                     "graph-network checkpoint to start from")
      ->required();
  ft_cmd->add_option("-o,--output", ft_opts->out, "checkpoint path")
      ->required();
  ft_cmd->add_option("--metrics", ft_opts->metrics,
                     "write JSON-lines metrics here");
  ft_cmd->add_option("--spec", ft_opts->spec_path, "feature layout JSON");
  ft_cmd->add_option("--max-node-rows", ft_opts->max_node_rows,
                     "cap node rows in the prompt (0 = unlimited)");
  ft_cmd->add_flag("--lenient", ft_opts->lenient,
                   "skip unsupported constructs");
  ft_cmd->add_flag("--json", ft_opts->json, "JSON output");
  ft_opts->train.attach(ft_cmd);
  ft_cmd->callback([ft_opts]() { cmd_finetune(*ft_opts); });

  auto px_opts = std::make_shared<PromptExportOpts>();
  auto* px_cmd = app.add_subcommand(
      "prompt-export", "export prompt prefix rows as binary f32");
  px_cmd->add_option("file", px_opts->file, "IR or .irg file")->required();
  px_cmd->add_option("--gnn", px_opts->gnn_path, "graph-network checkpoint")
      ->required();
  px_cmd->add_option("-o,--output", px_opts->out, "output path")->required();
  px_cmd->add_option("--spec", px_opts->spec_path, "feature layout JSON");
  px_cmd->add_flag("--lenient", px_opts->lenient,
                   "skip unsupported constructs");
  px_cmd->add_flag("--json", px_opts->json, "JSON output");
  px_cmd->callback([px_opts]() { cmd_prompt_export(*px_opts); });

  auto ab_opts = std::make_shared<AblateOpts>();
  auto* ab_cmd = app.add_subcommand(
      "ablate", "train per schema-reduction variant and report deltas");
  ab_cmd->add_option("--corpus", ab_opts->corpus,
                     "labeled corpus manifest (or its directory)")
      ->required();
  ab_cmd->add_option("--task", ab_opts->task, "task tag recorded in report");
  ab_cmd->add_option("--metric", ab_opts->metric,
                     "accuracy | error-rate | pairwise");
  ab_cmd->add_option("-o,--output", ab_opts->out, "report JSON path");
  ab_cmd->add_option("--holdout", ab_opts->holdout,
                     "held-out fraction (default 0.3)");
  ab_cmd->add_option("--spec", ab_opts->spec_path, "feature layout JSON");
  ab_cmd->add_flag("--json", ab_opts->json, "JSON output");
  ab_opts->train.attach(ab_cmd);
  ab_cmd->callback([ab_opts]() { cmd_ablate(*ab_opts); });

  auto ev_opts = std::make_shared<EvalOpts>();
  auto* ev_cmd =
      app.add_subcommand("eval", "evaluate (or train + evaluate) a classifier");
  ev_cmd->add_option("--corpus", ev_opts->corpus,
                     "labeled corpus manifest (or its directory)")
      ->required();
  ev_cmd->add_option("--gnn", ev_opts->gnn_path,
                     "classifier checkpoint (or init for --train)");
  ev_cmd->add_option("--metric", ev_opts->metric,
                     "accuracy | error-rate | pairwise");
  ev_cmd->add_option("-o,--output", ev_opts->out,
                     "with --train: save the trained checkpoint here");
  ev_cmd->add_option("--holdout", ev_opts->holdout,
                     "held-out fraction for --train (default 0.3)");
  ev_cmd->add_option("--spec", ev_opts->spec_path, "feature layout JSON");
  ev_cmd->add_flag("--train", ev_opts->do_train,
                   "train on a holdout split, evaluate held-out items");
  ev_cmd->add_flag("--json", ev_opts->json, "JSON output");
  ev_opts->train.attach(ev_cmd);
  ev_cmd->callback([ev_opts]() { cmd_eval(*ev_opts); });

  auto mc_opts = std::make_shared<MakeCorpusOpts>();
  auto* mc_cmd =
      app.add_subcommand("make-corpus", "synthesize a labeled toy corpus");
  mc_cmd->add_option("--task", mc_opts->task,
                     "cfg-loop | value-kind | pairwise")
      ->required();
  mc_cmd->add_option("-n,--count", mc_opts->n, "number of samples")
      ->required();
  mc_cmd->add_option("--seed", mc_opts->seed, "generator seed")->required();
  mc_cmd->add_option("-o,--output", mc_opts->out, "output directory")
      ->required();
  mc_cmd->add_flag("--json", mc_opts->json, "JSON output");
  mc_cmd->callback([mc_opts]() { cmd_make_corpus(*mc_opts); });

  auto lm_opts = std::make_shared<InitLmOpts>();
  auto* lm_cmd = app.add_subcommand(
      "init-lm", "write the seeded frozen decoder stub checkpoint");
  lm_cmd->add_option("-o,--output", lm_opts->out, "checkpoint path")
      ->required();
  lm_cmd->add_option("--embed", lm_opts->embed, "model width (default 64)");
  lm_cmd->add_option("--context", lm_opts->context,
                     "context length (default 1024)");
  lm_cmd->add_option("--seed", lm_opts->seed, "parameter seed (default 1)");
  lm_cmd->add_flag("--json", lm_opts->json, "JSON output");
  lm_cmd->callback([lm_opts]() { cmd_init_lm(*lm_opts); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "irgraph: error [" << e.code() << "]: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "irgraph: internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
