#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "irgraph/errors.hpp"
#include "irgraph/graph/builder.hpp"
#include "irgraph/ir/parser.hpp"
#include "irgraph/parallel.hpp"
#include "irgraph/rng.hpp"
#include "irgraph/store/binary.hpp"
#include "irgraph/store/graph_io.hpp"

namespace irgraph {

struct CorpusItem {
  std::string path;     // relative to the manifest directory
  int label = 0;
  std::string pair_id;  // empty = unpaired
};

struct LabeledCorpus {
  std::vector<CorpusItem> items;
  int classes = 0;
  std::filesystem::path root;  // directory the item paths are relative to
};

// Invariants from the type contract: labels lie in [0, classes); every
// nonempty pair id occurs exactly twice and its two members carry distinct
// labels.
inline void validate_corpus(const LabeledCorpus& c) {
  std::map<std::string, std::vector<int>> pairs;
  for (const auto& item : c.items) {
    if (item.label < 0 || item.label >= c.classes)
      throw FormatError("label " + std::to_string(item.label) + " for '" +
                        item.path + "' outside [0, " +
                        std::to_string(c.classes) + ")");
    if (!item.pair_id.empty()) pairs[item.pair_id].push_back(item.label);
  }
  for (const auto& [id, labels] : pairs) {
    if (labels.size() != 2)
      throw UnpairedSample("pair id '" + id + "' occurs " +
                           std::to_string(labels.size()) +
                           " times, expected 2");
    if (labels[0] == labels[1])
      throw UnpairedSample("pair id '" + id +
                           "' has two members with the same label");
  }
}

// Manifest: one JSON object per line, {"path", "label", "pair_id"?}, paths
// relative to the manifest's own directory.
inline LabeledCorpus load_labeled_corpus(const std::filesystem::path& manifest) {
  const std::string text = store::read_file(manifest);
  LabeledCorpus c;
  c.root = manifest.parent_path();
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
      throw FormatError(manifest.string() + ":" + std::to_string(line_no) +
                        ": " + e.what());
    }
    if (!j.contains("path") || !j.contains("label"))
      throw FormatError(manifest.string() + ":" + std::to_string(line_no) +
                        ": manifest line needs 'path' and 'label'");
    CorpusItem item;
    item.path = j.at("path").get<std::string>();
    item.label = j.at("label").get<int>();
    item.pair_id = j.value("pair_id", std::string());
    c.items.push_back(std::move(item));
  }
  if (c.items.empty())
    throw EmptyInput("manifest " + manifest.string() + " lists no items");
  int max_label = 0;
  for (const auto& item : c.items) max_label = std::max(max_label, item.label);
  c.classes = max_label + 1;
  validate_corpus(c);
  return c;
}

inline void save_manifest(const LabeledCorpus& c,
                          const std::filesystem::path& manifest) {
  std::string out;
  for (const auto& item : c.items) {
    nlohmann::json j;
    j["path"] = item.path;
    j["label"] = item.label;
    if (!item.pair_id.empty()) j["pair_id"] = item.pair_id;
    out += j.dump();
    out += '\n';
  }
  store::write_file_atomic(manifest, out);
}

// Loads the graph behind one corpus item: .irg files are deserialized,
// anything else is parsed as IR text and built.
inline HeteroGraph load_corpus_graph(const LabeledCorpus& c,
                                     const CorpusItem& item,
                                     const FeatureSpec& spec) {
  const std::filesystem::path p = c.root / item.path;
  if (p.extension() == ".irg") return load_graph(p);
  const std::string text = store::read_file(p);
  BuildOptions opts;
  opts.source_name = p.filename().string();
  opts.source_digest = sha256(text);
  return build_graph(parse_module(text, opts.source_name), spec, opts);
}

// Corpus-level graph building is embarrassingly parallel: each slot is
// written by exactly one worker, so the result matches the serial order.
inline std::vector<HeteroGraph> load_corpus_graphs(const LabeledCorpus& c,
                                                   const FeatureSpec& spec) {
  std::vector<HeteroGraph> graphs(c.items.size());
  parallel_for(c.items.size(), [&](std::size_t i) {
    graphs[i] = load_corpus_graph(c, c.items[i], spec);
  });
  return graphs;
}

// Deterministic holdout split. Items sharing a pair id always land on the
// same side so a trained model never sees a held-out item's twin. Returns
// (train indices, eval indices), each sorted.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_corpus(const LabeledCorpus& c, double holdout_fraction,
             std::uint64_t seed) {
  if (!(holdout_fraction > 0.0) || !(holdout_fraction < 1.0))
    throw FormatError("holdout fraction must lie in (0, 1)");
  // Group indices: one group per pair id, singleton groups otherwise,
  // ordered by first appearance so grouping is deterministic.
  std::vector<std::vector<std::size_t>> groups;
  std::map<std::string, std::size_t> pair_group;
  for (std::size_t i = 0; i < c.items.size(); ++i) {
    const std::string& id = c.items[i].pair_id;
    if (id.empty()) {
      groups.push_back({i});
      continue;
    }
    auto it = pair_group.find(id);
    if (it == pair_group.end()) {
      pair_group.emplace(id, groups.size());
      groups.push_back({i});
    } else {
      groups[it->second].push_back(i);
    }
  }
  std::vector<std::size_t> order(groups.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  const std::size_t want =
      static_cast<std::size_t>(std::llround(holdout_fraction *
                                            static_cast<double>(c.items.size())));
  std::vector<std::size_t> test, train;
  for (std::size_t gi : order) {
    auto& dst = test.size() < std::max<std::size_t>(want, 1) ? test : train;
    for (std::size_t i : groups[gi]) dst.push_back(i);
  }
  if (train.empty() || test.empty())
    throw FormatError("holdout split left an empty side (corpus too small)");
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

enum class ToyTask { CfgLoop, ValueKind, Pairwise };

inline const char* toy_task_name(ToyTask t) {
  switch (t) {
    case ToyTask::CfgLoop: return "cfg-loop";
    case ToyTask::ValueKind: return "value-kind";
    case ToyTask::Pairwise: return "pairwise";
  }
  throw InternalInconsistency("unknown toy task");
}

inline ToyTask toy_task_from_name(const std::string& s) {
  if (s == "cfg-loop") return ToyTask::CfgLoop;
  if (s == "value-kind") return ToyTask::ValueKind;
  if (s == "pairwise") return ToyTask::Pairwise;
  throw FormatError("unknown task '" + s +
                    "' (expected cfg-loop, value-kind, or pairwise)");
}

namespace detail {

// Shared scaffold for the cfg-loop task. Both members of a pair are built
// from one skeleton and differ in exactly one branch-target token, so with
// Cfg edges removed their graphs are feature- and edge-identical: the label
// is recoverable from control flow alone.
struct CfgLoopSkeleton {
  int fillers = 0;
  std::vector<int> consts;
};

inline std::string render_cfg_loop(const CfgLoopSkeleton& sk, bool loop) {
  std::ostringstream os;
  os << "define i32 @f(i32 %a) {\n";
  os << "entry:\n  br label %b1\n";
  int c = 0;
  std::string prev = "%a";
  for (int i = 1; i <= sk.fillers + 1; ++i) {
    os << "b" << i << ":\n";
    os << "  %v" << i << " = add i32 " << prev << ", " << sk.consts[c++]
       << "\n";
    prev = "%v" + std::to_string(i);
    os << "  br label %b" << (i + 1) << "\n";
  }
  const int d = sk.fillers + 2;
  os << "b" << d << ":\n";
  os << "  %vd = add i32 " << prev << ", " << sk.consts[c++] << "\n";
  os << "  %cmp = icmp slt i32 %vd, " << sk.consts[c++] << "\n";
  os << "  br i1 %cmp, label " << (loop ? "%b" + std::to_string(d) : "%alt")
     << ", label %exit\n";
  os << "alt:\n  br label %exit\n";
  os << "exit:\n  ret i32 %vd\n";
  os << "}\n";
  return os.str();
}

// value-kind: the planted signal is the constant kind feeding the one
// arithmetic instruction — a floating-point constant for label 1, an
// integer constant for label 0. Instruction counts match across classes.
inline std::string render_value_kind(Rng& rng, bool fp) {
  std::ostringstream os;
  const int extras = static_cast<int>(rng.below(3));
  if (fp) {
    os << "define double @f(double %a) {\n";
    os << "entry:\n";
    std::string prev = "%a";
    for (int i = 0; i < extras; ++i) {
      os << "  %e" << i << " = fadd double " << prev << ", "
         << (1 + static_cast<int>(rng.below(9))) << ".5" << "\n";
      prev = "%e" + std::to_string(i);
    }
    os << "  %v = fadd double " << prev << ", "
       << (1 + static_cast<int>(rng.below(9))) << ".5" << "\n";
    os << "  ret double %v\n}\n";
  } else {
    os << "define i32 @f(i32 %a) {\n";
    os << "entry:\n";
    std::string prev = "%a";
    for (int i = 0; i < extras; ++i) {
      os << "  %e" << i << " = add i32 " << prev << ", "
         << (1 + rng.below(99)) << "\n";
      prev = "%e" + std::to_string(i);
    }
    os << "  %v = add i32 " << prev << ", " << (1 + rng.below(99)) << "\n";
    os << "  ret i32 %v\n}\n";
  }
  return os.str();
}

// pairwise: vulnerable member divides by a function argument (may be zero),
// safe member divides by a nonzero constant drawn from the same skeleton.
inline std::string render_pairwise(const std::vector<int>& consts,
                                   bool vulnerable) {
  std::ostringstream os;
  os << "define i32 @f(i32 %x, i32 %y) {\n";
  os << "entry:\n";
  os << "  %t = add i32 %x, " << consts[0] << "\n";
  if (vulnerable)
    os << "  %r = udiv i32 %t, %y\n";
  else
    os << "  %r = udiv i32 %t, " << consts[1] << "\n";
  os << "  ret i32 %r\n}\n";
  return os.str();
}

}  // namespace detail

// Synthesizes n small IR files under out_dir with a planted structural
// label, writes out_dir/manifest.jsonl, and returns the corpus. Larger or
// equal seed draws never depend on the filesystem, so (task, n, seed) fully
// determines every emitted byte.
inline LabeledCorpus make_toy_corpus(ToyTask task, int n, std::uint64_t seed,
                                     const std::filesystem::path& out_dir) {
  if (n < 10) throw FormatError("toy corpus needs n >= 10");
  if (task == ToyTask::Pairwise && n % 2 != 0)
    throw FormatError("pairwise task needs an even n");
  std::filesystem::create_directories(out_dir);
  Rng rng(seed);
  LabeledCorpus c;
  c.classes = 2;
  c.root = out_dir;
  auto emit = [&](const std::string& name, const std::string& text, int label,
                  const std::string& pair_id) {
    store::write_file_atomic(out_dir / name, text);
    c.items.push_back({name, label, pair_id});
  };
  char name[64];
  switch (task) {
    case ToyTask::CfgLoop: {
      // Matched pairs share one skeleton; an odd trailing sample is
      // unpaired so the class balance stays within one.
      const int pairs = n / 2;
      for (int p = 0; p < pairs; ++p) {
        detail::CfgLoopSkeleton sk;
        sk.fillers = static_cast<int>(rng.below(3));
        for (int i = 0; i < sk.fillers + 3; ++i)
          sk.consts.push_back(1 + static_cast<int>(rng.below(99)));
        const std::string id = "p" + std::to_string(p);
        std::snprintf(name, sizeof name, "cfgloop_%04d.ll", 2 * p);
        emit(name, detail::render_cfg_loop(sk, true), 1, id);
        std::snprintf(name, sizeof name, "cfgloop_%04d.ll", 2 * p + 1);
        emit(name, detail::render_cfg_loop(sk, false), 0, id);
      }
      if (n % 2 != 0) {
        detail::CfgLoopSkeleton sk;
        sk.fillers = static_cast<int>(rng.below(3));
        for (int i = 0; i < sk.fillers + 3; ++i)
          sk.consts.push_back(1 + static_cast<int>(rng.below(99)));
        std::snprintf(name, sizeof name, "cfgloop_%04d.ll", n - 1);
        emit(name, detail::render_cfg_loop(sk, n % 4 == 1), n % 4 == 1 ? 1 : 0,
             "");
      }
      break;
    }
    case ToyTask::ValueKind: {
      for (int i = 0; i < n; ++i) {
        const bool fp = i % 2 == 0;
        std::snprintf(name, sizeof name, "valuekind_%04d.ll", i);
        emit(name, detail::render_value_kind(rng, fp), fp ? 1 : 0, "");
      }
      break;
    }
    case ToyTask::Pairwise: {
      for (int p = 0; p < n / 2; ++p) {
        std::vector<int> consts{1 + static_cast<int>(rng.below(99)),
                                1 + static_cast<int>(rng.below(99))};
        const std::string id = "p" + std::to_string(p);
        std::snprintf(name, sizeof name, "pairwise_%04d.ll", 2 * p);
        emit(name, detail::render_pairwise(consts, true), 1, id);
        std::snprintf(name, sizeof name, "pairwise_%04d.ll", 2 * p + 1);
        emit(name, detail::render_pairwise(consts, false), 0, id);
      }
      break;
    }
  }
  validate_corpus(c);
  save_manifest(c, out_dir / "manifest.jsonl");
  return c;
}

}  // namespace irgraph
