#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "irgraph/errors.hpp"

namespace irgraph {

// Fraction of positions where prediction equals label.
inline double accuracy(const std::vector<int>& predictions,
                       const std::vector<int>& labels) {
  if (predictions.size() != labels.size())
    throw ShapeMismatch("accuracy: " + std::to_string(predictions.size()) +
                        " predictions vs " + std::to_string(labels.size()) +
                        " labels");
  if (predictions.empty()) throw EmptyInput("accuracy over zero samples");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    if (predictions[i] == labels[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

inline double error_rate(const std::vector<int>& predictions,
                         const std::vector<int>& labels) {
  return 1.0 - accuracy(predictions, labels);
}

// Pair-level accuracy: samples sharing a pair id form one unit, counted
// correct only when every member is predicted correctly. Every pair id must
// occur exactly twice; an empty pair id marks an unpaired sample and is
// rejected.
inline double pairwise_accuracy(const std::vector<int>& predictions,
                                const std::vector<int>& labels,
                                const std::vector<std::string>& pair_ids) {
  if (predictions.size() != labels.size() ||
      predictions.size() != pair_ids.size())
    throw ShapeMismatch("pairwise_accuracy: predictions/labels/pair_ids sizes "
                        "differ");
  if (predictions.empty())
    throw EmptyInput("pairwise_accuracy over zero samples");
  std::map<std::string, std::pair<int, int>> pairs;  // id -> (count, hits)
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (pair_ids[i].empty())
      throw UnpairedSample("sample " + std::to_string(i) + " has no pair id");
    auto& p = pairs[pair_ids[i]];
    p.first += 1;
    p.second += predictions[i] == labels[i] ? 1 : 0;
  }
  std::size_t good = 0;
  for (const auto& [id, p] : pairs) {
    if (p.first != 2)
      throw UnpairedSample("pair id '" + id + "' occurs " +
                           std::to_string(p.first) + " times, expected 2");
    if (p.second == 2) ++good;
  }
  return static_cast<double>(good) / static_cast<double>(pairs.size());
}

}  // namespace irgraph
