#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "irgraph/errors.hpp"
#include "irgraph/gnn/adamw.hpp"
#include "irgraph/gnn/params.hpp"

namespace irgraph {

struct TrainConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
  int epochs = 10;
  int batch_size = 8;
  int max_steps = 0;  // > 0: run exactly this many optimizer steps
  double mask_rate = 0.15;
  std::uint64_t seed = 0;
  GnnDims dims;

  AdamWConfig optimizer() const {
    return {learning_rate, beta1, beta2, eps, weight_decay};
  }

  void validate() const {
    if (learning_rate <= 0)
      throw FormatError("learning_rate must be positive");
    if (mask_rate <= 0 || mask_rate > 1)
      throw FormatError("mask_rate must be in (0, 1]");
    if (batch_size < 1) throw FormatError("batch_size must be at least 1");
    if (epochs < 0 || max_steps < 0)
      throw FormatError("epochs and max_steps must be non-negative");
    if (dims.h1 <= 0 || dims.h2 <= 0 || dims.embed <= 0)
      throw FormatError("hidden dims must be positive");
  }

  nlohmann::json to_json() const {
    return {{"learning_rate", learning_rate},
            {"beta1", beta1},
            {"beta2", beta2},
            {"eps", eps},
            {"weight_decay", weight_decay},
            {"epochs", epochs},
            {"batch_size", batch_size},
            {"max_steps", max_steps},
            {"mask_rate", mask_rate},
            {"seed", seed},
            {"h1", dims.h1},
            {"h2", dims.h2},
            {"embed", dims.embed}};
  }

  static TrainConfig from_json(const nlohmann::json& j) {
    TrainConfig c;
    try {
      c.learning_rate = j.value("learning_rate", c.learning_rate);
      c.beta1 = j.value("beta1", c.beta1);
      c.beta2 = j.value("beta2", c.beta2);
      c.eps = j.value("eps", c.eps);
      c.weight_decay = j.value("weight_decay", c.weight_decay);
      c.epochs = j.value("epochs", c.epochs);
      c.batch_size = j.value("batch_size", c.batch_size);
      c.max_steps = j.value("max_steps", c.max_steps);
      c.mask_rate = j.value("mask_rate", c.mask_rate);
      c.seed = j.value("seed", c.seed);
      c.dims.h1 = j.value("h1", c.dims.h1);
      c.dims.h2 = j.value("h2", c.dims.h2);
      c.dims.embed = j.value("embed", c.dims.embed);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("malformed training config: ") + e.what());
    }
    c.validate();
    return c;
  }
};

}  // namespace irgraph
