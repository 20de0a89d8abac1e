#ifndef NWS_TRAINER_HPP
#define NWS_TRAINER_HPP

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "nws/corpus.hpp"
#include "nws/embeddings.hpp"
#include "nws/error.hpp"
#include "nws/salience.hpp"

namespace nws {

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  std::size_t instances = 0;
  double mean_loss = 0.0;
};

using EpochCallback = std::function<void(const EpochStats&, const SalienceTable&)>;

struct TrainResult {
  SalienceTable salience;
  std::vector<EpochStats> epochs;
};

/// Instance stream seed for a 1-based epoch number.
inline std::uint64_t epoch_seed(const TrainConfig& config, std::size_t epoch) {
  return config.seed + epoch;
}

/// Continues training `start` until config.epochs epochs are complete.
/// Each epoch draws a fresh instance stream and updates after every
/// instance. `on_epoch` runs after each epoch (checkpointing, logging).
inline TrainResult train(const Corpus& corpus, const EmbeddingTable& table,
                         const TrainConfig& config, SalienceTable start,
                         const EpochCallback& on_epoch = {}) {
  config.validate();
  if (table.rows() != corpus.vocab_size() || start.size() != corpus.vocab_size() ||
      start.accumulator.size() != start.size()) {
    throw ConfigError("corpus, embeddings and salience table disagree on vocabulary size");
  }
  TrainResult result{std::move(start), {}};
  auto& salience = result.salience;

  for (std::size_t epoch = salience.epoch_count + 1; epoch <= config.epochs; ++epoch) {
    const auto instances =
        sample_training_instances(corpus, config.k, config.negatives_per_anchor,
                                  epoch_seed(config, epoch));
    double total = 0.0;
    for (const auto& inst : instances) {
      auto step = instance_loss_and_gradient(inst, corpus, salience.q, table, config.multiset);
      total += step.loss;
      apply_adagrad(salience, step.gradient, config);
    }
    EpochStats stats{epoch, instances.size(),
                     instances.empty() ? 0.0 : total / static_cast<double>(instances.size())};
    if (!std::isfinite(stats.mean_loss)) {
      throw NumericError("non-finite mean loss in epoch " + std::to_string(epoch));
    }
    salience.epoch_count = epoch;
    result.epochs.push_back(stats);
    if (on_epoch) on_epoch(stats, salience);
  }
  return result;
}

inline TrainResult train(const Corpus& corpus, const EmbeddingTable& table,
                         const TrainConfig& config, const EpochCallback& on_epoch = {}) {
  config.validate();
  return train(corpus, table, config, init_salience(corpus.vocab_size(), config.seed), on_epoch);
}

}  // namespace nws

#endif  // NWS_TRAINER_HPP
