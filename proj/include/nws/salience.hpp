#ifndef NWS_SALIENCE_HPP
#define NWS_SALIENCE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nws/corpus.hpp"
#include "nws/embeddings.hpp"
#include "nws/error.hpp"
#include "nws/rng.hpp"

namespace nws {

/// Learnable per-word salience q(w) with AdaGrad state.
struct SalienceTable {
  std::vector<double> q;
  std::vector<double> accumulator;  // running sum of squared gradients
  std::size_t epoch_count = 0;      // completed training epochs

  std::size_t size() const { return q.size(); }
  friend bool operator==(const SalienceTable&, const SalienceTable&) = default;
};

struct TrainConfig {
  std::size_t k = 5;  // noise-set size
  std::size_t negatives_per_anchor = 1;
  std::size_t epochs = 5;
  double learning_rate = 0.01;
  std::uint64_t seed = 1;
  double adagrad_epsilon = 1e-8;
  bool multiset = false;       // count repeated words instead of using word sets
  double gradient_clip = 0.0;  // 0 disables
  double weight_decay = 0.0;   // 0 disables

  void validate() const {
    if (k < 1 || k > kMaxNoiseSetSize) throw ConfigError("K must be in [1, 10]");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
      throw ConfigError("learning rate must be positive");
    }
    if (epochs < 1) throw ConfigError("epochs must be at least 1");
    if (!(adagrad_epsilon > 0.0)) throw ConfigError("AdaGrad epsilon must be positive");
    if (gradient_clip < 0.0 || weight_decay < 0.0) {
      throw ConfigError("gradient clip and weight decay must be non-negative");
    }
  }
};

/// q drawn uniformly from [0, 1), accumulators zero.
inline SalienceTable init_salience(std::size_t vocab_size, std::uint64_t seed) {
  if (vocab_size < 1) throw ConfigError("vocabulary must not be empty");
  SalienceTable table;
  table.q.resize(vocab_size);
  table.accumulator.assign(vocab_size, 0.0);
  Rng rng(seed);
  for (auto& v : table.q) v = rng.uniform01();
  return table;
}

/// Calls fn(word, multiplicity) for each weighted word of `s`. With set
/// semantics every distinct word counts once.
template <typename Fn>
void for_each_word(const Sentence& s, bool multiset, Fn&& fn) {
  if (!multiset) {
    for (WordId w : s.word_set) fn(w, 1.0);
    return;
  }
  auto it = s.word_set.begin();
  while (it != s.word_set.end()) {
    const auto count = std::count(s.token_ids.begin(), s.token_ids.end(), *it);
    fn(*it, static_cast<double>(count));
    ++it;
  }
}

/// Salience-weighted sum of the sentence's word vectors.
inline std::vector<double> embed_sentence(const Sentence& s, std::span<const double> q,
                                          const EmbeddingTable& table, bool multiset = false) {
  if (s.word_set.empty()) throw UnembeddableSentence();
  std::vector<double> out(table.dim(), 0.0);
  for_each_word(s, multiset, [&](WordId w, double count) {
    const double weight = count * q[w];
    const auto row = table.row(w);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += weight * row[i];
  });
  return out;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

struct SoftmaxResult {
  double h = 0.0;                // probability mass on the candidate
  std::vector<double> weights;   // [candidate, noise_1, ..., noise_K], sums to 1
  double log_h = 0.0;
  double log_one_minus_h = 0.0;  // log of the noise mass
};

/// Softmax of anchor inner products over {candidate} plus the noise set,
/// evaluated after subtracting the largest logit.
inline SoftmaxResult softmax_similarity(std::span<const double> anchor,
                                        std::span<const double> candidate,
                                        std::span<const std::vector<double>> noise) {
  if (noise.empty()) throw ConfigError("noise set must not be empty");
  std::vector<double> logits;
  logits.reserve(noise.size() + 1);
  logits.push_back(dot(anchor, candidate));
  for (const auto& n : noise) logits.push_back(dot(anchor, n));
  const double max_logit = *std::max_element(logits.begin(), logits.end());

  SoftmaxResult out;
  out.weights.resize(logits.size());
  double total = 0.0, noise_mass = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out.weights[i] = std::exp(logits[i] - max_logit);
    total += out.weights[i];
    if (i > 0) noise_mass += out.weights[i];
  }
  for (auto& w : out.weights) w /= total;
  out.h = out.weights[0];
  // When the candidate holds the largest logit, total = 1 + noise_mass and
  // log1p keeps small noise masses from rounding away.
  const double log_total = logits[0] == max_logit ? std::log1p(noise_mass) : std::log(total);
  out.log_h = logits[0] - max_logit - log_total;
  out.log_one_minus_h = std::log(noise_mass) - log_total;
  return out;
}

/// Embeddings of every sentence taking part in one instance.
struct InstanceEmbeddings {
  std::vector<double> anchor;
  std::vector<double> candidate;
  std::vector<std::vector<double>> noise;
};

inline InstanceEmbeddings embed_instance(const TrainingInstance& inst, const Corpus& corpus,
                                         std::span<const double> q, const EmbeddingTable& table,
                                         bool multiset) {
  InstanceEmbeddings e;
  e.anchor = embed_sentence(corpus.sentence(inst.anchor), q, table, multiset);
  e.candidate = embed_sentence(corpus.sentence(inst.candidate), q, table, multiset);
  e.noise.reserve(inst.noise.size());
  for (SentenceId id : inst.noise) {
    e.noise.push_back(embed_sentence(corpus.sentence(id), q, table, multiset));
  }
  return e;
}

inline double cross_entropy(int label, const SoftmaxResult& sim) {
  return label == 1 ? -sim.log_h : -sim.log_one_minus_h;
}

/// Cross-entropy of the instance label against the sampled softmax.
inline double instance_loss(const TrainingInstance& inst, const Corpus& corpus,
                            std::span<const double> q, const EmbeddingTable& table,
                            bool multiset = false) {
  const auto e = embed_instance(inst, corpus, q, table, multiset);
  return cross_entropy(inst.label, softmax_similarity(e.anchor, e.candidate, e.noise));
}

/// Gradient entries sorted by word id.
using SparseGradient = std::vector<std::pair<WordId, double>>;

struct LossAndGradient {
  double loss = 0.0;
  double h = 0.0;
  SparseGradient gradient;
};

/// Loss and exact dL/dq(w) for every word in the instance's sentences.
///
/// With p the softmax weights over {candidate, noise} and g = log h,
///   dg/dq(w) = n_a(w) w.(c - sum_k p_k x_k) + n_c(w) w.a - sum_k p_k n_k(w) w.a
/// where n_s(w) is the multiplicity of w in sentence s (0/1 for word sets).
/// Then dL/dq = -dg/dq for t = 1 and h/(1-h) dg/dq for t = 0.
///
/// Both sums are evaluated through 1 - p_c = sum_{noise} p_k:
///   c - sum_k p_k x_k            = sum_{noise} p_k (c - x_k)
///   n_c(w) - sum_k p_k n_k(w)    = sum_{noise} p_k (n_c(w) - n_k(w))
/// so a word that shifts every logit equally gets an exact zero.
inline LossAndGradient instance_loss_and_gradient(const TrainingInstance& inst,
                                                  const Corpus& corpus,
                                                  std::span<const double> q,
                                                  const EmbeddingTable& table,
                                                  bool multiset = false) {
  const auto e = embed_instance(inst, corpus, q, table, multiset);
  const auto sim = softmax_similarity(e.anchor, e.candidate, e.noise);
  const std::size_t d = table.dim();
  const std::size_t K = inst.noise.size();

  std::vector<double> context(d, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    const double p = sim.weights[k + 1];
    for (std::size_t i = 0; i < d; ++i) context[i] += p * (e.candidate[i] - e.noise[k][i]);
  }

  // counts[w] = {n_c(w), n_1(w), ..., n_K(w)}
  std::map<WordId, std::vector<double>> counts;
  auto count_into = [&](SentenceId s, std::size_t slot) {
    for_each_word(corpus.sentence(s), multiset, [&](WordId w, double n) {
      auto& c = counts[w];
      if (c.empty()) c.assign(K + 1, 0.0);
      c[slot] += n;
    });
  };
  count_into(inst.candidate, 0);
  for (std::size_t k = 0; k < K; ++k) count_into(inst.noise[k], k + 1);

  std::map<WordId, double> grad;
  for_each_word(corpus.sentence(inst.anchor), multiset, [&](WordId w, double n) {
    grad[w] += n * dot(table.row(w), context);
  });
  for (const auto& [w, c] : counts) {
    double coef = 0.0;
    for (std::size_t k = 0; k < K; ++k) coef += sim.weights[k + 1] * (c[0] - c[k + 1]);
    grad[w] += coef * dot(table.row(w), e.anchor);
  }

  const double scale =
      inst.label == 1 ? -1.0 : std::exp(sim.log_h - sim.log_one_minus_h);
  LossAndGradient out;
  out.loss = cross_entropy(inst.label, sim);
  out.h = sim.h;
  out.gradient.reserve(grad.size());
  for (const auto& [w, g] : grad) out.gradient.emplace_back(w, scale * g);
  return out;
}

inline SparseGradient instance_gradient(const TrainingInstance& inst, const Corpus& corpus,
                                        std::span<const double> q, const EmbeddingTable& table,
                                        bool multiset = false) {
  return instance_loss_and_gradient(inst, corpus, q, table, multiset).gradient;
}

/// Per-coordinate AdaGrad step on the words present in `grad`.
inline void apply_adagrad(SalienceTable& table, const SparseGradient& grad,
                          const TrainConfig& config) {
  for (auto [w, g] : grad) {
    if (config.weight_decay > 0.0) g += config.weight_decay * table.q[w];
    if (config.gradient_clip > 0.0) g = std::clamp(g, -config.gradient_clip, config.gradient_clip);
    table.accumulator[w] += g * g;
    table.q[w] -= config.learning_rate * g / (std::sqrt(table.accumulator[w]) + config.adagrad_epsilon);
  }
}

}  // namespace nws

#endif  // NWS_SALIENCE_HPP
