#include <gtest/gtest.h>

#include <cmath>

#include "nws/trainer.hpp"
#include "synthetic.hpp"
#include "test_support.hpp"

namespace nws {
namespace {

TrainConfig small_config() {
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.k = 3;
  cfg.seed = 11;
  return cfg;
}

testing::TopicCorpus small_topic_corpus() {
  testing::TopicCorpusSpec spec;
  spec.documents = 30;
  spec.topic_pool = 90;
  spec.filler_pool = 20;
  return testing::make_topic_corpus(spec);
}

TEST(Train, RejectsZeroEpochs) {
  const auto tc = small_topic_corpus();
  auto cfg = small_config();
  cfg.epochs = 0;
  EXPECT_THROW(train(tc.corpus, tc.emb.table, cfg), ConfigError);
}

TEST(Train, DeterministicForFixedConfig) {
  const auto tc = small_topic_corpus();
  const auto a = train(tc.corpus, tc.emb.table, small_config());
  const auto b = train(tc.corpus, tc.emb.table, small_config());
  EXPECT_EQ(a.salience, b.salience);
  ASSERT_EQ(a.epochs.size(), 3u);
  for (std::size_t i = 0; i < a.epochs.size(); ++i) {
    EXPECT_EQ(a.epochs[i].mean_loss, b.epochs[i].mean_loss);
  }
}

TEST(Train, NeverWritesEmbeddings) {
  const auto tc = small_topic_corpus();
  const auto before = tc.emb.table.content_checksum();
  const auto copy = tc.emb.table;
  train(tc.corpus, tc.emb.table, small_config());
  EXPECT_EQ(tc.emb.table.content_checksum(), before);
  EXPECT_EQ(tc.emb.table, copy);
}

TEST(Train, ResumeMatchesUninterruptedRun) {
  const auto tc = small_topic_corpus();
  auto cfg = small_config();
  cfg.epochs = 4;
  const auto full = train(tc.corpus, tc.emb.table, cfg);

  cfg.epochs = 2;
  const auto half = train(tc.corpus, tc.emb.table, cfg);
  EXPECT_EQ(half.salience.epoch_count, 2u);
  cfg.epochs = 4;
  const auto resumed = train(tc.corpus, tc.emb.table, cfg, half.salience);
  EXPECT_EQ(resumed.salience, full.salience);
  ASSERT_EQ(resumed.epochs.size(), 2u);
  EXPECT_EQ(resumed.epochs.front().epoch, 3u);
}

TEST(Train, CallbackSeesEveryEpoch) {
  const auto tc = small_topic_corpus();
  std::vector<std::size_t> seen;
  train(tc.corpus, tc.emb.table, small_config(),
        [&](const EpochStats& s, const SalienceTable& t) {
          seen.push_back(s.epoch);
          EXPECT_EQ(t.epoch_count, s.epoch);
          EXPECT_GT(s.instances, 0u);
        });
  EXPECT_EQ(seen, (std::vector<std::size_t>{1, 2, 3}));
}

TEST(Train, QValuesStayFinite) {
  const auto tc = small_topic_corpus();
  const auto r = train(tc.corpus, tc.emb.table, small_config());
  for (double v : r.salience.q) EXPECT_TRUE(std::isfinite(v));
}

TEST(Train, CorpusTooSmallPropagates) {
  const auto e = testing::random_embeddings(10, 3, 1);
  const auto c = testing::ingest_text("w1\nw2\nw3\n", e.vocab);
  EXPECT_THROW(train(c, e.table, small_config()), ConfigError);
}

TEST(Train, NonFiniteLossAborts) {
  // Inner products overflow to infinity.
  const auto e = testing::make_embeddings({"a", "b", "c", "d", "e", "f"},
                                          {{1e160, 1e160}, {1e160, -1e160}, {-1e160, 1e160},
                                           {1e160, 1e160}, {-1e160, -1e160}, {1e160, 0}});
  const auto c = testing::ingest_text("a\nb\nc\nd\ne\nf\n", e.vocab);
  auto cfg = small_config();
  cfg.k = 2;
  EXPECT_THROW(train(c, e.table, cfg), NumericError);
}

TEST(Train, MismatchedTablesRejected) {
  const auto tc = small_topic_corpus();
  EXPECT_THROW(train(tc.corpus, tc.emb.table, small_config(), init_salience(3, 1)), ConfigError);
}

TEST(Train, TopicWordsGainSalienceOverFiller) {
  const auto tc = testing::make_topic_corpus();
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.k = 5;
  cfg.learning_rate = 0.01;
  const auto r = train(tc.corpus, tc.emb.table, cfg);
  EXPECT_GT(testing::mean_of(r.salience.q, tc.topic_words),
            testing::mean_of(r.salience.q, tc.filler_words));
}

TEST(Train, LossDoesNotRiseOverFirstEpochs) {
  const auto tc = testing::make_topic_corpus();
  TrainConfig cfg;
  cfg.epochs = 3;
  const auto r = train(tc.corpus, tc.emb.table, cfg);
  int increases = 0;
  for (std::size_t i = 1; i < r.epochs.size(); ++i) {
    const double prev = r.epochs[i - 1].mean_loss, cur = r.epochs[i].mean_loss;
    if (cur > prev) {
      ++increases;
      EXPECT_LE(cur, prev * 1.02);
    }
  }
  EXPECT_LE(increases, 1);
}

}  // namespace
}  // namespace nws
