// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (capped at 1).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../cli_fixture.hpp"
#include "../oracles.hpp"
#include "../synthetic.hpp"
#include "nws/nws.hpp"

namespace {

using namespace nws;
using Clock = std::chrono::steady_clock;

// Tolerances and limits, one per criterion clause.
constexpr double kGradientRelTol = 1e-5;
constexpr double kGradientStep = 1e-4;
constexpr double kGradientSeconds = 5.0;
constexpr double kPearsonTol = 1e-12;
constexpr double kStsTol = 1e-10;
constexpr double kFisherExpected = 0.5493061;
constexpr double kFisherTol = 1e-6;
constexpr double kCiExpected = 0.19354;
constexpr double kCiTol = 1e-4;
constexpr double kZExpected = 3.836;
constexpr double kZTol = 1e-3;
constexpr double kSoftmaxTol = 1e-12;
constexpr double kSalienceGap = 0.05;
constexpr double kLossPlateau = 0.05;
constexpr double kSyntheticSeconds = 60.0;
constexpr double kSmokeSeconds = 90.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << "  [" << o.detail << "]" << std::endl;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

// --- 1. gradient ---------------------------------------------------------------

Outcome gradient_check() {
  const auto t0 = Clock::now();
  const auto emb = testing::random_embeddings(50, 10, 4242, 1.0 / std::sqrt(10.0));
  std::mt19937_64 gen(4243);
  std::uniform_int_distribution<int> len(2, 8), word(0, 49);
  std::ostringstream text;
  constexpr int kSentences = 60;
  for (int s = 0; s < kSentences; ++s) {
    const int n = len(gen);
    for (int i = 0; i < n; ++i) text << (i ? " " : "") << 'w' << word(gen);
    text << '\n';
  }
  const auto corpus = testing::ingest_text(text.str(), emb.vocab);
  const auto q0 = init_salience(50, 4244).q;

  std::uniform_int_distribution<SentenceId> pick(0, kSentences - 1);
  double worst = 0.0;
  std::size_t coords = 0, labels[2] = {0, 0};
  for (int i = 0; i < 100; ++i) {
    TrainingInstance inst;
    inst.anchor = pick(gen);
    do inst.candidate = pick(gen); while (inst.candidate == inst.anchor);
    inst.label = i % 2;
    while (inst.noise.size() < 3) {
      const auto j = pick(gen);
      if (j == inst.anchor || j == inst.candidate ||
          std::find(inst.noise.begin(), inst.noise.end(), j) != inst.noise.end()) {
        continue;
      }
      inst.noise.push_back(j);
    }
    ++labels[inst.label];
    for (const auto& [w, g] : instance_gradient(inst, corpus, q0, emb.table)) {
      auto q = q0;
      const double numeric = oracle::central_difference(
          [&](double delta) {
            q[w] = q0[w] + delta;
            return instance_loss(inst, corpus, q, emb.table);
          },
          kGradientStep);
      const double scale = std::max(std::fabs(g), std::fabs(numeric));
      worst = std::max(worst, scale == 0.0 ? 0.0 : std::fabs(g - numeric) / scale);
      ++coords;
    }
  }
  const double secs = seconds_since(t0);
  return {worst < kGradientRelTol && secs < kGradientSeconds && labels[0] == 50 && labels[1] == 50,
          "coords=" + std::to_string(coords) + " max_rel_err=" + fmt(worst) + " (<" +
              fmt(kGradientRelTol) + ") time=" + fmt(secs) + "s (<" + fmt(kGradientSeconds) + "s)"};
}

// --- 2. oracle equivalence -------------------------------------------------------

Outcome isf_oracle() {
  const auto emb = testing::random_embeddings(12, 3, 1);
  std::mt19937_64 gen(20);
  std::uniform_int_distribution<int> len(1, 6), word(0, 14);  // w12..w14 are OOV
  std::vector<std::vector<std::string>> in_vocab;
  std::string text;
  for (int s = 0; s < 20; ++s) {
    if (s == 7 || s == 13) text += '\n';
    const int n = len(gen);
    in_vocab.emplace_back();
    for (int i = 0; i < n; ++i) {
      const int w = word(gen);
      text += (i ? " w" : "w") + std::to_string(w);
      if (w < 12) in_vocab.back().push_back("w" + std::to_string(w));
    }
    text += '\n';
  }
  const auto corpus = testing::ingest_text(text, emb.vocab);
  const auto scheme = isf_scheme(corpus);
  const auto counts = oracle::scan_sentence_counts(in_vocab);
  std::size_t mismatches = 0;
  for (WordId w = 0; w < 12; ++w) {
    const auto it = counts.find(emb.vocab.word(w));
    const double c = it == counts.end() ? 0.0 : it->second;
    const double expected = std::log(1.0 + 20.0 / (c > 0 ? c : 1.0));
    if (scheme.scores[w] != expected) ++mismatches;
  }
  return {mismatches == 0 && corpus.sentences().size() == 20,
          "20 sentences, " + std::to_string(mismatches) + " mismatches (exact)"};
}

Outcome pearson_oracle() {
  std::mt19937_64 gen(10);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int list = 0; list < 10; ++list) {
    const std::size_t n = 5 + 7 * static_cast<std::size_t>(list);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = normal(gen) * (list + 1);
      y[i] = 0.4 * x[i] + normal(gen) + 100.0 * list;
    }
    worst = std::max(worst, std::fabs(pearson(x, y) - oracle::pearson(x, y)));
  }
  return {worst <= kPearsonTol, "10 lists, max |diff|=" + fmt(worst) + " (<=" + fmt(kPearsonTol) + ")"};
}

Outcome sts_oracle() {
  const auto emb = testing::random_embeddings(20, 6, 77);
  std::mt19937_64 gen(31);
  std::uniform_int_distribution<int> word(0, 19), len(1, 5);
  std::uniform_real_distribution<double> gold(0.0, 5.0), weight(0.1, 2.0);
  auto sentence = [&] {
    std::string s;
    const int n = len(gen);
    for (int i = 0; i < n; ++i) s += (i ? " w" : "w") + std::to_string(word(gen));
    return s;
  };
  std::vector<StsPair> pairs;
  for (int i = 0; i < 10; ++i) pairs.push_back({sentence(), sentence(), gold(gen)});
  std::vector<double> q(20);
  for (auto& v : q) v = weight(gen);

  std::vector<double> sys, gs;
  auto embed = [&](const std::string& text) {
    std::map<std::string, bool> seen;
    std::vector<double> v(6, 0.0);
    std::istringstream in(text);
    for (std::string w; in >> w;) {
      if (seen[w]) continue;
      seen[w] = true;
      const int id = std::stoi(w.substr(1));
      for (std::size_t i = 0; i < 6; ++i) v[i] += q[id] * emb.table.row(id)[i];
    }
    return v;
  };
  for (const auto& p : pairs) {
    sys.push_back(oracle::cosine(embed(p.sentence_a), embed(p.sentence_b)));
    gs.push_back(p.gold);
  }
  const double expected = oracle::pearson(sys, gs);
  const double got = evaluate_sts(pairs, {SchemeKind::NWS, q}, emb.table, emb.vocab).r;
  const double diff = std::fabs(got - expected);
  return {diff <= kStsTol, "10 pairs, |diff|=" + fmt(diff) + " (<=" + fmt(kStsTol) + ")"};
}

// --- 3. statistics -------------------------------------------------------------

Outcome fisher_value() {
  const double f = fisher_transform(0.5);
  return {std::fabs(f - kFisherExpected) <= kFisherTol, "F(0.5)=" + fmt(f)};
}

Outcome ci_value() {
  const auto ci = fisher_ci(0.0, 103);
  const bool ok = std::fabs(ci.high - kCiExpected) <= kCiTol && std::fabs(ci.low + kCiExpected) <= kCiTol;
  return {ok, "CI(0,103)=[" + fmt(ci.low) + ", " + fmt(ci.high) + "]"};
}

Outcome z_value() {
  const auto s = significance(0.6, 203, 0.3, 203);
  return {std::fabs(s.z - kZExpected) <= kZTol && s.significant_at_05,
          "z=" + fmt(s.z) + " significant=" + (s.significant_at_05 ? "yes" : "no")};
}

// --- 4. softmax ------------------------------------------------------------------

Outcome softmax_uniform() {
  const std::vector<double> a{0.3, -1.2, 2.0}, c{1.0, 1.0, 0.5};
  double worst = 0.0;
  for (std::size_t k : {1u, 3u, 9u}) {
    const std::vector<std::vector<double>> noise(k, c);
    worst = std::max(worst, std::fabs(softmax_similarity(a, c, noise).h - 1.0 / double(k + 1)));
  }
  return {worst <= kSoftmaxTol, "K in {1,3,9}, max |h-1/(K+1)|=" + fmt(worst)};
}

// --- 5. synthetic recovery ---------------------------------------------------------

Outcome synthetic_recovery() {
  const auto t0 = Clock::now();
  const auto tc = testing::make_topic_corpus();
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.k = 5;
  cfg.learning_rate = 0.01;
  const auto result = train(tc.corpus, tc.emb.table, cfg);
  const double gap = testing::mean_of(result.salience.q, tc.topic_words) -
                     testing::mean_of(result.salience.q, tc.filler_words);
  const double l4 = result.epochs[3].mean_loss, l5 = result.epochs[4].mean_loss;
  const double change = std::fabs(l5 - l4) / l4;
  const double secs = seconds_since(t0);
  std::string losses;
  for (const auto& e : result.epochs) losses += (losses.empty() ? "" : ",") + fmt(e.mean_loss);
  return {gap > kSalienceGap && change <= kLossPlateau && secs < kSyntheticSeconds,
          "gap=" + fmt(gap) + " (>" + fmt(kSalienceGap) + ") loss=" + losses +
              " |l5-l4|/l4=" + fmt(change) + " (<=" + fmt(kLossPlateau) + ") time=" + fmt(secs) + "s"};
}

// --- 6. determinism ---------------------------------------------------------------

Outcome determinism() {
  testing::CliWorkspace ws("acceptance_det");
  auto args = [&](const std::string& out) {
    return std::vector<std::string>{"train", "--embeddings", ws.embeddings, "--corpus", ws.corpus,
                                    "--out", out, "--epochs", "3"};
  };
  const auto a = testing::run_cli(args(ws.file("a.tsv")));
  const auto b = testing::run_cli(args(ws.file("b.tsv")));
  const auto fa = testing::read_file(ws.file("a.tsv")), fb = testing::read_file(ws.file("b.tsv"));
  return {a.code == 0 && b.code == 0 && !fa.empty() && fa == fb,
          "exit=" + std::to_string(a.code) + "," + std::to_string(b.code) + " bytes=" +
              std::to_string(fa.size()) + (fa == fb ? " identical" : " DIFFER")};
}

// --- 7. non-reproducibility statement -------------------------------------------------

Outcome semeval_layout() {
  std::cout << "NOTE  The published STS correlations (e.g. NWS overall average 57.6) and\n"
               "      psycholinguistic correlations (e.g. GloVe concreteness 0.26) require an\n"
               "      81M-sentence book corpus and the full SemEval datasets. They are not\n"
               "      reproducible at desk scale and are replaced by the property checks in\n"
               "      this suite. The harness accepts the SemEval layout for full runs.\n";
  testing::TempDir dir("acceptance_semeval");
  const auto input = dir.write("STS.input.headlines.txt",
                               "a man plays guitar\ta person plays music\r\n"
                               "cats sleep\tthe stock fell\r\n"
                               "unrated pair\tskipped\r\n"
                               "dogs run fast\tdogs are running\r\n");
  dir.write("STS.gs.headlines.txt", "4.2\r\n0.4\r\n\r\n3.8\r\n");
  const auto ds = load_sts_dataset(input);
  const bool ok = ds.name == "headlines" && ds.pairs.size() == 3 && ds.unannotated == 1 &&
                  ds.pairs[2].gold == 3.8;
  return {ok, "STS.input/STS.gs pair read: " + std::to_string(ds.pairs.size()) + " pairs, " +
                  std::to_string(ds.unannotated) + " unannotated"};
}

// --- 8. end-to-end smoke ------------------------------------------------------------

Outcome end_to_end() {
  setenv("NWS_THREADS", "1", 1);
  const auto t0 = Clock::now();
  testing::CliWorkspace ws("acceptance_e2e");
  std::vector<std::pair<std::string, int>> steps;
  auto step = [&](const std::string& name, const std::vector<std::string>& args) {
    steps.emplace_back(name, testing::run_cli(args).code);
  };
  step("train", {"train", "--embeddings", ws.embeddings, "--corpus", ws.corpus, "--out",
                 ws.file("nws.tsv"), "--epochs", "2", "--report"});
  step("export", {"export", "--scheme", "isf", "--embeddings", ws.embeddings, "--corpus", ws.corpus,
                  "--out", ws.file("isf.tsv")});
  step("eval-sts", {"eval-sts", "--embeddings", ws.embeddings, "--dataset", ws.sts, "--scheme",
                    "nws", "--salience", ws.file("nws.tsv"), "--compare", ws.file("isf.tsv")});
  step("psych-corr", {"psych-corr", "--salience", ws.file("nws.tsv"), "--ratings", ws.ratings});
  const double secs = seconds_since(t0);
  bool ok = secs < kSmokeSeconds;
  std::string detail;
  for (const auto& [name, code] : steps) {
    ok = ok && code == 0;
    detail += name + "=" + std::to_string(code) + " ";
  }
  return {ok, detail + "time=" + fmt(secs) + "s (<" + fmt(kSmokeSeconds) + "s)"};
}

}  // namespace

int main() {
  report("gradient matches central differences", gradient_check);
  report("ISF equals brute-force scan", isf_oracle);
  report("Pearson equals two-pass oracle", pearson_oracle);
  report("evaluate_sts equals composed oracle", sts_oracle);
  report("Fisher transform spot value", fisher_value);
  report("confidence interval spot value", ci_value);
  report("significance spot value", z_value);
  report("softmax uniform mass", softmax_uniform);
  report("synthetic salience recovery", synthetic_recovery);
  report("train determinism", determinism);
  report("SemEval layout accepted", semeval_layout);
  report("end-to-end pipeline", end_to_end);
  std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAIL")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
