#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "nws/nws.hpp"

namespace nws::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string embeddings;
  std::string embedding_cache;
  std::string corpus;
  std::vector<std::string> datasets;
  std::string scheme = "nws";
  std::string salience;
  std::string ratings;
  std::string out;
  std::string loss_log;
  std::string checkpoint;
  std::string resume;
  std::string compare;
  std::string isf_source = "corpus";
  bool print_ingest_report = false;
  TrainConfig train;
};

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw InputError(std::string("missing --") + what);
  if (!fs::is_regular_file(path)) throw InputError(std::string(what) + " file not found: " + path);
}

Embeddings load_embeddings_for(const Options& opt) {
  require_file(opt.embeddings, "embeddings");
  if (!opt.embedding_cache.empty()) return load_embeddings_cached(opt.embeddings, opt.embedding_cache);
  return load_embeddings(fs::path(opt.embeddings));
}

InputRecord input_record(std::string name, const std::string& path) {
  return {std::move(name), path, file_checksum(path)};
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("cannot write " + path);
  f << contents;
  if (!f) throw InputError("failed writing " + path);
}

std::vector<std::pair<std::string, std::string>> train_config_fields(const TrainConfig& c) {
  return {{"k", std::to_string(c.k)},
          {"negatives_per_anchor", std::to_string(c.negatives_per_anchor)},
          {"epochs", std::to_string(c.epochs)},
          {"lr", format_double(c.learning_rate)},
          {"adagrad_epsilon", format_double(c.adagrad_epsilon)},
          {"multiset", c.multiset ? "true" : "false"},
          {"gradient_clip", format_double(c.gradient_clip)},
          {"weight_decay", format_double(c.weight_decay)}};
}

unsigned eval_threads() {
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("NWS_THREADS")) {
    const auto cap = std::strtoul(env, nullptr, 10);
    if (cap >= 1) threads = std::min<unsigned>(threads, static_cast<unsigned>(cap));
  }
  return threads;
}

std::string fixed(double v, int precision = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

std::string maybe_fixed(double v) { return std::isnan(v) ? "n/a" : fixed(v); }

// --- train -----------------------------------------------------------------

int cmd_train(const Options& opt, std::ostream& out) {
  require_file(opt.corpus, "corpus");
  if (opt.out.empty()) throw InputError("missing --out");
  if (!opt.resume.empty()) require_file(opt.resume, "resume");
  opt.train.validate();

  const auto emb = load_embeddings_for(opt);
  const auto ingested = ingest_corpus(fs::path(opt.corpus), emb.vocab);
  if (opt.print_ingest_report) ingested.report.write(out);

  ScoreFileHeader header;
  header.dim = emb.table.dim();
  header.vocab_size = emb.vocab.size();
  header.seed = opt.train.seed;
  header.kind = SchemeKind::NWS;
  header.command = "train";
  header.config = train_config_fields(opt.train);
  header.inputs = {input_record("embeddings", opt.embeddings), input_record("corpus", opt.corpus)};
  if (!opt.resume.empty()) header.inputs.push_back(input_record("resume", opt.resume));

  std::ostringstream loss_log;
  write_header(loss_log, header);
  loss_log << "epoch\tmean_loss\n";

  const auto on_epoch = [&](const EpochStats& stats, const SalienceTable& table) {
    loss_log << stats.epoch << '\t' << format_double(stats.mean_loss) << '\n';
    out << "epoch " << stats.epoch << " instances=" << stats.instances
        << " mean_loss=" << format_double(stats.mean_loss) << '\n';
    if (!opt.checkpoint.empty()) {
      auto ck = header;
      ck.checkpoint_epoch = stats.epoch;
      std::ostringstream buf;
      write_score_file(buf, ck, emb.vocab, table.q, table.accumulator);
      write_file(opt.checkpoint, buf.str());
    }
  };

  TrainResult result;
  if (opt.resume.empty()) {
    result = train(ingested.corpus, emb.table, opt.train, on_epoch);
  } else {
    auto start = to_salience_table(read_score_file(fs::path(opt.resume)), emb.vocab);
    result = train(ingested.corpus, emb.table, opt.train, std::move(start), on_epoch);
  }

  std::ostringstream tsv;
  write_score_file(tsv, header, emb.vocab, result.salience.q);
  write_file(opt.out, tsv.str());
  write_file(opt.loss_log.empty() ? opt.out + ".loss" : opt.loss_log, loss_log.str());
  return kExitOk;
}

// --- isf / export ------------------------------------------------------------

int write_scheme(const Options& opt, const Embeddings& emb, const WeightingScheme& scheme,
                 std::vector<InputRecord> inputs, std::string command,
                 std::vector<std::pair<std::string, std::string>> config) {
  if (opt.out.empty()) throw InputError("missing --out");
  ScoreFileHeader header;
  header.dim = emb.table.dim();
  header.vocab_size = emb.vocab.size();
  header.seed = opt.train.seed;
  header.kind = scheme.kind;
  header.command = std::move(command);
  header.config = std::move(config);
  header.inputs = std::move(inputs);
  std::ostringstream tsv;
  write_score_file(tsv, header, emb.vocab, scheme.scores);
  write_file(opt.out, tsv.str());
  return kExitOk;
}

int cmd_isf(const Options& opt, std::ostream& out) {
  require_file(opt.corpus, "corpus");
  const auto emb = load_embeddings_for(opt);
  const auto ingested = ingest_corpus(fs::path(opt.corpus), emb.vocab);
  if (opt.print_ingest_report) ingested.report.write(out);
  return write_scheme(opt, emb, isf_scheme(ingested.corpus),
                      {input_record("embeddings", opt.embeddings), input_record("corpus", opt.corpus)},
                      "isf", {{"isf_source", "corpus"}});
}

int cmd_export(const Options& opt, std::ostream&) {
  const auto emb = load_embeddings_for(opt);
  std::vector<InputRecord> inputs{input_record("embeddings", opt.embeddings)};
  WeightingScheme scheme;
  if (opt.scheme == "nws") {
    require_file(opt.salience, "salience");
    scheme = to_scheme(read_score_file(fs::path(opt.salience)), emb.vocab);
    scheme.kind = SchemeKind::NWS;
    if (std::any_of(scheme.scores.begin(), scheme.scores.end(), [](double v) { return std::isnan(v); })) {
      throw InputError("salience file does not cover the embedding vocabulary");
    }
    inputs.push_back(input_record("salience", opt.salience));
  } else if (opt.scheme == "avg") {
    scheme = avg_scheme(emb.vocab.size());
  } else {
    require_file(opt.corpus, "corpus");
    scheme = isf_scheme(ingest_corpus(fs::path(opt.corpus), emb.vocab).corpus);
    inputs.push_back(input_record("corpus", opt.corpus));
  }
  return write_scheme(opt, emb, scheme, std::move(inputs), "export", {{"scheme", opt.scheme}});
}

// --- eval-sts -------------------------------------------------------------

struct DatasetResult {
  StsDataset dataset;
  CorrelationReport report;
  std::optional<CorrelationReport> compare;
};

int cmd_eval_sts(const Options& opt, std::ostream& out) {
  if (opt.datasets.empty()) throw InputError("missing --dataset");
  const auto emb = load_embeddings_for(opt);
  const EvalOptions eval{opt.train.multiset, eval_threads()};

  std::vector<InputRecord> inputs{input_record("embeddings", opt.embeddings)};
  std::optional<WeightingScheme> fixed_scheme;
  if (opt.scheme == "nws" || (opt.scheme == "isf" && !opt.salience.empty())) {
    require_file(opt.salience, "salience");
    fixed_scheme = to_scheme(read_score_file(fs::path(opt.salience)), emb.vocab);
    inputs.push_back(input_record("salience", opt.salience));
  } else if (opt.scheme == "avg") {
    fixed_scheme = avg_scheme(emb.vocab.size());
  } else if (opt.isf_source == "corpus") {
    require_file(opt.corpus, "corpus");
    fixed_scheme = isf_scheme(ingest_corpus(fs::path(opt.corpus), emb.vocab).corpus);
    inputs.push_back(input_record("corpus", opt.corpus));
  }

  std::optional<WeightingScheme> compare_scheme;
  if (!opt.compare.empty()) {
    require_file(opt.compare, "compare");
    compare_scheme = to_scheme(read_score_file(fs::path(opt.compare)), emb.vocab);
    inputs.push_back(input_record("compare", opt.compare));
  }

  std::vector<DatasetResult> results;
  for (const auto& spec : opt.datasets) {
    DatasetResult res{load_sts_dataset(spec), {}, std::nullopt};
    const auto scheme =
        fixed_scheme ? *fixed_scheme : isf_scheme_from_pairs(res.dataset.pairs, emb.vocab);
    res.report = evaluate_sts(res.dataset.pairs, scheme, emb.table, emb.vocab, eval);
    if (compare_scheme) {
      res.compare = evaluate_sts(res.dataset.pairs, *compare_scheme, emb.table, emb.vocab, eval);
    }
    results.push_back(std::move(res));
  }

  std::ostringstream rep;
  rep << std::left << std::setw(20) << "dataset" << std::right << std::setw(9) << "r"
      << std::setw(7) << "n" << std::setw(10) << "ci_low" << std::setw(10) << "ci_high"
      << std::setw(9) << "skipped" << std::setw(11) << "malformed" << '\n';
  CompensatedSum r_sum;
  for (const auto& res : results) {
    const auto& r = res.report;
    rep << std::left << std::setw(20) << res.dataset.name << std::right << std::setw(9)
        << fixed(r.r) << std::setw(7) << r.n << std::setw(10) << maybe_fixed(r.ci_low)
        << std::setw(10) << maybe_fixed(r.ci_high) << std::setw(9) << r.skipped_pairs
        << std::setw(11) << res.dataset.malformed_lines << '\n';
    r_sum.add(r.r);
  }
  const double overall = r_sum.value() / static_cast<double>(results.size());
  rep << std::left << std::setw(20) << "Overall Average" << std::right << std::setw(9)
      << fixed(overall) << '\n';

  if (compare_scheme) {
    rep << '\n'
        << std::left << std::setw(20) << "dataset" << std::right << std::setw(9) << "r"
        << std::setw(10) << "r_compare" << std::setw(9) << "z" << std::setw(13) << "significant"
        << std::setw(12) << "ci_overlap" << '\n';
  }
  std::ostringstream kv;
  for (const auto& res : results) {
    const auto& r = res.report;
    const std::string key = "sts." + res.dataset.name + ".";
    kv << key << "r: " << format_double(r.r) << '\n'
       << key << "n: " << r.n << '\n'
       << key << "fisher: " << format_double(r.fisher) << '\n'
       << key << "ci_low: " << format_double(r.ci_low) << '\n'
       << key << "ci_high: " << format_double(r.ci_high) << '\n'
       << key << "skipped: " << r.skipped_pairs << '\n'
       << key << "degenerate: " << r.degenerate_vectors << '\n'
       << key << "malformed: " << res.dataset.malformed_lines << '\n'
       << key << "unannotated: " << res.dataset.unannotated << '\n';
    if (res.compare) {
      const auto& c = *res.compare;
      const std::string ckey = "compare." + res.dataset.name + ".";
      kv << ckey << "r: " << format_double(c.r) << '\n' << ckey << "n: " << c.n << '\n';
      rep << std::left << std::setw(20) << res.dataset.name << std::right << std::setw(9)
          << fixed(r.r) << std::setw(10) << fixed(c.r);
      try {
        const auto sig = significance(r.r, r.n, c.r, c.n);
        kv << ckey << "z: " << format_double(sig.z) << '\n'
           << ckey << "significant_at_05: " << (sig.significant_at_05 ? "true" : "false") << '\n'
           << ckey << "ci_overlap: " << (sig.intervals_overlap ? "true" : "false") << '\n';
        rep << std::setw(9) << fixed(sig.z, 3) << std::setw(13)
            << (sig.significant_at_05 ? "yes" : "no") << std::setw(12)
            << (sig.intervals_overlap ? "yes" : "no") << '\n';
      } catch (const Error& e) {
        kv << ckey << "z: n/a\n";
        rep << "  n/a (" << e.what() << ")\n";
      }
    }
  }
  kv << "sts.overall_average.r: " << format_double(overall) << '\n';

  out << rep.str() << '\n' << kv.str();
  if (!opt.out.empty()) {
    ScoreFileHeader header;
    header.dim = emb.table.dim();
    header.vocab_size = emb.vocab.size();
    header.kind = fixed_scheme ? fixed_scheme->kind : SchemeKind::ISF;
    header.command = "eval-sts";
    header.config = {{"scheme", opt.scheme}, {"isf_source", opt.isf_source},
                     {"multiset", opt.train.multiset ? "true" : "false"}};
    for (const auto& spec : opt.datasets) {
      for (const auto& part : split_on(spec, ',')) {
        if (fs::is_regular_file(std::string(part))) {
          inputs.push_back(input_record("dataset", std::string(part)));
        }
      }
    }
    header.inputs = inputs;
    std::ostringstream file;
    write_header(file, header);
    file << rep.str() << '\n' << kv.str();
    write_file(opt.out, file.str());
  }
  return kExitOk;
}

// --- psych-corr ------------------------------------------------------------

int cmd_psych_corr(const Options& opt, std::ostream& out) {
  require_file(opt.salience, "salience");
  require_file(opt.ratings, "ratings");
  const auto scores = read_score_file(fs::path(opt.salience));
  const auto ratings = read_psych_csv(fs::path(opt.ratings));
  const auto results = psych_correlation(scores.as_map(), ratings);

  std::ostringstream rep, kv;
  rep << std::left << std::setw(14) << "dimension" << std::right << std::setw(9) << "r"
      << std::setw(7) << "n" << std::setw(10) << "ci_low" << std::setw(10) << "ci_high" << '\n';
  bool any_ok = false;
  for (const auto& res : results) {
    const std::string name(to_string(res.dimension));
    rep << std::left << std::setw(14) << name << std::right;
    if (res.status == DimensionCorrelation::Status::Ok) {
      any_ok = true;
      const auto& r = res.report;
      rep << std::setw(9) << fixed(r.r) << std::setw(7) << r.n << std::setw(10)
          << maybe_fixed(r.ci_low) << std::setw(10) << maybe_fixed(r.ci_high) << '\n';
      kv << "psych." << name << ".r: " << format_double(r.r) << '\n'
         << "psych." << name << ".n: " << r.n << '\n'
         << "psych." << name << ".ci_low: " << format_double(r.ci_low) << '\n'
         << "psych." << name << ".ci_high: " << format_double(r.ci_high) << '\n';
    } else {
      rep << "  " << res.message << '\n';
      kv << "psych." << name << ".status: " << res.message << '\n';
    }
  }
  out << rep.str() << '\n' << kv.str();
  if (!opt.out.empty()) {
    ScoreFileHeader header;
    header.dim = scores.header.dim;
    header.vocab_size = scores.words.size();
    header.seed = scores.header.seed;
    header.kind = scores.header.kind;
    header.command = "psych-corr";
    header.inputs = {input_record("salience", opt.salience), input_record("ratings", opt.ratings)};
    std::ostringstream file;
    write_header(file, header);
    file << rep.str() << '\n' << kv.str();
    write_file(opt.out, file.str());
  }
  return any_ok ? kExitOk : kExitInput;
}

void add_embedding_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--embeddings", opt.embeddings, "Pre-trained word vectors (word v1 ... vd per line)")
      ->required();
  cmd->add_option("--embedding-cache", opt.embedding_cache,
                  "Binary cache file, rebuilt when the embedding file changes");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Neural word salience: train, export and evaluate word salience scores"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "nws 1.0");

  auto* train_cmd = app.add_subcommand("train", "Learn salience scores from a sentence-ordered corpus");
  add_embedding_flags(train_cmd, opt);
  train_cmd->add_option("--corpus", opt.corpus, "One sentence per line, blank line between documents")
      ->required();
  train_cmd->add_option("--out", opt.out, "Salience TSV to write")->required();
  train_cmd->add_option("--loss-log", opt.loss_log, "Per-epoch loss log (default: <out>.loss)");
  train_cmd->add_option("--checkpoint", opt.checkpoint, "Checkpoint rewritten after every epoch");
  train_cmd->add_option("--resume", opt.resume, "Continue from a checkpoint");
  train_cmd->add_option("--seed", opt.train.seed, "Random seed")->capture_default_str();
  train_cmd->add_option("--k", opt.train.k, "Noise-set size (1-10)")->capture_default_str();
  train_cmd->add_option("--epochs", opt.train.epochs, "Number of epochs")->capture_default_str();
  train_cmd->add_option("--lr", opt.train.learning_rate, "Initial learning rate")->capture_default_str();
  train_cmd->add_option("--epsilon", opt.train.adagrad_epsilon, "AdaGrad stabiliser")
      ->capture_default_str();
  train_cmd->add_option("--negatives-per-anchor", opt.train.negatives_per_anchor,
                        "Random non-adjacent pairs per anchor sentence")
      ->capture_default_str();
  train_cmd->add_option("--gradient-clip", opt.train.gradient_clip, "Clip |g| (0 = off)")
      ->capture_default_str();
  train_cmd->add_option("--weight-decay", opt.train.weight_decay, "L2 penalty (0 = off)")
      ->capture_default_str();
  train_cmd->add_flag("--multiset", opt.train.multiset, "Count repeated words");
  train_cmd->add_flag("--report", opt.print_ingest_report, "Print the corpus ingestion report");

  auto* isf_cmd = app.add_subcommand("isf", "Compute inverse sentence frequency scores");
  add_embedding_flags(isf_cmd, opt);
  isf_cmd->add_option("--corpus", opt.corpus, "Corpus file")->required();
  isf_cmd->add_option("--out", opt.out, "ISF TSV to write")->required();
  isf_cmd->add_flag("--report", opt.print_ingest_report, "Print the corpus ingestion report");

  auto* export_cmd = app.add_subcommand("export", "Write a weighting scheme in the shared TSV format");
  add_embedding_flags(export_cmd, opt);
  export_cmd->add_option("--scheme", opt.scheme, "nws, avg or isf")
      ->check(CLI::IsMember({"nws", "avg", "isf"}))
      ->capture_default_str();
  export_cmd->add_option("--salience", opt.salience, "Salience TSV or checkpoint (scheme nws)");
  export_cmd->add_option("--corpus", opt.corpus, "Corpus file (scheme isf)");
  export_cmd->add_option("--out", opt.out, "TSV to write")->required();

  auto* eval_cmd = app.add_subcommand("eval-sts", "Correlate sentence similarities with STS gold scores");
  add_embedding_flags(eval_cmd, opt);
  eval_cmd->add_option("--dataset", opt.datasets,
                       "a<TAB>b<TAB>gold TSV, 'input,gold' pair, or SemEval STS.input.*.txt")
      ->required();
  eval_cmd->add_option("--scheme", opt.scheme, "nws, avg or isf")
      ->check(CLI::IsMember({"nws", "avg", "isf"}))
      ->capture_default_str();
  eval_cmd->add_option("--salience", opt.salience, "Score TSV for scheme nws (or a precomputed isf)");
  eval_cmd->add_option("--corpus", opt.corpus, "Corpus for --isf-source corpus");
  eval_cmd->add_option("--isf-source", opt.isf_source, "corpus or dataset")
      ->check(CLI::IsMember({"corpus", "dataset"}))
      ->capture_default_str();
  eval_cmd->add_option("--compare", opt.compare, "Second score TSV for a significance test");
  eval_cmd->add_option("--out", opt.out, "Also write the report here");
  eval_cmd->add_flag("--multiset", opt.train.multiset, "Count repeated words");

  auto* psych_cmd = app.add_subcommand("psych-corr", "Correlate salience with psycholinguistic ratings");
  psych_cmd->add_option("--salience", opt.salience, "Score TSV")->required();
  psych_cmd->add_option("--ratings", opt.ratings,
                        "CSV: word,arousal,valence,dominance,concreteness,imageability")
      ->required();
  psych_cmd->add_option("--out", opt.out, "Also write the report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInput;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(opt, out);
    if (isf_cmd->parsed()) return cmd_isf(opt, out);
    if (export_cmd->parsed()) return cmd_export(opt, out);
    if (eval_cmd->parsed()) return cmd_eval_sts(opt, out);
    if (psych_cmd->parsed()) return cmd_psych_corr(opt, out);
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace nws::cli
