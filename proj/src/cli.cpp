#include "relmerge/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "relmerge/error.hpp"
#include "relmerge/evaluate.hpp"
#include "relmerge/formats.hpp"
#include "relmerge/harmonize.hpp"
#include "relmerge/instances.hpp"

namespace relmerge {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return buf.str();
}

void write_file_atomic(const std::string& path, std::string_view content) {
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw IoError("cannot write " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw IoError("cannot rename " + tmp.string() + " to " + path + ": " +
                  ec.message());
  }
}

namespace {

// Document ids from a harmonized corpus, a PubTator file, or a plain list
// with one id per line.
std::vector<std::string> read_doc_ids(const std::string& content) {
  std::vector<std::string> ids;
  auto first = content.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && content[first] == '{') {
    for (const auto& hd : parse_harmonized(content).documents) ids.push_back(hd.doc.id);
    return ids;
  }
  if (content.find("|t|") != std::string::npos) {
    for (const auto& doc : parse_pubtator(content)) ids.push_back(doc.id);
    return ids;
  }
  for (auto line : split_lines(content)) {
    if (line.empty() || line.front() == '#') continue;
    ids.emplace_back(line);
  }
  return ids;
}

std::vector<double> read_numbers(const std::string& path) {
  std::vector<double> values;
  auto lines = split_lines(read_file(path));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto line = lines[i];
    if (line.empty() || line.front() == '#') continue;
    try {
      std::size_t used = 0;
      const std::string s(line);
      values.push_back(std::stod(s, &used));
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw ParseError(i + 1, path + ": not a number: '" + std::string(line) + "'");
    }
  }
  return values;
}

std::string join_lines(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += s + '\n';
  return out;
}

struct Options {
  std::string input;
  std::vector<std::string> inputs;
  std::string profile;
  std::string repository;
  std::string annotations;
  std::string lexicon;
  std::string out;
  std::string report;
  std::string gold;
  std::string pred;
  std::string corpus_tag;
  std::string xs;
  std::string ys;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  double fraction = 0.0;
  std::size_t count = 0;
  unsigned threads = 1;
};

int cmd_harmonize(const Options& o, std::ostream& out) {
  const auto profile = parse_profile(read_file(o.profile));
  const auto docs = parse_pubtator(read_file(o.input));

  AnnotationIndex auto_annotations;
  Lexicon lexicon;
  HarmonizeOptions options;
  options.threads = o.threads;
  if (!o.annotations.empty()) {
    auto_annotations = parse_annotations(read_file(o.annotations));
    options.annotations.auto_annotations = &auto_annotations;
  }
  if (!o.lexicon.empty()) {
    lexicon = Lexicon::parse(read_file(o.lexicon));
    options.annotations.lexicon = &lexicon;
  }
  std::vector<RepositoryRecord> records;
  if (!o.repository.empty()) {
    if (profile.allowed_pairs.size() != 1) {
      throw ConfigError("a repository needs a profile with exactly one allowed pair");
    }
    const auto& kinds = *profile.allowed_pairs.begin();
    records = parse_repository(read_file(o.repository),
                               {EntityType(kinds.first), EntityType(kinds.second)});
    options.repository = &records;
  }

  const auto result = harmonize_corpus(docs, profile, options);
  write_file_atomic(o.out, write_harmonized(result.corpus));
  if (!o.report.empty()) write_file_atomic(o.report, write_report(result.report));
  out << profile.name << ": " << result.corpus.documents.size() << " documents, "
      << result.corpus.pair_count() << " labeled pairs, " << result.drop_count()
      << " relations dropped\n";
  return kExitOk;
}

int cmd_merge(const Options& o, std::ostream& out) {
  std::vector<HarmonizedCorpus> corpora;
  for (const auto& path : o.inputs) corpora.push_back(parse_harmonized(read_file(path)));
  const auto merged = merge_corpora(corpora);
  write_file_atomic(o.out, write_harmonized(merged));
  out << merged.corpus_tag << ": " << merged.documents.size() << " documents, "
      << merged.pair_count() << " labeled pairs\n";
  return kExitOk;
}

int cmd_instances(const Options& o, std::ostream& out) {
  const auto corpus = parse_harmonized(read_file(o.input));
  InstanceOptions options;
  options.threads = o.threads;
  if (!o.corpus_tag.empty()) options.corpus_tag = o.corpus_tag;
  const auto instances = generate_instances(corpus, options);
  std::ostringstream buf;
  write_instances(instances, buf);
  write_file_atomic(o.out, buf.str());
  if (!o.gold.empty()) write_file_atomic(o.gold, write_tuples(gold_tuples(instances)));
  out << instances.size() << " instances\n";
  return kExitOk;
}

int cmd_split(const Options& o, std::ostream& out) {
  const auto ids = read_doc_ids(read_file(o.input));
  const auto folds = kfold_split(ids, o.k, o.seed);
  std::error_code ec;
  fs::create_directories(o.out, ec);
  if (ec) throw IoError("cannot create directory " + o.out + ": " + ec.message());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    char name[32];
    std::snprintf(name, sizeof name, "fold_%02zu.txt", f);
    write_file_atomic((fs::path(o.out) / name).string(), join_lines(folds[f]));
  }
  out << folds.size() << " folds over " << ids.size() << " documents\n";
  return kExitOk;
}

int cmd_subsample(const Options& o, std::ostream& out) {
  const auto ids = read_doc_ids(read_file(o.input));
  const auto sample = o.count > 0 ? subsample(ids, o.count, o.seed)
                                  : subsample_fraction(ids, o.fraction, o.seed);
  write_file_atomic(o.out, join_lines(sample));
  out << sample.size() << " of " << ids.size() << " documents\n";
  return kExitOk;
}

int cmd_score(const Options& o, std::ostream& out) {
  const auto gold = parse_tuples(read_file(o.gold));
  const auto pred = parse_tuples(read_file(o.pred));
  const auto report = score(gold, pred);
  out << format_report(report);
  if (!o.report.empty()) {
    nlohmann::ordered_json j;
    auto counts = [](const EvalCounts& c) {
      nlohmann::ordered_json r;
      r["tp"] = c.true_positives;
      r["fp"] = c.false_positives;
      r["fn"] = c.false_negatives;
      r["precision"] = c.precision;
      r["recall"] = c.recall;
      r["f1"] = c.f1;
      r["precision_undefined"] = c.precision_undefined;
      return r;
    };
    j["micro"] = counts(report.micro);
    j["per_pair_type"] = nlohmann::ordered_json::object();
    for (const auto& [key, c] : report.per_pair_type) j["per_pair_type"][key] = counts(c);
    write_file_atomic(o.report, j.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_stats(const Options& o, std::ostream& out) {
  const auto content = read_file(o.input);
  std::vector<CorpusStats> stats;
  auto first = content.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && content[first] == '{') {
    stats = corpus_stats(parse_harmonized(content));
  } else {
    stats.push_back(corpus_stats(parse_pubtator(content),
                                 o.corpus_tag.empty() ? fs::path(o.input).stem().string()
                                                      : o.corpus_tag));
  }
  out << format_stats(stats);
  if (!o.out.empty()) write_file_atomic(o.out, stats_json(stats));
  return kExitOk;
}

int cmd_baseline(const Options& o, std::ostream& out) {
  const auto instances = parse_instances(read_file(o.input));
  const auto predictions = baseline_predict(instances);
  write_file_atomic(o.out, write_tuples(predictions));
  out << predictions.size() << " predictions\n";
  return kExitOk;
}

int cmd_ttest(const Options& o, std::ostream& out) {
  const auto r = paired_t_test(read_numbers(o.xs), read_numbers(o.ys));
  out.precision(10);
  out << "t=" << r.t << " df=" << r.df << " p=" << r.p;
  if (r.degenerate_variance) out << " (degenerate variance)";
  out << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Harmonize biomedical relation extraction corpora and evaluate models",
               "relmerge"};
  app.require_subcommand(1);
  Options o;

  auto* harmonize = app.add_subcommand("harmonize", "Adjust one corpus under its profile");
  harmonize->add_option("--profile", o.profile, "Corpus profile (JSON)")->required();
  harmonize->add_option("--input", o.input, "PubTator-style corpus")->required();
  harmonize->add_option("--repository", o.repository,
                        "Span-less relation triples attached to --input texts");
  harmonize->add_option("--annotations", o.annotations, "Auto annotations (PubTator lines)");
  harmonize->add_option("--lexicon", o.lexicon, "Lexicon for dictionary matching");
  harmonize->add_option("--out", o.out, "Harmonized corpus output")->required();
  harmonize->add_option("--report", o.report, "Drop report output (JSON lines)");
  harmonize->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* merge = app.add_subcommand("merge", "Merge harmonized corpora");
  merge->add_option("--input", o.inputs, "Harmonized corpora, repeatable")->required();
  merge->add_option("--out", o.out, "Merged corpus output")->required();

  auto* instances = app.add_subcommand("instances", "Generate candidate instances");
  instances->add_option("--input", o.input, "Harmonized corpus")->required();
  instances->add_option("--out", o.out, "Instance file output (JSON lines)")->required();
  instances->add_option("--gold", o.gold, "Also write gold tuples");
  instances->add_option("--corpus-tag", o.corpus_tag, "Corpus name used in prompts");
  instances->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* split_cmd = app.add_subcommand("split", "Seeded k-fold split of document ids");
  split_cmd->add_option("--input", o.input, "Id list, PubTator or harmonized corpus")
      ->required();
  split_cmd->add_option("--k", o.k, "Number of folds")->required();
  split_cmd->add_option("--seed", o.seed, "Shuffle seed")->required();
  split_cmd->add_option("--out", o.out, "Output directory")->required();

  auto* sample = app.add_subcommand("subsample", "Seeded sample of document ids");
  sample->add_option("--input", o.input, "Id list, PubTator or harmonized corpus")
      ->required();
  auto* fraction = sample->add_option("--fraction", o.fraction, "Fraction in (0, 1]");
  auto* count = sample->add_option("--count", o.count, "Number of documents");
  fraction->excludes(count);
  sample->add_option("--seed", o.seed, "Sampling seed")->required();
  sample->add_option("--out", o.out, "Output id list")->required();

  auto* score_cmd = app.add_subcommand("score", "Micro P/R/F of predictions");
  score_cmd->add_option("--gold", o.gold, "Gold tuples")->required();
  score_cmd->add_option("--pred", o.pred, "Predicted tuples")->required();
  score_cmd->add_option("--report", o.report, "Write the scores as JSON");

  auto* stats = app.add_subcommand("stats", "Corpus statistics");
  stats->add_option("--input", o.input, "Harmonized corpus or PubTator corpus")->required();
  stats->add_option("--out", o.out, "Write the statistics as JSON");
  stats->add_option("--corpus-tag", o.corpus_tag, "Name for a PubTator corpus");

  auto* baseline = app.add_subcommand("baseline", "Co-occurrence baseline predictions");
  baseline->add_option("--input", o.input, "Instance file")->required();
  baseline->add_option("--out", o.out, "Predicted tuples output")->required();

  auto* ttest = app.add_subcommand("ttest", "Paired t-test on two score lists");
  ttest->add_option("--xs", o.xs, "First sample, one value per line")->required();
  ttest->add_option("--ys", o.ys, "Second sample, one value per line")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (sample->parsed() && o.count == 0 && o.fraction == 0.0) {
      throw CLI::ValidationError("subsample needs --fraction or --count");
    }
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitInvalid;
  }

  try {
    if (harmonize->parsed()) return cmd_harmonize(o, out);
    if (merge->parsed()) return cmd_merge(o, out);
    if (instances->parsed()) return cmd_instances(o, out);
    if (split_cmd->parsed()) return cmd_split(o, out);
    if (sample->parsed()) return cmd_subsample(o, out);
    if (score_cmd->parsed()) return cmd_score(o, out);
    if (stats->parsed()) return cmd_stats(o, out);
    if (baseline->parsed()) return cmd_baseline(o, out);
    if (ttest->parsed()) return cmd_ttest(o, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace relmerge
