#include "relmerge/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "relmerge/error.hpp"
#include "relmerge/formats.hpp"
#include "relmerge/instances.hpp"
#include "relmerge/textspan.hpp"

namespace relmerge {

// ---------------------------------------------------------------------------
// Scoring

namespace {

std::string tuple_type_key(const RelationTuple& t) {
  return pair_type_key(t.pair.first.type, t.pair.second.type);
}

std::set<RelationTuple> positive_set(std::span<const RelationTuple> tuples,
                                     std::string_view side) {
  std::set<RelationTuple> seen;
  std::set<RelationTuple> out;
  for (const auto& t : tuples) {
    if (!seen.insert(t).second) {
      throw ValidationError(std::string(side) + " repeats tuple " + t.doc_id + " " +
                            t.pair.first.id + "|" + t.pair.second.id + " " +
                            t.label.render());
    }
    if (!t.label.is_negative()) out.insert(t);
  }
  return out;
}

void finalize(EvalCounts& c) {
  const std::size_t predicted = c.true_positives + c.false_positives;
  const std::size_t actual = c.true_positives + c.false_negatives;
  c.precision_undefined = predicted == 0;
  c.recall_undefined = actual == 0;
  c.precision = predicted == 0 ? 0.0
                               : static_cast<double>(c.true_positives) /
                                     static_cast<double>(predicted);
  c.recall = actual == 0 ? 0.0
                         : static_cast<double>(c.true_positives) /
                               static_cast<double>(actual);
  const double sum = c.precision + c.recall;
  c.f1 = sum == 0.0 ? 0.0 : 2.0 * c.precision * c.recall / sum;
}

}  // namespace

EvalReport score(std::span<const RelationTuple> gold,
                 std::span<const RelationTuple> pred) {
  const auto g = positive_set(gold, "gold");
  const auto p = positive_set(pred, "prediction");
  EvalReport report;
  for (const auto& t : g) {
    auto& bucket = report.per_pair_type[tuple_type_key(t)];
    if (p.contains(t)) {
      ++report.micro.true_positives;
      ++bucket.true_positives;
    } else {
      ++report.micro.false_negatives;
      ++bucket.false_negatives;
    }
  }
  for (const auto& t : p) {
    if (g.contains(t)) continue;
    ++report.micro.false_positives;
    ++report.per_pair_type[tuple_type_key(t)].false_positives;
  }
  finalize(report.micro);
  for (auto& [key, counts] : report.per_pair_type) finalize(counts);
  return report;
}

std::vector<RelationTuple> parse_tuples(std::string_view input) {
  std::vector<RelationTuple> out;
  auto lines = split_lines(input);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    auto line = lines[i];
    if (line.empty() || line.front() == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() != 6) {
      throw ParseError(lineno, "expected 6 tab-separated columns, got " +
                                   std::to_string(cols.size()));
    }
    try {
      if (cols[0].empty() || cols[1].empty() || cols[3].empty()) {
        throw ValidationError("empty document or concept id");
      }
      out.push_back(RelationTuple{
          std::string(cols[0]),
          canonicalize_pair({std::string(cols[1]), EntityType::parse(cols[2])},
                            {std::string(cols[3]), EntityType::parse(cols[4])}),
          RelationLabel::parse(cols[5])});
    } catch (const ValidationError& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return out;
}

std::string write_tuples(std::span<const RelationTuple> tuples) {
  std::string out;
  for (const auto& t : tuples) {
    out += t.doc_id + '\t' + t.pair.first.id + '\t' + t.pair.first.type.render() +
           '\t' + t.pair.second.id + '\t' + t.pair.second.type.render() + '\t' +
           t.label.render() + '\n';
  }
  return out;
}

std::vector<RelationTuple> gold_tuples(std::span<const CandidateInstance> instances) {
  std::vector<RelationTuple> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) {
    out.push_back(RelationTuple{inst.doc_id, inst.pair, inst.label});
  }
  return out;
}

std::string format_report(const EvalReport& report) {
  std::ostringstream out;
  auto row = [&](const std::string& name, const EvalCounts& c) {
    out << std::left << std::setw(28) << name << std::right << std::setw(7)
        << c.true_positives << std::setw(7) << c.false_positives << std::setw(7)
        << c.false_negatives << std::fixed << std::setprecision(3) << std::setw(8)
        << c.precision << std::setw(8) << c.recall << std::setw(8) << c.f1;
    if (c.precision_undefined) out << "  (no predictions)";
    out << '\n';
  };
  out << std::left << std::setw(28) << "pair type" << std::right << std::setw(7)
      << "TP" << std::setw(7) << "FP" << std::setw(7) << "FN" << std::setw(8) << "P"
      << std::setw(8) << "R" << std::setw(8) << "F" << '\n';
  for (const auto& [key, counts] : report.per_pair_type) row(key, counts);
  row("micro", report.micro);
  out << "P=" << std::fixed << std::setprecision(3) << report.micro.precision
      << " R=" << report.micro.recall << " F=" << report.micro.f1 << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Significance

namespace {

// Continued fraction for I_x(a, b), modified Lentz evaluation.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEpsilon = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEpsilon) return h;
  }
  throw Error("incomplete beta continued fraction did not converge");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
    throw ValidationError("incomplete beta requires a, b > 0 and x in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_tailed(double t, double df) {
  if (!(df > 0.0)) throw ValidationError("degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return regularized_incomplete_beta(df / 2.0, 0.5, x);
}

TTestResult paired_t_test(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw ValidationError("paired samples differ in length: " +
                          std::to_string(xs.size()) + " vs " +
                          std::to_string(ys.size()));
  }
  const std::size_t n = xs.size();
  if (n < 2) throw ValidationError("paired t-test needs at least two pairs");

  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = xs[i] - ys[i];
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  TTestResult r;
  r.df = n - 1;
  const bool all_zero = std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; });
  if (all_zero) return r;
  if (sd == 0.0) {
    r.t = mean > 0 ? std::numeric_limits<double>::infinity()
                   : -std::numeric_limits<double>::infinity();
    r.p = 0.0;
    r.degenerate_variance = true;
    return r;
  }
  r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  r.p = student_t_two_tailed(r.t, static_cast<double>(r.df));
  return r;
}

// ---------------------------------------------------------------------------
// Sampling

std::uint64_t SeededRng::below(std::uint64_t bound) {
  if (bound == 0) throw ValidationError("bound must be positive");
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % bound;
}

namespace {

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  SeededRng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(idx[i - 1], idx[rng.below(i)]);
  }
  return idx;
}

}  // namespace

std::vector<std::vector<std::string>> kfold_split(const std::vector<std::string>& ids,
                                                  std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("k must be at least 2");
  if (k > ids.size()) {
    throw ValidationError("k = " + std::to_string(k) + " exceeds the " +
                          std::to_string(ids.size()) + " documents available");
  }
  const auto order = shuffled_indices(ids.size(), seed);
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t j = 0; j < order.size(); ++j) folds[j % k].push_back(order[j]);
  std::vector<std::vector<std::string>> out(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::sort(folds[f].begin(), folds[f].end());
    for (auto i : folds[f]) out[f].push_back(ids[i]);
  }
  return out;
}

std::vector<std::string> subsample(const std::vector<std::string>& ids,
                                   std::size_t count, std::uint64_t seed) {
  if (count == 0 || count > ids.size()) {
    throw ValidationError("sample size " + std::to_string(count) +
                          " outside [1, " + std::to_string(ids.size()) + "]");
  }
  auto order = shuffled_indices(ids.size(), seed);
  order.resize(count);
  std::sort(order.begin(), order.end());
  std::vector<std::string> out;
  out.reserve(count);
  for (auto i : order) out.push_back(ids[i]);
  return out;
}

std::vector<std::string> subsample_fraction(const std::vector<std::string>& ids,
                                            double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ValidationError("fraction must be in (0, 1]");
  }
  const auto count = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(ids.size())));
  return subsample(ids, count, seed);
}

// ---------------------------------------------------------------------------
// Baseline

namespace {

struct TaggedSpan {
  std::size_t start;
  std::size_t end;
  std::string tag;
};

// Removes the given tags and returns the tagged spans in plain-text offsets.
std::string untag(std::string_view tagged, const std::set<std::string>& tags,
                  std::vector<TaggedSpan>& spans) {
  std::string plain;
  std::vector<std::pair<std::string, std::size_t>> open;
  std::size_t i = 0;
  while (i < tagged.size()) {
    bool matched = false;
    if (tagged[i] == '<') {
      for (const auto& t : tags) {
        const std::string opening = "<" + t + ">";
        const std::string closing = "</" + t + ">";
        if (tagged.substr(i, opening.size()) == opening) {
          open.emplace_back(t, plain.size());
          i += opening.size();
          matched = true;
        } else if (tagged.substr(i, closing.size()) == closing && !open.empty() &&
                   open.back().first == t) {
          spans.push_back(TaggedSpan{open.back().second, plain.size(), t});
          open.pop_back();
          i += closing.size();
          matched = true;
        }
        if (matched) break;
      }
    }
    if (!matched) plain.push_back(tagged[i++]);
  }
  return plain;
}

bool shares_sentence(const CandidateInstance& inst) {
  const auto tag1 = inst.pair.first.type.tag_code();
  const auto tag2 = inst.pair.second.type.tag_code();
  std::vector<TaggedSpan> spans;
  const auto plain = untag(inst.context, {tag1, tag2}, spans);
  for (const auto& s : segment_sentences(plain)) {
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    std::size_t total = 0;
    for (const auto& sp : spans) {
      if (sp.start < s.start || sp.end > s.end) continue;
      ++total;
      if (sp.tag == tag1) ++n1;
      if (sp.tag == tag2) ++n2;
    }
    if (tag1 == tag2 ? total >= 2 : (n1 > 0 && n2 > 0)) return true;
  }
  return false;
}

}  // namespace

std::vector<RelationTuple> baseline_predict(std::span<const CandidateInstance> instances) {
  std::vector<RelationTuple> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) {
    const bool related = inst.level == ContextLevel::Sentence || shares_sentence(inst);
    out.push_back(RelationTuple{inst.doc_id, inst.pair,
                                related ? RelationLabel(LabelKind::Association)
                                        : RelationLabel(LabelKind::None)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Statistics

std::vector<CorpusStats> corpus_stats(const HarmonizedCorpus& corpus) {
  std::vector<CorpusStats> out;
  auto row_for = [&](const std::string& tag) -> CorpusStats& {
    for (auto& s : out) {
      if (s.corpus == tag) return s;
    }
    out.push_back(CorpusStats{});
    out.back().corpus = tag;
    return out.back();
  };
  for (const auto& hd : corpus.documents) {
    auto& s = row_for(hd.corpus_tag);
    ++s.documents;
    for (const auto& p : hd.pairs) {
      ++s.labels[p.label.render()];
      ++s.levels[std::string(level_name(p.level))];
      if (p.label.is_negative()) {
        ++s.negatives;
      } else {
        ++s.relations;
        ++s.pair_types[pair_type_key(p.pair.first.type, p.pair.second.type)];
      }
    }
  }
  return out;
}

CorpusStats corpus_stats(const std::vector<Document>& docs, std::string corpus_name) {
  CorpusStats s;
  s.corpus = std::move(corpus_name);
  s.documents = docs.size();
  for (const auto& doc : docs) {
    std::map<std::string, EntityType> types;
    for (const auto& m : doc.mentions) {
      for (const auto& id : m.concept_ids) types.emplace(id, m.type);
    }
    for (const auto& r : doc.relations) {
      ++s.relations;
      ++s.labels[r.label_text];
      auto a = types.find(r.concept_id1);
      auto b = types.find(r.concept_id2);
      if (a == types.end() || b == types.end()) {
        ++s.pair_types["unresolved"];
      } else {
        ++s.pair_types[pair_type_key(a->second, b->second)];
      }
    }
  }
  return s;
}

namespace {

std::string histogram(const std::map<std::string, std::size_t>& h) {
  std::string out;
  for (const auto& [k, v] : h) {
    if (!out.empty()) out += ' ';
    out += k + ":" + std::to_string(v);
  }
  return out.empty() ? "-" : out;
}

}  // namespace

std::string format_stats(const std::vector<CorpusStats>& stats) {
  std::ostringstream out;
  out << std::left << std::setw(16) << "Corpus" << std::right << std::setw(11)
      << "# Abstracts" << std::setw(12) << "# Relation" << std::setw(12)
      << "# Negative" << "  " << std::left << std::setw(40) << "Relation pairs"
      << "Level\n";
  for (const auto& s : stats) {
    out << std::left << std::setw(16) << s.corpus << std::right << std::setw(11)
        << s.documents << std::setw(12) << s.relations << std::setw(12)
        << s.negatives << "  " << std::left << std::setw(40)
        << histogram(s.pair_types) << histogram(s.levels) << '\n';
  }
  for (const auto& s : stats) {
    out << s.corpus << " labels: " << histogram(s.labels) << '\n';
  }
  return out.str();
}

std::string stats_json(const std::vector<CorpusStats>& stats) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& s : stats) {
    nlohmann::ordered_json row;
    row["corpus"] = s.corpus;
    row["abstracts"] = s.documents;
    row["relations"] = s.relations;
    row["negatives"] = s.negatives;
    row["pair_types"] = s.pair_types;
    row["levels"] = s.levels;
    row["labels"] = s.labels;
    j.push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

}  // namespace relmerge
