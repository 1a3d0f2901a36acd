#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relmerge/harmonize.hpp"
#include "relmerge/model.hpp"

namespace relmerge {

// ---------------------------------------------------------------------------
// Scoring

struct RelationTuple {
  std::string doc_id;
  CanonicalPair pair;
  RelationLabel label;

  auto operator<=>(const RelationTuple&) const = default;
};

struct EvalCounts {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // No predictions: precision is reported as 0.
  bool precision_undefined = false;
  // No gold tuples: recall is reported as 0.
  bool recall_undefined = false;
};

struct EvalReport {
  EvalCounts micro;
  std::map<std::string, EvalCounts> per_pair_type;  // key: pair_type_key()
};

// Micro P/R/F over exact (doc id, pair, label) matches. Negative labels
// (None, None-<corpus>) are removed from both sides first. Throws
// ValidationError when either side repeats a tuple.
EvalReport score(std::span<const RelationTuple> gold,
                 std::span<const RelationTuple> pred);

// DOCID<TAB>ID1<TAB>TYPE1<TAB>ID2<TAB>TYPE2<TAB>LABEL, '#' comments.
// Pairs are canonicalized on read.
std::vector<RelationTuple> parse_tuples(std::string_view input);
std::string write_tuples(std::span<const RelationTuple> tuples);

std::vector<RelationTuple> gold_tuples(std::span<const CandidateInstance> instances);

// Aligned-column text: one row for the micro scores, one per pair type.
std::string format_report(const EvalReport& report);

// ---------------------------------------------------------------------------
// Significance

// Regularized incomplete beta I_x(a, b), continued fraction evaluated with
// the modified Lentz method. Requires a, b > 0 and 0 <= x <= 1.
double regularized_incomplete_beta(double a, double b, double x);

// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
double student_t_two_tailed(double t, double df);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  std::size_t df = 0;
  // Differences are constant and non-zero: t is infinite, p is 0.
  bool degenerate_variance = false;
};

// Paired two-tailed t-test on x_i - y_i. Throws ValidationError on length
// mismatch or fewer than two pairs.
TTestResult paired_t_test(std::span<const double> xs, std::span<const double> ys);

// ---------------------------------------------------------------------------
// Sampling

// Seeded generator with a platform-independent output sequence. The
// standard fixes mt19937_64's raw output but not the distributions, so
// bounded draws use rejection sampling here.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}
  // Uniform in [0, bound). bound > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

// Fisher-Yates shuffle driven by SeededRng, then round-robin assignment.
// Each fold lists its ids in input order. Throws ValidationError unless
// 2 <= k <= ids.size().
std::vector<std::vector<std::string>> kfold_split(const std::vector<std::string>& ids,
                                                  std::size_t k, std::uint64_t seed);

// Sample of `count` ids without replacement, in input order. Throws
// ValidationError unless 0 < count <= ids.size().
std::vector<std::string> subsample(const std::vector<std::string>& ids,
                                   std::size_t count, std::uint64_t seed);
// Fraction in (0, 1]; the count is round(fraction * n).
std::vector<std::string> subsample_fraction(const std::vector<std::string>& ids,
                                            double fraction, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Baseline and statistics

// Association for sentence-level instances and for document-level instances
// whose context has a sentence holding both members' tags; None otherwise.
// When both members share a tag name, a sentence needs two tagged spans.
std::vector<RelationTuple> baseline_predict(std::span<const CandidateInstance> instances);

struct CorpusStats {
  std::string corpus;
  std::size_t documents = 0;
  std::size_t relations = 0;  // non-negative labels
  std::size_t negatives = 0;
  std::map<std::string, std::size_t> pair_types;  // over relations only
  std::map<std::string, std::size_t> levels;
  std::map<std::string, std::size_t> labels;

  bool operator==(const CorpusStats&) const = default;
};

// One row per corpus tag, in order of first appearance.
std::vector<CorpusStats> corpus_stats(const HarmonizedCorpus& corpus);
// Source corpus: relations are source relation lines, labels are the raw
// label text, pair types come from the concepts' mention types
// ("unresolved" when a concept has no mention).
CorpusStats corpus_stats(const std::vector<Document>& docs, std::string corpus_name);

std::string format_stats(const std::vector<CorpusStats>& stats);
std::string stats_json(const std::vector<CorpusStats>& stats);

}  // namespace relmerge
