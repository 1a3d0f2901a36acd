#pragma once
// Test-only helpers: fixture loading, random value generators and
// brute-force reference implementations used as oracles.

#include <cstdint>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "relmerge/evaluate.hpp"
#include "relmerge/formats.hpp"
#include "relmerge/harmonize.hpp"
#include "relmerge/instances.hpp"
#include "relmerge/model.hpp"
#include "relmerge/textspan.hpp"

namespace relmerge::testing {

std::string data_dir();
std::string profiles_dir();
std::string slurp(const std::string& path);

// The nine per-corpus fixtures plus the edge-case one, in a fixed order.
const std::vector<std::string>& fixture_names();
// The nine fixtures that have a shipped profile of the same name.
const std::vector<std::string>& profiled_fixture_names();

// A fixture with everything harmonize needs. The options point into the
// owned members, so the struct is handed out behind a unique_ptr.
struct Fixture {
  std::string name;
  std::string corpus_path;
  std::string profile_path;
  std::vector<Document> docs;
  CorpusProfile profile;
  AnnotationIndex annotations;
  Lexicon lexicon;
  std::vector<RepositoryRecord> repository;
  HarmonizeOptions options;
  // CLI arguments for `harmonize`, minus --out/--report/--threads.
  std::vector<std::string> cli_args;
};
std::unique_ptr<Fixture> load_fixture(const std::string& name);

// Number of source relations a harmonize run sees: relation lines of the
// documents plus repository records.
std::size_t input_relation_count(const Fixture& fixture);

using Rng = std::mt19937_64;

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi);  // inclusive
bool coin(Rng& rng, double p = 0.5);
// Token without whitespace; may hold punctuation and multi-byte UTF-8.
std::string random_token(Rng& rng);
// Printable text that may include tabs, newlines, quotes and backslashes.
std::string random_field(Rng& rng, std::size_t max_len);

struct RandomDocOptions {
  std::size_t max_ids = 8;
  double composite_rate = 0.2;
  double internal_rate = 0.0;   // chance a concept gets an internal type
  std::size_t max_relations = 6;
  double unresolved_rate = 0.1;  // relations naming an unmentioned id
};

// A valid document: text of random words, mentions over word runs (they
// may overlap or nest), each concept with a single type.
Document random_document(Rng& rng, const std::string& id,
                         const RandomDocOptions& options = {});
std::vector<Document> random_corpus(Rng& rng, std::size_t max_docs,
                                    const RandomDocOptions& options = {});

CandidateInstance random_instance(Rng& rng);
RelationLabel random_label(Rng& rng, bool allow_negative);

// Brute force over all unordered pairs of distinct concept ids. Types come
// from the first mention (document order) carrying each id.
std::vector<PairCandidate> brute_force_pairs(const Document& doc,
                                             const std::set<KindPair>& allowed);

// Hand-rolled confusion counts over set semantics.
struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0;
};
Confusion brute_force_confusion(const std::vector<RelationTuple>& gold,
                                const std::vector<RelationTuple>& pred);

const std::set<KindPair>& all_kind_pairs();

// Hand-built single-document fixtures for the three negative policies, with
// the expected (pair, label) multiset written out literally.
struct PolicyGolden {
  std::string name;
  Document doc;  // already retagged under `profile`
  CorpusProfile profile;
  std::vector<std::pair<CanonicalPair, RelationLabel>> expected;
};
std::vector<PolicyGolden> policy_goldens();

}  // namespace relmerge::testing
