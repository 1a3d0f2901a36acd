#pragma once

// Profile-driven adjustment of one corpus onto the target schema, and merging
// of adjusted corpora.
//
// Stages, per document:
//   span     recover entity spans (a1 identity, a2 abstract, a3 sentence)
//   retag    map source entity types (e1 internal kinds, e2 canonical kinds)
//   context  whole text (b1) or first co-occurring sentence (b2)
//   label    granular label text to a relation label (d1 map, d2 Association)
//   policy   unannotated pairs become None-<corpus> (c1), None (c2), or are
//            left out (c3)
//
// Every source relation ends up either as a labeled pair or as a drop
// record naming the stage and the reason.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "relmerge/formats.hpp"
#include "relmerge/model.hpp"
#include "relmerge/textspan.hpp"

namespace relmerge {

struct ReportRecord {
  enum class Kind { Drop, Warning };

  Kind kind = Kind::Drop;
  std::string corpus;
  std::string doc_id;
  std::string id1;  // empty for warnings not tied to a pair
  std::string id2;
  std::string stage;
  std::string reason;

  bool operator==(const ReportRecord&) const = default;
};

struct LabeledPair {
  CanonicalPair pair;
  RelationLabel label;
  ContextLevel level = ContextLevel::Document;
  std::size_t start = 0;  // context span over Document::text()
  std::size_t end = 0;

  bool operator==(const LabeledPair&) const = default;
};

struct HarmonizedDocument {
  std::string corpus_tag;
  Document doc;
  std::vector<LabeledPair> pairs;  // sorted by pair

  bool operator==(const HarmonizedDocument&) const = default;
};

struct HarmonizedCorpus {
  std::string corpus_tag;
  std::vector<HarmonizedDocument> documents;

  std::size_t pair_count() const;
  bool operator==(const HarmonizedCorpus&) const = default;
};

// Annotation sources for a2/a3. Either may be null.
struct AnnotationSource {
  const AnnotationIndex* auto_annotations = nullptr;
  const Lexicon* lexicon = nullptr;

  bool empty() const { return auto_annotations == nullptr && lexicon == nullptr; }
};

struct SpanRecovery {
  std::vector<Document> docs;
  std::vector<ReportRecord> report;  // drops and rejected auto mentions
};

// a1 returns the input unchanged. a2 keeps a relation when both concepts are
// mentioned anywhere in the text, a3 when they share a sentence. Throws
// ConfigError for a2/a3 without an annotation source.
SpanRecovery recover_spans(const std::vector<Document>& docs,
                           const AnnotationSource& source, SpanSolution solution,
                           const std::string& corpus_tag);

struct ContextSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  ContextLevel level = ContextLevel::Document;

  bool operator==(const ContextSpan&) const = default;
};

// b1: the whole text. b2: the first sentence where both concepts co-occur,
// or nothing.
std::optional<ContextSpan> delimit_context(const Document& doc,
                                           const std::vector<SentenceSpan>& sentences,
                                           const CanonicalPair& pair,
                                           ContextLevel level);
std::optional<ContextSpan> delimit_context(const Document& doc,
                                           const CanonicalPair& pair,
                                           ContextLevel level);

// Total: d2 always yields Association; d1 looks the text up in the label
// map, then accepts a canonical label spelling, then falls back to
// Association.
RelationLabel map_label(std::string_view label_text, const CorpusProfile& profile);

// Applies the profile's entity_type_map to every mention, keyed by the
// mention type's rendered name. Unmapped types pass through. Throws
// ConfigError when e1 maps onto a canonical kind only, or e2 maps onto an
// internal kind.
std::vector<Document> retag_entities(const std::vector<Document>& docs,
                                     const CorpusProfile& profile);

struct PolicyResult {
  std::vector<LabeledPair> pairs;
  std::vector<ReportRecord> drops;
};

// Enumerates allowed pairs with a context, labels annotated ones and applies
// the negative policy to the rest. Annotated relations that cannot be placed
// are reported as drops. Throws ConflictError when one canonical pair gets
// two different labels.
PolicyResult apply_negative_policy(const Document& doc, const CorpusProfile& profile);

struct HarmonizeOptions {
  AnnotationSource annotations;
  // Relations from a span-less repository, attached to documents by id.
  const std::vector<RepositoryRecord>* repository = nullptr;
  unsigned threads = 1;
};

struct HarmonizeResult {
  HarmonizedCorpus corpus;
  std::vector<ReportRecord> report;

  // Count of drop records (warnings excluded).
  std::size_t drop_count() const;
};

// A document whose annotations conflict is left out and each of its
// remaining relations is reported at stage "conflict".
HarmonizeResult harmonize_corpus(const std::vector<Document>& docs,
                                 const CorpusProfile& profile,
                                 const HarmonizeOptions& options = {});

// Concatenation in input order. Throws ValidationError on a repeated corpus
// tag. The merged tag joins the input tags with '+'.
HarmonizedCorpus merge_corpora(const std::vector<HarmonizedCorpus>& corpora);

// Serialization of harmonized corpora (one JSON document) and of reports
// (one JSON object per line).
std::string write_harmonized(const HarmonizedCorpus& corpus);
HarmonizedCorpus parse_harmonized(std::string_view input);
std::string write_report(const std::vector<ReportRecord>& report);
std::vector<ReportRecord> parse_report(std::string_view input);

}  // namespace relmerge
