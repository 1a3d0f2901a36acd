#pragma once

// Readers and writers for the external file formats:
//
//   PubTator-style corpus
//     ID|t|TITLE
//     ID|a|ABSTRACT
//     ID<TAB>START<TAB>END<TAB>TEXT<TAB>TYPE<TAB>ID1,ID2,...
//     ID<TAB>LABEL<TAB>CONCEPT1<TAB>CONCEPT2[<TAB>NOVELTY]
//     <blank line>
//   Offsets are 0-based, half-open, over TITLE + " " + ABSTRACT. Lines
//   starting with '#' are comments. A trailing novelty column on relation
//   lines is accepted and dropped.
//
//   Repository triples: DOCID<TAB>ID1<TAB>ID2[<TAB>LABEL], '#' comments.
//   Corpus profile: a JSON object (see parse_profile).
//   Instance stream: one JSON object per line.

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "relmerge/model.hpp"

namespace relmerge {

std::vector<Document> parse_pubtator(std::string_view input);

// Annotation lines are sorted by (start, end, concept ids). A relation whose
// concepts have no mention in the document is preceded by a
// "# unresolved relation" comment line.
std::string write_pubtator(std::span<const Document> docs);

struct RepositoryRecord {
  std::string doc_id;
  ConceptRef first;
  ConceptRef second;
  std::string label_text;  // "Association" when the column is absent

  bool operator==(const RepositoryRecord&) const = default;
};

std::vector<RepositoryRecord> parse_repository(
    std::string_view input, const std::pair<EntityType, EntityType>& types);

// Auto annotations keyed by document id, one PubTator annotation line per
// mention. Title/abstract lines are skipped so a full PubTator file with
// only annotation lines can be used. Offsets are not checked here; they are
// checked against the document text when attached.
using AnnotationIndex = std::map<std::string, std::vector<EntityMention>>;
AnnotationIndex parse_annotations(std::string_view input);

// Profile keys: name, span_solution (a1|a2|a3), level (b1|b2),
// negative_policy (c1|c2|c3), granularity (d1|d2), entity_policy (e1|e2),
// label_map {text: label}, entity_type_map {source type: entity type},
// allowed_pairs [[kind, kind], ...]. The result is validated.
CorpusProfile parse_profile(std::string_view input);
std::string write_profile(const CorpusProfile& profile);

// Keys: doc_id, corpus, id1, type1, id2, type2, prompt, context, label,
// level.
std::string write_instance(const CandidateInstance& instance);
void write_instances(std::span<const CandidateInstance> instances,
                     std::ostream& out);
std::vector<CandidateInstance> parse_instances(std::string_view input);

// Splits on '\n' and strips one trailing '\r' per line. A final empty
// segment after a trailing newline is not returned.
std::vector<std::string_view> split_lines(std::string_view input);
std::vector<std::string_view> split(std::string_view s, char sep);

}  // namespace relmerge
