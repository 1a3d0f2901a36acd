#pragma once

// Shared domain vocabulary: entity types, relation labels, mentions,
// documents, corpus profiles and candidate instances.

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace relmerge {

// ---------------------------------------------------------------------------
// Entity types
// ---------------------------------------------------------------------------

// Canonical kinds of the target schema. Declared in lexicographic order of
// their names so enum order and name order agree.
enum class Kind { Chemical, Disease, Gene };

std::string_view kind_name(Kind kind);
std::optional<Kind> kind_from_name(std::string_view name);

// One of the canonical kinds, or a corpus-internal kind such as
// "DrugProt-Chem". An internal kind may carry the canonical kind it stands in
// for; that base decides which entity pairs it participates in.
class EntityType {
 public:
  struct Internal {
    std::string tag;
    std::optional<Kind> base;
    auto operator<=>(const Internal&) const = default;
  };

  EntityType() : value_(Kind::Gene) {}
  EntityType(Kind kind) : value_(kind) {}  // NOLINT(implicit)

  static EntityType gene() { return Kind::Gene; }
  static EntityType chemical() { return Kind::Chemical; }
  static EntityType disease() { return Kind::Disease; }
  // Throws ValidationError on an empty tag, whitespace, '@', '<', '>', '/',
  // or a tag that collides with a canonical kind name or a source alias.
  static EntityType internal(std::string tag, std::optional<Kind> base = {});

  // Inverse of render(). Also accepts source aliases: "Variant", "Mutation",
  // "SequenceVariant" and "GeneOrGeneProduct" fold into Gene,
  // "ChemicalEntity" into Chemical, "DiseaseOrPhenotypicFeature" into
  // Disease. Any other valid token becomes an internal kind without base.
  static EntityType parse(std::string_view text);

  bool is_canonical() const { return std::holds_alternative<Kind>(value_); }
  // Canonical kind, or the base of an internal kind.
  std::optional<Kind> base_kind() const;
  // "Gene" / "Chemical" / "Disease", or the internal tag.
  std::string name() const;
  // Serialized form: name(), plus "@Base" for internal kinds with a base.
  std::string render() const;
  // Boundary tag name: G, C, D, or the internal tag.
  std::string tag_code() const;

  auto operator<=>(const EntityType&) const = default;

 private:
  explicit EntityType(Internal internal) : value_(std::move(internal)) {}
  std::variant<Kind, Internal> value_;
};

// ---------------------------------------------------------------------------
// Relation labels
// ---------------------------------------------------------------------------

enum class LabelKind {
  PositiveCorrelation,
  NegativeCorrelation,
  Association,
  Bind,
  DrugInteraction,
  Cotreatment,
  Comparison,
  Conversion,
  None,
  InternalNone,
};

class RelationLabel {
 public:
  RelationLabel() = default;
  RelationLabel(LabelKind kind);  // NOLINT(implicit); not InternalNone
  static RelationLabel internal_none(std::string corpus);

  LabelKind kind() const { return kind_; }
  // Corpus of an InternalNone label; empty otherwise.
  const std::string& corpus() const { return corpus_; }
  // None and InternalNone denote the absence of a relation.
  bool is_negative() const {
    return kind_ == LabelKind::None || kind_ == LabelKind::InternalNone;
  }

  // "Positive_Correlation", ..., "None", "None-<corpus>".
  std::string render() const;
  // Exact inverse of render(); throws ValidationError otherwise.
  static RelationLabel parse(std::string_view text);
  // Lenient match against the eight positive types, ignoring case and
  // '_', '-' and ' ' separators ("Positive_Correlation", "positive
  // correlation" and "PositiveCorrelation" all match).
  static std::optional<RelationLabel> match_canonical(std::string_view text);

  auto operator<=>(const RelationLabel&) const = default;

 private:
  LabelKind kind_ = LabelKind::None;
  std::string corpus_;
};

// ---------------------------------------------------------------------------
// Mentions, relations, documents
// ---------------------------------------------------------------------------

struct EntityMention {
  std::size_t start = 0;  // half-open offsets over Document::text()
  std::size_t end = 0;
  std::string text;
  EntityType type;
  std::vector<std::string> concept_ids;

  bool carries(std::string_view id) const;
  auto operator<=>(const EntityMention&) const = default;
};

// Ordering used for mention lists: (start, end, concept ids), then the
// remaining fields so the order is total.
bool mention_less(const EntityMention& a, const EntityMention& b);

// A relation as it appears in a source file. The label text is mapped onto
// a RelationLabel during harmonization, under the corpus profile.
struct SourceRelation {
  std::string concept_id1;
  std::string concept_id2;
  std::string label_text;

  auto operator<=>(const SourceRelation&) const = default;
};

struct Document {
  std::string id;
  std::string title;
  std::string abstract_text;
  std::vector<EntityMention> mentions;  // sorted by mention_less
  std::vector<SourceRelation> relations;

  // Title, one space, abstract. Every offset refers to this string.
  std::string text() const { return title + " " + abstract_text; }
  std::size_t title_end() const { return title.size(); }

  bool operator==(const Document&) const = default;
};

// Throws ValidationError unless 0 <= start < end <= text.size(),
// text[start, end) == mention.text and concept ids are non-empty and unique.
void validate_mention(std::string_view text, const EntityMention& mention);
void sort_mentions(std::vector<EntityMention>& mentions);

// ---------------------------------------------------------------------------
// Pairs
// ---------------------------------------------------------------------------

struct ConceptRef {
  std::string id;
  EntityType type;

  auto operator<=>(const ConceptRef&) const = default;
};

struct CanonicalPair {
  ConceptRef first;
  ConceptRef second;

  auto operator<=>(const CanonicalPair&) const = default;
};

// Orders a pair by (type render name, concept id). Symmetric in its
// arguments. Throws ValidationError("self-pair") when the ids are equal.
CanonicalPair canonicalize_pair(ConceptRef a, ConceptRef b);

struct RelationAnnotation {
  CanonicalPair pair;
  RelationLabel label;

  auto operator<=>(const RelationAnnotation&) const = default;
};

// Unordered pair of canonical kinds, stored with first <= second.
struct KindPair {
  Kind first;
  Kind second;

  KindPair(Kind a, Kind b) : first(a < b ? a : b), second(a < b ? b : a) {}
  auto operator<=>(const KindPair&) const = default;
};

// "Chemical-Disease" style display key for a pair of entity types.
std::string pair_type_key(const EntityType& a, const EntityType& b);

// ---------------------------------------------------------------------------
// Corpus profiles
// ---------------------------------------------------------------------------

enum class SpanSolution { A1, A2, A3 };
enum class ContextLevel { Document, Sentence };  // b1, b2
enum class NegativePolicy { C1, C2, C3 };
enum class Granularity { D1, D2 };
enum class EntityPolicy { E1, E2 };

std::string_view to_string(SpanSolution v);
std::string_view to_string(ContextLevel v);  // "b1" / "b2"
std::string_view to_string(NegativePolicy v);
std::string_view to_string(Granularity v);
std::string_view to_string(EntityPolicy v);
std::string_view level_name(ContextLevel v);  // "document" / "sentence"
ContextLevel level_from_name(std::string_view name);

struct CorpusProfile {
  std::string name;
  SpanSolution span_solution = SpanSolution::A1;
  ContextLevel level = ContextLevel::Document;
  NegativePolicy negative_policy = NegativePolicy::C2;
  Granularity granularity = Granularity::D2;
  EntityPolicy entity_policy = EntityPolicy::E2;
  std::map<std::string, RelationLabel> label_map;
  std::map<std::string, EntityType> entity_type_map;
  std::set<KindPair> allowed_pairs;

  // Throws ValidationError naming the offending field.
  void validate() const;
  bool allows(const EntityType& a, const EntityType& b) const;

  bool operator==(const CorpusProfile&) const = default;
};

// ---------------------------------------------------------------------------
// Candidate instances
// ---------------------------------------------------------------------------

struct CandidateInstance {
  std::string doc_id;
  std::string corpus_tag;
  CanonicalPair pair;
  std::string prompt;
  std::string context;  // context text with boundary tags
  RelationLabel label;
  ContextLevel level = ContextLevel::Document;

  bool operator==(const CandidateInstance&) const = default;
};

}  // namespace relmerge
