#include "relmerge/model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

#include "relmerge/error.hpp"

namespace relmerge {

namespace {

struct KindAlias {
  std::string_view text;
  Kind kind;
};

constexpr std::array<KindAlias, 9> kSourceAliases{{
    {"Chemical", Kind::Chemical},
    {"ChemicalEntity", Kind::Chemical},
    {"Disease", Kind::Disease},
    {"DiseaseOrPhenotypicFeature", Kind::Disease},
    {"Gene", Kind::Gene},
    {"GeneOrGeneProduct", Kind::Gene},
    {"Variant", Kind::Gene},
    {"SequenceVariant", Kind::Gene},
    {"Mutation", Kind::Gene},
}};

std::optional<Kind> alias_kind(std::string_view text) {
  for (const auto& alias : kSourceAliases) {
    if (alias.text == text) return alias.kind;
  }
  return std::nullopt;
}

struct LabelName {
  LabelKind kind;
  std::string_view text;
};

constexpr std::array<LabelName, 9> kLabelNames{{
    {LabelKind::PositiveCorrelation, "Positive_Correlation"},
    {LabelKind::NegativeCorrelation, "Negative_Correlation"},
    {LabelKind::Association, "Association"},
    {LabelKind::Bind, "Bind"},
    {LabelKind::DrugInteraction, "Drug_Interaction"},
    {LabelKind::Cotreatment, "Cotreatment"},
    {LabelKind::Comparison, "Comparison"},
    {LabelKind::Conversion, "Conversion"},
    {LabelKind::None, "None"},
}};

bool has_space(std::string_view s) {
  return std::any_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

std::string squash(std::string_view text) {
  std::string out;
  for (unsigned char c : text) {
    if (c == '_' || c == '-' || c == ' ') continue;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

}  // namespace

std::string_view kind_name(Kind kind) {
  switch (kind) {
    case Kind::Chemical: return "Chemical";
    case Kind::Disease: return "Disease";
    case Kind::Gene: return "Gene";
  }
  return "Gene";
}

std::optional<Kind> kind_from_name(std::string_view name) {
  for (Kind k : {Kind::Chemical, Kind::Disease, Kind::Gene}) {
    if (kind_name(k) == name) return k;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

EntityType EntityType::internal(std::string tag, std::optional<Kind> base) {
  if (tag.empty()) throw ValidationError("internal entity tag is empty");
  if (has_space(tag)) {
    throw ValidationError("internal entity tag '" + tag +
                          "' contains whitespace");
  }
  if (tag.find_first_of("@<>/") != std::string::npos) {
    throw ValidationError("internal entity tag '" + tag +
                          "' contains a reserved character");
  }
  if (alias_kind(tag)) {
    throw ValidationError("internal entity tag '" + tag +
                          "' collides with a canonical kind");
  }
  return EntityType(Internal{std::move(tag), base});
}

EntityType EntityType::parse(std::string_view text) {
  if (auto kind = alias_kind(text)) return *kind;
  auto at = text.rfind('@');
  if (at != std::string_view::npos) {
    auto base = kind_from_name(text.substr(at + 1));
    if (!base) {
      throw ValidationError("unknown base kind in entity type '" +
                            std::string(text) + "'");
    }
    return internal(std::string(text.substr(0, at)), base);
  }
  return internal(std::string(text));
}

std::optional<Kind> EntityType::base_kind() const {
  if (const Kind* k = std::get_if<Kind>(&value_)) return *k;
  return std::get<Internal>(value_).base;
}

std::string EntityType::name() const {
  if (const Kind* k = std::get_if<Kind>(&value_)) return std::string(kind_name(*k));
  return std::get<Internal>(value_).tag;
}

std::string EntityType::render() const {
  if (const Internal* in = std::get_if<Internal>(&value_)) {
    if (in->base) return in->tag + "@" + std::string(kind_name(*in->base));
    return in->tag;
  }
  return name();
}

std::string EntityType::tag_code() const {
  if (const Kind* k = std::get_if<Kind>(&value_)) {
    switch (*k) {
      case Kind::Chemical: return "C";
      case Kind::Disease: return "D";
      case Kind::Gene: return "G";
    }
  }
  return std::get<Internal>(value_).tag;
}

// ---------------------------------------------------------------------------

RelationLabel::RelationLabel(LabelKind kind) : kind_(kind) {
  if (kind == LabelKind::InternalNone) {
    throw ValidationError("InternalNone label requires a corpus name");
  }
}

RelationLabel RelationLabel::internal_none(std::string corpus) {
  if (corpus.empty() || has_space(corpus)) {
    throw ValidationError("invalid corpus name for internal negative class: '" +
                          corpus + "'");
  }
  RelationLabel label;
  label.kind_ = LabelKind::InternalNone;
  label.corpus_ = std::move(corpus);
  return label;
}

std::string RelationLabel::render() const {
  if (kind_ == LabelKind::InternalNone) return "None-" + corpus_;
  for (const auto& n : kLabelNames) {
    if (n.kind == kind_) return std::string(n.text);
  }
  return "None";
}

RelationLabel RelationLabel::parse(std::string_view text) {
  for (const auto& n : kLabelNames) {
    if (n.text == text) return n.kind;
  }
  if (text.starts_with("None-")) {
    return internal_none(std::string(text.substr(5)));
  }
  throw ValidationError("unknown relation label '" + std::string(text) + "'");
}

std::optional<RelationLabel> RelationLabel::match_canonical(
    std::string_view text) {
  const std::string key = squash(text);
  for (const auto& n : kLabelNames) {
    if (n.kind == LabelKind::None) continue;
    if (squash(n.text) == key) return RelationLabel(n.kind);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

bool EntityMention::carries(std::string_view id) const {
  return std::find(concept_ids.begin(), concept_ids.end(), id) !=
         concept_ids.end();
}

bool mention_less(const EntityMention& a, const EntityMention& b) {
  return std::tie(a.start, a.end, a.concept_ids, a.text, a.type) <
         std::tie(b.start, b.end, b.concept_ids, b.text, b.type);
}

void sort_mentions(std::vector<EntityMention>& mentions) {
  std::stable_sort(mentions.begin(), mentions.end(), mention_less);
}

void validate_mention(std::string_view text, const EntityMention& m) {
  if (m.start >= m.end || m.end > text.size()) {
    throw ValidationError("mention offsets [" + std::to_string(m.start) + "," +
                          std::to_string(m.end) + ") outside text of length " +
                          std::to_string(text.size()));
  }
  if (text.substr(m.start, m.end - m.start) != m.text) {
    throw ValidationError("mention text '" + m.text + "' does not match '" +
                          std::string(text.substr(m.start, m.end - m.start)) +
                          "' at [" + std::to_string(m.start) + "," +
                          std::to_string(m.end) + ")");
  }
  if (m.concept_ids.empty()) {
    throw ValidationError("mention '" + m.text + "' has no concept id");
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& id : m.concept_ids) {
    if (id.empty()) {
      throw ValidationError("mention '" + m.text + "' has an empty concept id");
    }
    if (!seen.insert(id).second) {
      throw ValidationError("mention '" + m.text + "' repeats concept id " + id);
    }
  }
}

// ---------------------------------------------------------------------------

CanonicalPair canonicalize_pair(ConceptRef a, ConceptRef b) {
  if (a.id == b.id) {
    throw ValidationError("self-pair: concept id " + a.id + " paired with itself");
  }
  auto ra = a.type.render();
  auto rb = b.type.render();
  if (std::tie(rb, b.id) < std::tie(ra, a.id)) std::swap(a, b);
  return CanonicalPair{std::move(a), std::move(b)};
}

std::string pair_type_key(const EntityType& a, const EntityType& b) {
  auto na = a.render();
  auto nb = b.render();
  if (nb < na) std::swap(na, nb);
  return na + "-" + nb;
}

// ---------------------------------------------------------------------------

std::string_view to_string(SpanSolution v) {
  switch (v) {
    case SpanSolution::A1: return "a1";
    case SpanSolution::A2: return "a2";
    case SpanSolution::A3: return "a3";
  }
  return "a1";
}

std::string_view to_string(ContextLevel v) {
  return v == ContextLevel::Document ? "b1" : "b2";
}

std::string_view to_string(NegativePolicy v) {
  switch (v) {
    case NegativePolicy::C1: return "c1";
    case NegativePolicy::C2: return "c2";
    case NegativePolicy::C3: return "c3";
  }
  return "c1";
}

std::string_view to_string(Granularity v) {
  return v == Granularity::D1 ? "d1" : "d2";
}

std::string_view to_string(EntityPolicy v) {
  return v == EntityPolicy::E1 ? "e1" : "e2";
}

std::string_view level_name(ContextLevel v) {
  return v == ContextLevel::Document ? "document" : "sentence";
}

ContextLevel level_from_name(std::string_view name) {
  if (name == "document") return ContextLevel::Document;
  if (name == "sentence") return ContextLevel::Sentence;
  throw ValidationError("unknown context level '" + std::string(name) + "'");
}

void CorpusProfile::validate() const {
  if (name.empty() || has_space(name)) {
    throw ValidationError("profile name must be a non-empty token");
  }
  if (granularity == Granularity::D2 && !label_map.empty()) {
    throw ValidationError("granularity d2 requires an empty label_map");
  }
  if (granularity == Granularity::D1 && label_map.empty()) {
    throw ValidationError("granularity d1 requires a non-empty label_map");
  }
  for (const auto& [text, label] : label_map) {
    if (label.is_negative()) {
      throw ValidationError("label_map entry '" + text +
                            "' must target one of the eight relation types");
    }
  }
  bool any_internal = false;
  for (const auto& [source, target] : entity_type_map) {
    if (!target.is_canonical()) {
      any_internal = true;
      if (!target.base_kind()) {
        throw ValidationError("entity_type_map entry '" + source +
                              "' targets an internal type without a base kind");
      }
    }
  }
  if (entity_policy == EntityPolicy::E1 && !any_internal) {
    throw ValidationError(
        "entity policy e1 requires at least one internal target in "
        "entity_type_map");
  }
  if (entity_policy == EntityPolicy::E2 && any_internal) {
    throw ValidationError(
        "entity policy e2 requires every entity_type_map target to be "
        "canonical");
  }
  if (allowed_pairs.empty()) {
    throw ValidationError("allowed_pairs must not be empty");
  }
}

bool CorpusProfile::allows(const EntityType& a, const EntityType& b) const {
  auto ka = a.base_kind();
  auto kb = b.base_kind();
  if (!ka || !kb) return false;
  return allowed_pairs.contains(KindPair(*ka, *kb));
}

}  // namespace relmerge
