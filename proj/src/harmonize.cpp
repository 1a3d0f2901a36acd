#include "relmerge/harmonize.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "relmerge/error.hpp"
#include "relmerge/instances.hpp"
#include "relmerge/parallel.hpp"

namespace relmerge {

using ordered_json = nlohmann::ordered_json;

namespace {

ReportRecord drop(const std::string& corpus, const std::string& doc_id,
                  const SourceRelation& r, std::string stage, std::string reason) {
  return ReportRecord{ReportRecord::Kind::Drop, corpus, doc_id, r.concept_id1,
                      r.concept_id2, std::move(stage), std::move(reason)};
}

bool mentioned(const Document& doc, const std::string& id) {
  return std::any_of(doc.mentions.begin(), doc.mentions.end(),
                     [&](const EntityMention& m) { return m.carries(id); });
}

SpanRecovery recover_document(const Document& doc, const AnnotationSource& source,
                              SpanSolution solution, const std::string& corpus) {
  SpanRecovery out;
  if (solution == SpanSolution::A1) {
    out.docs.push_back(doc);
    return out;
  }

  std::vector<EntityMention> auto_mentions;
  if (source.auto_annotations != nullptr) {
    auto it = source.auto_annotations->find(doc.id);
    if (it != source.auto_annotations->end()) auto_mentions = it->second;
  }
  if (source.lexicon != nullptr) {
    auto matched = dictionary_match(doc.text(), *source.lexicon);
    auto_mentions.insert(auto_mentions.end(), matched.begin(), matched.end());
  }
  auto attached = attach_annotations(doc, auto_mentions);
  for (auto& w : attached.warnings) {
    out.report.push_back(ReportRecord{ReportRecord::Kind::Warning, corpus, doc.id,
                                      "", "", "span", std::move(w)});
  }

  Document& result = attached.doc;
  std::vector<SourceRelation> kept;
  std::vector<SentenceSpan> sentences;
  if (solution == SpanSolution::A3) sentences = segment_sentences(result);
  for (const auto& r : result.relations) {
    if (!mentioned(result, r.concept_id1) || !mentioned(result, r.concept_id2)) {
      out.report.push_back(drop(corpus, doc.id, r, "span", "entity not found"));
      continue;
    }
    if (solution == SpanSolution::A3 &&
        !find_cooccurrence(result, sentences, r.concept_id1, r.concept_id2)) {
      out.report.push_back(
          drop(corpus, doc.id, r, "span", "entities not in the same sentence"));
      continue;
    }
    kept.push_back(r);
  }
  result.relations = std::move(kept);
  out.docs.push_back(std::move(result));
  return out;
}

void check_retag_config(const CorpusProfile& profile) {
  for (const auto& [source, target] : profile.entity_type_map) {
    if (profile.entity_policy == EntityPolicy::E1 && target.is_canonical()) {
      throw ConfigError("entity policy e1 maps '" + source +
                        "' onto canonical kind " + target.name() +
                        "; e1 must introduce internal kinds");
    }
    if (profile.entity_policy == EntityPolicy::E2 && !target.is_canonical()) {
      throw ConfigError("entity policy e2 maps '" + source +
                        "' onto internal kind " + target.render());
    }
  }
}

Document retag_document(const Document& doc, const CorpusProfile& profile) {
  Document out = doc;
  for (auto& m : out.mentions) {
    auto it = profile.entity_type_map.find(m.type.render());
    if (it != profile.entity_type_map.end()) m.type = it->second;
  }
  sort_mentions(out.mentions);
  return out;
}

std::map<std::string, EntityType> concept_types(const Document& doc) {
  std::map<std::string, EntityType> types;
  for (const auto& m : doc.mentions) {
    for (const auto& id : m.concept_ids) types.emplace(id, m.type);
  }
  return types;
}

struct DocumentOutcome {
  std::optional<HarmonizedDocument> doc;
  std::vector<ReportRecord> report;
};

DocumentOutcome harmonize_document(const Document& input,
                                   const CorpusProfile& profile,
                                   const AnnotationSource& source) {
  DocumentOutcome out;
  auto recovered = recover_document(input, source, profile.span_solution,
                                    profile.name);
  out.report = std::move(recovered.report);
  Document doc = retag_document(recovered.docs.front(), profile);
  try {
    auto policy = apply_negative_policy(doc, profile);
    out.report.insert(out.report.end(), policy.drops.begin(), policy.drops.end());
    out.doc = HarmonizedDocument{profile.name, std::move(doc),
                                 std::move(policy.pairs)};
  } catch (const ConflictError& e) {
    for (const auto& r : doc.relations) {
      out.report.push_back(drop(profile.name, doc.id, r, "conflict", e.what()));
    }
  }
  return out;
}

}  // namespace

std::size_t HarmonizedCorpus::pair_count() const {
  std::size_t n = 0;
  for (const auto& d : documents) n += d.pairs.size();
  return n;
}

std::size_t HarmonizeResult::drop_count() const {
  return static_cast<std::size_t>(
      std::count_if(report.begin(), report.end(), [](const ReportRecord& r) {
        return r.kind == ReportRecord::Kind::Drop;
      }));
}

SpanRecovery recover_spans(const std::vector<Document>& docs,
                           const AnnotationSource& source, SpanSolution solution,
                           const std::string& corpus_tag) {
  if (solution != SpanSolution::A1 && source.empty()) {
    throw ConfigError(std::string("span solution ") +
                      std::string(to_string(solution)) +
                      " needs an auto annotation file or a lexicon");
  }
  SpanRecovery out;
  for (const auto& doc : docs) {
    auto one = recover_document(doc, source, solution, corpus_tag);
    out.docs.push_back(std::move(one.docs.front()));
    out.report.insert(out.report.end(), one.report.begin(), one.report.end());
  }
  return out;
}

std::optional<ContextSpan> delimit_context(const Document& doc,
                                           const std::vector<SentenceSpan>& sentences,
                                           const CanonicalPair& pair,
                                           ContextLevel level) {
  if (level == ContextLevel::Document) {
    return ContextSpan{0, doc.text().size(), ContextLevel::Document};
  }
  auto s = find_cooccurrence(doc, sentences, pair.first.id, pair.second.id);
  if (!s) return std::nullopt;
  return ContextSpan{s->start, s->end, ContextLevel::Sentence};
}

std::optional<ContextSpan> delimit_context(const Document& doc,
                                           const CanonicalPair& pair,
                                           ContextLevel level) {
  std::vector<SentenceSpan> sentences;
  if (level == ContextLevel::Sentence) sentences = segment_sentences(doc);
  return delimit_context(doc, sentences, pair, level);
}

RelationLabel map_label(std::string_view label_text, const CorpusProfile& profile) {
  if (profile.granularity == Granularity::D2) return LabelKind::Association;
  auto it = profile.label_map.find(std::string(label_text));
  if (it != profile.label_map.end()) return it->second;
  if (auto canonical = RelationLabel::match_canonical(label_text)) return *canonical;
  return LabelKind::Association;
}

std::vector<Document> retag_entities(const std::vector<Document>& docs,
                                     const CorpusProfile& profile) {
  check_retag_config(profile);
  std::vector<Document> out;
  out.reserve(docs.size());
  for (const auto& doc : docs) out.push_back(retag_document(doc, profile));
  return out;
}

PolicyResult apply_negative_policy(const Document& doc,
                                   const CorpusProfile& profile) {
  PolicyResult out;
  const auto types = concept_types(doc);

  struct Annotated {
    RelationLabel label;
    const SourceRelation* relation;
  };
  std::map<CanonicalPair, Annotated> annotated;
  for (const auto& r : doc.relations) {
    auto t1 = types.find(r.concept_id1);
    auto t2 = types.find(r.concept_id2);
    if (t1 == types.end() || t2 == types.end()) {
      out.drops.push_back(drop(profile.name, doc.id, r, "pairing", "entity not found"));
      continue;
    }
    if (!profile.allows(t1->second, t2->second)) {
      out.drops.push_back(drop(profile.name, doc.id, r, "pairing",
                               "pair type " + pair_type_key(t1->second, t2->second) +
                                   " not allowed"));
      continue;
    }
    auto pair = canonicalize_pair({r.concept_id1, t1->second},
                                  {r.concept_id2, t2->second});
    auto label = map_label(r.label_text, profile);
    auto [it, inserted] = annotated.emplace(pair, Annotated{label, &r});
    if (inserted) continue;
    if (it->second.label == label) {
      out.drops.push_back(drop(profile.name, doc.id, r, "policy", "duplicate annotation"));
      continue;
    }
    throw ConflictError("document " + doc.id + ": pair " + pair.first.id + "|" +
                        pair.second.id + " annotated as both " +
                        it->second.label.render() + " and " + label.render());
  }

  std::vector<SentenceSpan> sentences;
  if (profile.level == ContextLevel::Sentence) sentences = segment_sentences(doc);

  for (const auto& candidate : enumerate_pairs(doc, profile.allowed_pairs)) {
    auto context = delimit_context(doc, sentences, candidate.pair, profile.level);
    auto it = annotated.find(candidate.pair);
    if (it != annotated.end()) {
      if (!context) {
        out.drops.push_back(drop(profile.name, doc.id, *it->second.relation,
                                 "context", "no co-occurring sentence"));
        continue;
      }
      out.pairs.push_back(LabeledPair{candidate.pair, it->second.label,
                                      context->level, context->start, context->end});
      continue;
    }
    if (!context) continue;
    switch (profile.negative_policy) {
      case NegativePolicy::C1:
        out.pairs.push_back(LabeledPair{candidate.pair,
                                        RelationLabel::internal_none(profile.name),
                                        context->level, context->start, context->end});
        break;
      case NegativePolicy::C2:
        out.pairs.push_back(LabeledPair{candidate.pair, LabelKind::None,
                                        context->level, context->start, context->end});
        break;
      case NegativePolicy::C3:
        break;
    }
  }
  return out;
}

HarmonizeResult harmonize_corpus(const std::vector<Document>& docs,
                                 const CorpusProfile& profile,
                                 const HarmonizeOptions& options) {
  profile.validate();
  check_retag_config(profile);
  if (profile.span_solution != SpanSolution::A1 && options.annotations.empty()) {
    throw ConfigError(std::string("span solution ") +
                      std::string(to_string(profile.span_solution)) +
                      " needs an auto annotation file or a lexicon");
  }

  HarmonizeResult result;
  result.corpus.corpus_tag = profile.name;

  std::vector<Document> inputs = docs;
  if (options.repository != nullptr) {
    std::map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < inputs.size(); ++i) by_id.emplace(inputs[i].id, i);
    for (const auto& rec : *options.repository) {
      SourceRelation r{rec.first.id, rec.second.id, rec.label_text};
      auto it = by_id.find(rec.doc_id);
      if (it == by_id.end()) {
        result.report.push_back(drop(profile.name, rec.doc_id, r, "repository",
                                     "document text not available"));
        continue;
      }
      inputs[it->second].relations.push_back(std::move(r));
    }
  }

  auto outcomes = parallel_map(inputs, options.threads, [&](const Document& doc) {
    return harmonize_document(doc, profile, options.annotations);
  });
  for (auto& o : outcomes) {
    result.report.insert(result.report.end(),
                         std::make_move_iterator(o.report.begin()),
                         std::make_move_iterator(o.report.end()));
    if (o.doc) result.corpus.documents.push_back(std::move(*o.doc));
  }
  return result;
}

HarmonizedCorpus merge_corpora(const std::vector<HarmonizedCorpus>& corpora) {
  HarmonizedCorpus merged;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < corpora.size(); ++i) {
    const auto& c = corpora[i];
    std::set<std::string> tags{c.corpus_tag};
    for (const auto& d : c.documents) tags.insert(d.corpus_tag);
    for (const auto& t : tags) {
      if (seen.contains(t)) {
        throw ValidationError("corpus tag " + t + " appears in more than one input");
      }
    }
    seen.insert(tags.begin(), tags.end());
    merged.corpus_tag += (i ? "+" : "") + c.corpus_tag;
    merged.documents.insert(merged.documents.end(), c.documents.begin(),
                            c.documents.end());
  }
  return merged;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

ordered_json document_json(const HarmonizedDocument& hd) {
  ordered_json j;
  j["corpus"] = hd.corpus_tag;
  j["id"] = hd.doc.id;
  j["title"] = hd.doc.title;
  j["abstract"] = hd.doc.abstract_text;
  j["mentions"] = ordered_json::array();
  for (const auto& m : hd.doc.mentions) {
    ordered_json jm;
    jm["start"] = m.start;
    jm["end"] = m.end;
    jm["text"] = m.text;
    jm["type"] = m.type.render();
    jm["ids"] = m.concept_ids;
    j["mentions"].push_back(std::move(jm));
  }
  j["relations"] = ordered_json::array();
  for (const auto& r : hd.doc.relations) {
    j["relations"].push_back(
        {{"id1", r.concept_id1}, {"id2", r.concept_id2}, {"label", r.label_text}});
  }
  j["pairs"] = ordered_json::array();
  for (const auto& p : hd.pairs) {
    ordered_json jp;
    jp["id1"] = p.pair.first.id;
    jp["type1"] = p.pair.first.type.render();
    jp["id2"] = p.pair.second.id;
    jp["type2"] = p.pair.second.type.render();
    jp["label"] = p.label.render();
    jp["level"] = level_name(p.level);
    jp["start"] = p.start;
    jp["end"] = p.end;
    j["pairs"].push_back(std::move(jp));
  }
  return j;
}

HarmonizedDocument document_from_json(const nlohmann::json& j) {
  HarmonizedDocument hd;
  hd.corpus_tag = j.at("corpus").get<std::string>();
  hd.doc.id = j.at("id").get<std::string>();
  hd.doc.title = j.at("title").get<std::string>();
  hd.doc.abstract_text = j.at("abstract").get<std::string>();
  const auto text = hd.doc.text();
  for (const auto& jm : j.at("mentions")) {
    EntityMention m;
    m.start = jm.at("start").get<std::size_t>();
    m.end = jm.at("end").get<std::size_t>();
    m.text = jm.at("text").get<std::string>();
    m.type = EntityType::parse(jm.at("type").get<std::string>());
    m.concept_ids = jm.at("ids").get<std::vector<std::string>>();
    validate_mention(text, m);
    hd.doc.mentions.push_back(std::move(m));
  }
  sort_mentions(hd.doc.mentions);
  for (const auto& jr : j.at("relations")) {
    hd.doc.relations.push_back(SourceRelation{jr.at("id1").get<std::string>(),
                                              jr.at("id2").get<std::string>(),
                                              jr.at("label").get<std::string>()});
  }
  for (const auto& jp : j.at("pairs")) {
    ConceptRef a{jp.at("id1").get<std::string>(),
                 EntityType::parse(jp.at("type1").get<std::string>())};
    ConceptRef b{jp.at("id2").get<std::string>(),
                 EntityType::parse(jp.at("type2").get<std::string>())};
    LabeledPair p;
    p.pair = canonicalize_pair(a, b);
    if (p.pair.first != a) {
      throw ValidationError("pair " + a.id + "|" + b.id + " is not in canonical order");
    }
    p.label = RelationLabel::parse(jp.at("label").get<std::string>());
    p.level = level_from_name(jp.at("level").get<std::string>());
    p.start = jp.at("start").get<std::size_t>();
    p.end = jp.at("end").get<std::size_t>();
    if (p.start > p.end || p.end > text.size()) {
      throw ValidationError("pair context span outside document " + hd.doc.id);
    }
    hd.pairs.push_back(std::move(p));
  }
  return hd;
}

std::string_view kind_name(ReportRecord::Kind k) {
  return k == ReportRecord::Kind::Drop ? "drop" : "warning";
}

}  // namespace

std::string write_harmonized(const HarmonizedCorpus& corpus) {
  std::ostringstream out;
  out << "{\"corpus\":" << nlohmann::json(corpus.corpus_tag).dump()
      << ",\"documents\":[";
  for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
    out << (i ? ",\n" : "\n") << document_json(corpus.documents[i]).dump();
  }
  out << "\n]}\n";
  return out.str();
}

HarmonizedCorpus parse_harmonized(std::string_view input) {
  HarmonizedCorpus corpus;
  try {
    auto j = nlohmann::json::parse(input);
    corpus.corpus_tag = j.at("corpus").get<std::string>();
    for (const auto& jd : j.at("documents")) {
      corpus.documents.push_back(document_from_json(jd));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("malformed harmonized corpus: ") + e.what());
  } catch (const ValidationError& e) {
    throw ParseError(0, std::string("invalid harmonized corpus: ") + e.what());
  }
  return corpus;
}

std::string write_report(const std::vector<ReportRecord>& report) {
  std::string out;
  for (const auto& r : report) {
    ordered_json j;
    j["kind"] = kind_name(r.kind);
    j["corpus"] = r.corpus;
    j["doc_id"] = r.doc_id;
    j["pair"] = {r.id1, r.id2};
    j["stage"] = r.stage;
    j["reason"] = r.reason;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<ReportRecord> parse_report(std::string_view input) {
  std::vector<ReportRecord> out;
  auto lines = split_lines(input);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    try {
      auto j = nlohmann::json::parse(lines[i]);
      ReportRecord r;
      const auto kind = j.at("kind").get<std::string>();
      if (kind == "drop") {
        r.kind = ReportRecord::Kind::Drop;
      } else if (kind == "warning") {
        r.kind = ReportRecord::Kind::Warning;
      } else {
        throw ParseError(i + 1, "unknown report kind '" + kind + "'");
      }
      r.corpus = j.at("corpus").get<std::string>();
      r.doc_id = j.at("doc_id").get<std::string>();
      r.id1 = j.at("pair").at(0).get<std::string>();
      r.id2 = j.at("pair").at(1).get<std::string>();
      r.stage = j.at("stage").get<std::string>();
      r.reason = j.at("reason").get<std::string>();
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(i + 1, std::string("malformed report record: ") + e.what());
    }
  }
  return out;
}

}  // namespace relmerge
