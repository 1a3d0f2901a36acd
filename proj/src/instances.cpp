#include "relmerge/instances.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "relmerge/error.hpp"
#include "relmerge/parallel.hpp"

namespace relmerge {

std::vector<PairCandidate> enumerate_pairs(const Document& doc,
                                           const std::set<KindPair>& allowed) {
  std::map<std::string, EntityType> types;
  for (const auto& m : doc.mentions) {
    for (const auto& id : m.concept_ids) types.emplace(id, m.type);
  }

  std::vector<PairCandidate> out;
  for (auto a = types.begin(); a != types.end(); ++a) {
    for (auto b = std::next(a); b != types.end(); ++b) {
      auto ka = a->second.base_kind();
      auto kb = b->second.base_kind();
      if (!ka || !kb || !allowed.contains(KindPair(*ka, *kb))) continue;
      PairCandidate c{canonicalize_pair({a->first, a->second}, {b->first, b->second}),
                      {}};
      for (std::size_t i = 0; i < doc.mentions.size(); ++i) {
        if (doc.mentions[i].carries(a->first) || doc.mentions[i].carries(b->first)) {
          c.mentions.push_back(i);
        }
      }
      out.push_back(std::move(c));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const PairCandidate& x, const PairCandidate& y) { return x.pair < y.pair; });
  return out;
}

std::string tag_context(std::string_view context, std::size_t context_offset,
                        const std::vector<EntityMention>& mentions) {
  if (mentions.empty()) {
    throw ValidationError("context has no mention of the pair to tag");
  }
  struct Span {
    std::size_t start;
    std::size_t end;
    std::string tag;
  };
  std::vector<Span> spans;
  for (const auto& m : mentions) {
    if (m.start < context_offset || m.end > context_offset + context.size() ||
        m.start >= m.end) {
      throw ValidationError("mention '" + m.text + "' lies outside the context");
    }
    const std::size_t s = m.start - context_offset;
    const std::size_t e = m.end - context_offset;
    bool same_span = std::any_of(spans.begin(), spans.end(), [&](const Span& x) {
      return x.start == s && x.end == e;
    });
    if (!same_span) spans.push_back(Span{s, e, m.type.tag_code()});
  }
  // Outer spans first; stable so that input order breaks exact ties.
  std::stable_sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) {
    return std::tie(a.start, b.end) < std::tie(b.start, a.end);
  });

  std::vector<const Span*> kept;
  std::vector<const Span*> open;
  for (const auto& s : spans) {
    while (!open.empty() && open.back()->end <= s.start) open.pop_back();
    if (!open.empty() && s.end > open.back()->end) continue;  // crosses
    kept.push_back(&s);
    open.push_back(&s);
  }

  // (position, closes before opens, order) with inner spans closing first.
  struct Event {
    std::size_t pos;
    int kind;
    long order;
    const Span* span;
  };
  std::vector<Event> events;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    events.push_back(Event{kept[i]->start, 1, static_cast<long>(i), kept[i]});
    events.push_back(Event{kept[i]->end, 0, -static_cast<long>(i), kept[i]});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    return std::tie(a.pos, a.kind, a.order) < std::tie(b.pos, b.kind, b.order);
  });

  std::string out;
  out.reserve(context.size() + events.size() * 4);
  std::size_t pos = 0;
  for (const auto& ev : events) {
    out.append(context.substr(pos, ev.pos - pos));
    pos = ev.pos;
    out += ev.kind == 1 ? "<" : "</";
    out += ev.span->tag;
    out += '>';
  }
  out.append(context.substr(pos));
  return out;
}

std::string strip_tags(std::string_view tagged, const std::set<std::string>& tags) {
  std::string out;
  out.reserve(tagged.size());
  std::size_t i = 0;
  while (i < tagged.size()) {
    if (tagged[i] == '<') {
      bool matched = false;
      for (const auto& t : tags) {
        for (std::string_view prefix : {"<", "</"}) {
          std::string marker = std::string(prefix) + t + ">";
          if (tagged.substr(i, marker.size()) == marker) {
            i += marker.size();
            matched = true;
            break;
          }
        }
        if (matched) break;
      }
      if (matched) continue;
    }
    out.push_back(tagged[i++]);
  }
  return out;
}

std::string build_prompt(std::string_view corpus_tag, std::string_view name1,
                         std::string_view name2) {
  std::string out = "What is the relation in ";
  out += corpus_tag;
  out += " between ";
  out += name1;
  out += " and ";
  out += name2;
  out += '?';
  return out;
}

namespace {

std::string first_surface(const Document& doc, const std::string& id) {
  for (const auto& m : doc.mentions) {
    if (m.carries(id)) return m.text;
  }
  throw ValidationError("document " + doc.id + " has no mention of " + id);
}

std::vector<CandidateInstance> document_instances(const HarmonizedDocument& hd,
                                                  const InstanceOptions& options) {
  std::vector<CandidateInstance> out;
  const auto text = hd.doc.text();
  const std::string& tag = options.corpus_tag ? *options.corpus_tag : hd.corpus_tag;
  for (const auto& lp : hd.pairs) {
    if (lp.start > lp.end || lp.end > text.size()) {
      throw ValidationError("context span outside document " + hd.doc.id);
    }
    std::vector<EntityMention> members;
    for (const auto& m : hd.doc.mentions) {
      if (m.start < lp.start || m.end > lp.end) continue;
      if (m.carries(lp.pair.first.id) || m.carries(lp.pair.second.id)) {
        members.push_back(m);
      }
    }
    CandidateInstance inst;
    inst.doc_id = hd.doc.id;
    inst.corpus_tag = tag;
    inst.pair = lp.pair;
    inst.prompt = build_prompt(tag, first_surface(hd.doc, lp.pair.first.id),
                               first_surface(hd.doc, lp.pair.second.id));
    inst.context = tag_context(
        std::string_view(text).substr(lp.start, lp.end - lp.start), lp.start, members);
    inst.label = lp.label;
    inst.level = lp.level;
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace

std::vector<CandidateInstance> generate_instances(const HarmonizedCorpus& corpus,
                                                  const InstanceOptions& options) {
  auto per_doc = parallel_map(corpus.documents, options.threads,
                              [&](const HarmonizedDocument& hd) {
                                return document_instances(hd, options);
                              });
  std::vector<CandidateInstance> out;
  for (auto& batch : per_doc) {
    out.insert(out.end(), std::make_move_iterator(batch.begin()),
               std::make_move_iterator(batch.end()));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const CandidateInstance& a, const CandidateInstance& b) {
                     return std::tie(a.corpus_tag, a.doc_id, a.pair) <
                            std::tie(b.corpus_tag, b.doc_id, b.pair);
                   });
  return out;
}

}  // namespace relmerge
