#pragma once

// Candidate instances: one classification unit per labeled pair, made of a
// prompt question and the pair's context with boundary tags around every
// mention of either concept.

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "relmerge/harmonize.hpp"
#include "relmerge/model.hpp"

namespace relmerge {

inline constexpr std::string_view kDefaultCorpusTag = "BioRED";

struct PairCandidate {
  CanonicalPair pair;
  // Indices into doc.mentions of every mention carrying either concept id.
  std::vector<std::size_t> mentions;

  bool operator==(const PairCandidate&) const = default;
};

// Composite mentions contribute one concept per id. A concept's type is the
// type of its first mention. Pairs of distinct ids whose base kinds form an
// allowed pair are returned, sorted.
std::vector<PairCandidate> enumerate_pairs(const Document& doc,
                                           const std::set<KindPair>& allowed);

// Wraps each mention in <T>...</T> with T = EntityType::tag_code().
// Offsets are over the full document text; `context_offset` is where
// `context` starts in it. Mentions sharing a span are tagged once. Nested
// mentions are tagged outer first; a mention crossing an already tagged one
// is left untagged. Throws ValidationError when `mentions` is empty or a
// mention lies outside the context.
std::string tag_context(std::string_view context, std::size_t context_offset,
                        const std::vector<EntityMention>& mentions);

// Removes every <tag> / </tag> produced by tag_context for the given tags.
std::string strip_tags(std::string_view tagged, const std::set<std::string>& tags);

// What is the relation in {corpus} between {name1} and {name2}?
std::string build_prompt(std::string_view corpus_tag, std::string_view name1,
                         std::string_view name2);

struct InstanceOptions {
  // Replaces every document's corpus tag in the prompt and record.
  std::optional<std::string> corpus_tag;
  unsigned threads = 1;
};

// One instance per labeled pair, sorted by (corpus tag, doc id, pair).
// A pair member's display name is the surface form of its first mention.
std::vector<CandidateInstance> generate_instances(const HarmonizedCorpus& corpus,
                                                  const InstanceOptions& options = {});

}  // namespace relmerge
