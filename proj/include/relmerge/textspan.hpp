#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "relmerge/model.hpp"

namespace relmerge {

struct SentenceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t index = 0;

  auto operator<=>(const SentenceSpan&) const = default;
};

// Tokens that do not end a sentence when followed by '.'. Compared
// case-insensitively against the token before the period. Single uppercase
// initials ("J. Smith") and "et al." are handled separately.
inline constexpr std::string_view kAbbreviationsVersion = "1";
const std::vector<std::string_view>& abbreviations();

// Rule-based segmentation. A boundary follows '.', '!' or '?' when the next
// character is whitespace and the first non-space character after it is an
// uppercase ASCII letter or a digit, unless the period closes an
// abbreviation. When `title_end` is given, text before it is one sentence
// regardless of punctuation. Spans are trimmed of surrounding whitespace.
std::vector<SentenceSpan> segment_sentences(
    std::string_view text, std::optional<std::size_t> title_end = std::nullopt);

std::vector<SentenceSpan> segment_sentences(const Document& doc);

class Lexicon {
 public:
  struct Entry {
    EntityType type;
    std::vector<std::string> concept_ids;
  };

  // Surface forms are trimmed and matched case-insensitively (ASCII).
  // Throws ValidationError on an empty surface or a duplicate.
  void add(std::string_view surface, EntityType type,
           std::vector<std::string> concept_ids);
  const Entry* find(std::string_view lowered) const;
  std::size_t max_length() const { return max_length_; }
  std::size_t size() const { return entries_.size(); }

  // SURFACE<TAB>TYPE<TAB>ID1,ID2,... per line; '#' comments.
  static Lexicon parse(std::string_view input);

 private:
  std::unordered_map<std::string, Entry> entries_;
  std::size_t max_length_ = 0;
};

// Greedy left-to-right longest match on token boundaries. Output is sorted
// by start and pairwise non-overlapping.
std::vector<EntityMention> dictionary_match(std::string_view text,
                                            const Lexicon& lexicon);

struct AttachResult {
  Document doc;
  std::vector<std::string> warnings;  // one per rejected auto mention
};

// Union of the document's mentions and `auto_mentions`, de-duplicated on
// (start, end, concept ids). Existing mentions win on exact-span conflicts.
AttachResult attach_annotations(const Document& doc,
                                const std::vector<EntityMention>& auto_mentions);

// First sentence holding a mention of `id1` and a mention of `id2` (one
// composite mention may carry both). Symmetric in the two ids.
std::optional<SentenceSpan> find_cooccurrence(
    const Document& doc, std::string_view id1, std::string_view id2);
std::optional<SentenceSpan> find_cooccurrence(
    const Document& doc, const std::vector<SentenceSpan>& sentences,
    std::string_view id1, std::string_view id2);

}  // namespace relmerge
