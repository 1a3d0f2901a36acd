#include "relmerge/textspan.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>

#include "relmerge/error.hpp"
#include "relmerge/formats.hpp"

namespace relmerge {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Token ending just before position `end`: alphanumerics and inner periods.
std::string_view token_before(std::string_view text, std::size_t end) {
  std::size_t b = end;
  while (b > 0 && (is_alnum(text[b - 1]) || text[b - 1] == '.')) --b;
  return text.substr(b, end - b);
}

bool closes_abbreviation(std::string_view text, std::size_t period) {
  auto token = token_before(text, period);
  if (token.empty()) return false;
  if (token.size() == 1 && std::isupper(static_cast<unsigned char>(token[0]))) {
    return true;
  }
  const auto lowered = lower_ascii(token);
  if (lowered == "al") {
    std::size_t b = period - token.size();
    while (b > 0 && is_space(text[b - 1])) --b;
    return lower_ascii(token_before(text, b)) == "et";
  }
  const auto& list = abbreviations();
  return std::find(list.begin(), list.end(), lowered) != list.end();
}

}  // namespace

const std::vector<std::string_view>& abbreviations() {
  static const std::vector<std::string_view> list{
      "e.g", "i.e", "fig", "figs", "vs", "cf", "approx", "resp", "ref",
      "refs", "eq", "eqs", "dr", "mr", "mrs", "ms", "no", "nos", "vol"};
  return list;
}

std::vector<SentenceSpan> segment_sentences(std::string_view text,
                                            std::optional<std::size_t> title_end) {
  std::vector<SentenceSpan> out;
  auto emit = [&](std::size_t a, std::size_t b) {
    while (a < b && is_space(text[a])) ++a;
    while (b > a && is_space(text[b - 1])) --b;
    if (a < b) out.push_back(SentenceSpan{a, b, out.size()});
  };

  const std::size_t n = text.size();
  std::size_t start = 0;
  if (title_end) {
    const std::size_t te = std::min(*title_end, n);
    emit(0, te);
    start = te;
  }
  for (std::size_t i = start; i + 1 < n; ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    if (!is_space(text[i + 1])) continue;
    std::size_t j = i + 1;
    while (j < n && is_space(text[j])) ++j;
    if (j == n) break;
    const auto next = static_cast<unsigned char>(text[j]);
    if (!std::isupper(next) && !std::isdigit(next)) continue;
    if (c == '.' && closes_abbreviation(text, i)) continue;
    emit(start, i + 1);
    start = i + 1;
  }
  emit(start, n);
  return out;
}

std::vector<SentenceSpan> segment_sentences(const Document& doc) {
  return segment_sentences(doc.text(), doc.title_end());
}

// ---------------------------------------------------------------------------

void Lexicon::add(std::string_view surface, EntityType type,
                  std::vector<std::string> concept_ids) {
  auto trimmed = trim(surface);
  if (trimmed.empty()) throw ValidationError("lexicon surface form is empty");
  if (concept_ids.empty()) {
    throw ValidationError("lexicon entry '" + std::string(trimmed) +
                          "' has no concept id");
  }
  auto key = lower_ascii(trimmed);
  if (entries_.contains(key)) {
    throw ValidationError("duplicate lexicon surface form '" +
                          std::string(trimmed) + "'");
  }
  max_length_ = std::max(max_length_, key.size());
  entries_.emplace(std::move(key), Entry{std::move(type), std::move(concept_ids)});
}

const Lexicon::Entry* Lexicon::find(std::string_view lowered) const {
  auto it = entries_.find(std::string(lowered));
  return it == entries_.end() ? nullptr : &it->second;
}

Lexicon Lexicon::parse(std::string_view input) {
  Lexicon lex;
  auto lines = split_lines(input);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    auto line = lines[i];
    if (line.empty() || line.front() == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() != 3) {
      throw ParseError(lineno, "expected 3 tab-separated columns, got " +
                                   std::to_string(cols.size()));
    }
    try {
      std::vector<std::string> ids;
      for (auto id : split(cols[2], ',')) {
        if (id.empty()) throw ValidationError("empty concept id");
        ids.emplace_back(id);
      }
      lex.add(cols[0], EntityType::parse(cols[1]), std::move(ids));
    } catch (const ValidationError& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return lex;
}

std::vector<EntityMention> dictionary_match(std::string_view text,
                                            const Lexicon& lexicon) {
  std::vector<EntityMention> out;
  if (lexicon.size() == 0) return out;
  const std::string lowered = lower_ascii(text);
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    if (is_space(text[i]) || (i > 0 && is_alnum(text[i - 1]))) {
      ++i;
      continue;
    }
    bool matched = false;
    for (std::size_t len = std::min(lexicon.max_length(), n - i); len > 0; --len) {
      const std::size_t end = i + len;
      if (end < n && is_alnum(text[end])) continue;
      const auto* entry = lexicon.find(std::string_view(lowered).substr(i, len));
      if (entry == nullptr) continue;
      out.push_back(EntityMention{i, end, std::string(text.substr(i, len)),
                                  entry->type, entry->concept_ids});
      i = end;
      matched = true;
      break;
    }
    if (!matched) ++i;
  }
  return out;
}

// ---------------------------------------------------------------------------

AttachResult attach_annotations(const Document& doc,
                                const std::vector<EntityMention>& auto_mentions) {
  AttachResult result{doc, {}};
  const auto text = doc.text();
  std::set<std::pair<std::size_t, std::size_t>> existing_spans;
  for (const auto& m : doc.mentions) existing_spans.emplace(m.start, m.end);
  std::set<std::tuple<std::size_t, std::size_t, std::vector<std::string>>> added;

  for (const auto& m : auto_mentions) {
    try {
      validate_mention(text, m);
    } catch (const ValidationError& e) {
      result.warnings.push_back("document " + doc.id +
                                ": rejected auto mention: " + e.what());
      continue;
    }
    if (existing_spans.contains({m.start, m.end})) continue;
    if (!added.emplace(m.start, m.end, m.concept_ids).second) continue;
    result.doc.mentions.push_back(m);
  }
  sort_mentions(result.doc.mentions);
  return result;
}

std::optional<SentenceSpan> find_cooccurrence(
    const Document& doc, const std::vector<SentenceSpan>& sentences,
    std::string_view id1, std::string_view id2) {
  for (const auto& s : sentences) {
    bool has1 = false;
    bool has2 = false;
    for (const auto& m : doc.mentions) {
      if (m.start < s.start || m.end > s.end) continue;
      has1 = has1 || m.carries(id1);
      has2 = has2 || m.carries(id2);
    }
    if (has1 && has2) return s;
  }
  return std::nullopt;
}

std::optional<SentenceSpan> find_cooccurrence(const Document& doc,
                                              std::string_view id1,
                                              std::string_view id2) {
  return find_cooccurrence(doc, segment_sentences(doc), id1, id2);
}

}  // namespace relmerge
