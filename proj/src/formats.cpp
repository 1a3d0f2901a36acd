#include "relmerge/formats.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "relmerge/error.hpp"

namespace relmerge {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string_view> split_lines(std::string_view input) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < input.size()) {
    auto nl = input.find('\n', pos);
    auto end = nl == std::string_view::npos ? input.size() : nl;
    auto line = input.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return lines;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    auto next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      parts.push_back(s.substr(pos));
      return parts;
    }
    parts.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
}

namespace {

std::size_t parse_offset(std::string_view field, std::size_t line) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(line, "invalid offset '" + std::string(field) + "'");
  }
  return value;
}

std::vector<std::string> parse_concept_ids(std::string_view field,
                                           std::size_t line) {
  std::vector<std::string> ids;
  for (auto part : split(field, ',')) {
    if (part.empty()) {
      throw ParseError(line, "empty concept id in '" + std::string(field) + "'");
    }
    ids.emplace_back(part);
  }
  return ids;
}

EntityType parse_type_field(std::string_view field, std::size_t line) {
  try {
    return EntityType::parse(field);
  } catch (const ValidationError& e) {
    throw ParseError(line, e.what());
  }
}

EntityMention parse_annotation_fields(const std::vector<std::string_view>& cols,
                                      std::size_t line) {
  EntityMention m;
  m.start = parse_offset(cols[1], line);
  m.end = parse_offset(cols[2], line);
  m.text = std::string(cols[3]);
  m.type = parse_type_field(cols[4], line);
  m.concept_ids = parse_concept_ids(cols[5], line);
  return m;
}

// "ID|t|..." or "ID|a|...": returns the section letter and id.
bool split_text_line(std::string_view line, std::string_view& id, char& section,
                     std::string_view& body) {
  auto bar = line.find('|');
  if (bar == std::string_view::npos || bar + 3 > line.size()) return false;
  if (line.substr(0, bar).find('\t') != std::string_view::npos) return false;
  if (line[bar + 2] != '|') return false;
  char s = line[bar + 1];
  if (s != 't' && s != 'a') return false;
  id = line.substr(0, bar);
  section = s;
  body = line.substr(bar + 3);
  return true;
}

struct BlockBuilder {
  Document doc;
  std::string text;
  bool has_abstract = false;
  std::size_t first_line = 0;
};

void check_field(const std::string& value, std::string_view what,
                 std::string_view forbidden) {
  if (value.find_first_of(forbidden) != std::string::npos) {
    throw ValidationError(std::string(what) + " '" + value +
                          "' contains a character the format cannot carry");
  }
}

}  // namespace

std::vector<Document> parse_pubtator(std::string_view input) {
  std::vector<Document> docs;
  std::set<std::string> seen_ids;
  std::optional<BlockBuilder> block;

  auto finish = [&](std::size_t line) {
    if (!block) return;
    if (!block->has_abstract) {
      throw ParseError(block->first_line,
                       "document " + block->doc.id + " has no abstract line");
    }
    sort_mentions(block->doc.mentions);
    docs.push_back(std::move(block->doc));
    block.reset();
    (void)line;
  };

  auto lines = split_lines(input);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    auto line = lines[i];
    if (line.empty()) {
      finish(lineno);
      continue;
    }
    if (line.front() == '#') continue;

    std::string_view id;
    char section = 0;
    std::string_view body;
    if (split_text_line(line, id, section, body)) {
      if (id.empty()) throw ParseError(lineno, "empty document id");
      if (section == 't') {
        finish(lineno);
        if (!seen_ids.insert(std::string(id)).second) {
          throw ParseError(lineno, "duplicate document id " + std::string(id));
        }
        block.emplace();
        block->doc.id = std::string(id);
        block->doc.title = std::string(body);
        block->first_line = lineno;
        continue;
      }
      if (!block || block->has_abstract || block->doc.id != id) {
        throw ParseError(lineno, "abstract line for " + std::string(id) +
                                     " does not follow its title line");
      }
      block->doc.abstract_text = std::string(body);
      block->has_abstract = true;
      block->text = block->doc.text();
      continue;
    }

    auto cols = split(line, '\t');
    if (!block || !block->has_abstract) {
      throw ParseError(lineno, "annotation line outside a document block");
    }
    if (cols[0] != block->doc.id) {
      throw ParseError(lineno, "line id " + std::string(cols[0]) +
                                   " does not match document " + block->doc.id);
    }
    if (cols.size() == 6) {
      auto m = parse_annotation_fields(cols, lineno);
      try {
        validate_mention(block->text, m);
      } catch (const ValidationError& e) {
        throw ParseError(lineno, e.what());
      }
      block->doc.mentions.push_back(std::move(m));
    } else if (cols.size() == 4 || cols.size() == 5) {
      SourceRelation r{std::string(cols[2]), std::string(cols[3]),
                       std::string(cols[1])};
      if (r.concept_id1.empty() || r.concept_id2.empty() || r.label_text.empty()) {
        throw ParseError(lineno, "relation line has an empty field");
      }
      if (r.concept_id1 == r.concept_id2) {
        throw ParseError(lineno, "self-pair relation on " + r.concept_id1);
      }
      block->doc.relations.push_back(std::move(r));
    } else {
      throw ParseError(lineno, "expected 4, 5 or 6 tab-separated columns, got " +
                                   std::to_string(cols.size()));
    }
  }
  finish(lines.size());
  return docs;
}

std::string write_pubtator(std::span<const Document> docs) {
  std::ostringstream out;
  for (const auto& doc : docs) {
    if (doc.id.empty()) throw ValidationError("document with empty id");
    check_field(doc.id, "document id", "|\t\n\r");
    if (doc.id.front() == '#') {
      throw ValidationError("document id '" + doc.id + "' would read back as a comment");
    }
    check_field(doc.title, "title", "\n\r");
    check_field(doc.abstract_text, "abstract", "\n\r");
    const auto text = doc.text();
    out << doc.id << "|t|" << doc.title << '\n';
    out << doc.id << "|a|" << doc.abstract_text << '\n';

    auto mentions = doc.mentions;
    sort_mentions(mentions);
    for (const auto& m : mentions) {
      validate_mention(text, m);
      check_field(m.text, "mention text", "\t\n\r");
      out << doc.id << '\t' << m.start << '\t' << m.end << '\t' << m.text << '\t'
          << m.type.render() << '\t';
      for (std::size_t k = 0; k < m.concept_ids.size(); ++k) {
        check_field(m.concept_ids[k], "concept id", ",\t\n\r");
        out << (k ? "," : "") << m.concept_ids[k];
      }
      out << '\n';
    }

    auto mentioned = [&](const std::string& id) {
      return std::any_of(mentions.begin(), mentions.end(),
                         [&](const EntityMention& m) { return m.carries(id); });
    };
    for (const auto& r : doc.relations) {
      check_field(r.label_text, "relation label", "\t\n\r");
      check_field(r.concept_id1, "concept id", "\t\n\r");
      check_field(r.concept_id2, "concept id", "\t\n\r");
      if (!mentioned(r.concept_id1) || !mentioned(r.concept_id2)) {
        out << "# unresolved relation: " << r.concept_id1 << ' '
            << r.concept_id2 << '\n';
      }
      out << doc.id << '\t' << r.label_text << '\t' << r.concept_id1 << '\t'
          << r.concept_id2 << '\n';
    }
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------

std::vector<RepositoryRecord> parse_repository(
    std::string_view input, const std::pair<EntityType, EntityType>& types) {
  std::vector<RepositoryRecord> records;
  auto lines = split_lines(input);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    auto line = lines[i];
    if (line.empty() || line.front() == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() != 3 && cols.size() != 4) {
      throw ParseError(lineno, "expected 3 or 4 tab-separated columns, got " +
                                   std::to_string(cols.size()));
    }
    for (auto c : cols) {
      if (c.empty()) throw ParseError(lineno, "empty column");
    }
    if (cols[1] == cols[2]) {
      throw ParseError(lineno, "self-pair relation on " + std::string(cols[1]));
    }
    records.push_back(RepositoryRecord{
        std::string(cols[0]),
        ConceptRef{std::string(cols[1]), types.first},
        ConceptRef{std::string(cols[2]), types.second},
        cols.size() == 4 ? std::string(cols[3]) : std::string("Association")});
  }
  return records;
}

AnnotationIndex parse_annotations(std::string_view input) {
  AnnotationIndex index;
  auto lines = split_lines(input);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    auto line = lines[i];
    if (line.empty() || line.front() == '#') continue;
    std::string_view id;
    char section = 0;
    std::string_view body;
    if (split_text_line(line, id, section, body)) continue;
    auto cols = split(line, '\t');
    if (cols.size() != 6) {
      throw ParseError(lineno, "expected 6 tab-separated columns, got " +
                                   std::to_string(cols.size()));
    }
    if (cols[0].empty()) throw ParseError(lineno, "empty document id");
    index[std::string(cols[0])].push_back(parse_annotation_fields(cols, lineno));
  }
  return index;
}

// ---------------------------------------------------------------------------

namespace {

template <typename Enum, std::size_t N>
Enum parse_axis(const ordered_json& j, const char* key,
                const std::array<Enum, N>& values) {
  if (!j.contains(key)) {
    throw ValidationError(std::string("profile is missing axis '") + key + "'");
  }
  if (!j.at(key).is_string()) {
    throw ValidationError(std::string("profile axis '") + key +
                          "' must be a string");
  }
  const auto code = j.at(key).get<std::string>();
  for (Enum v : values) {
    if (to_string(v) == code) return v;
  }
  throw ValidationError(std::string("unknown code '") + code + "' for axis '" +
                        key + "'");
}

}  // namespace

CorpusProfile parse_profile(std::string_view input) {
  ordered_json j;
  try {
    j = ordered_json::parse(input);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, std::string("profile is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("profile must be a JSON object");

  static const std::set<std::string> known{
      "name",          "span_solution",   "level",        "negative_policy",
      "granularity",   "entity_policy",   "label_map",    "entity_type_map",
      "allowed_pairs"};
  for (const auto& item : j.items()) {
    if (!known.contains(item.key())) {
      throw ValidationError("unknown profile key '" + item.key() + "'");
    }
  }

  CorpusProfile p;
  try {
    if (!j.contains("name")) throw ValidationError("profile is missing 'name'");
    p.name = j.at("name").get<std::string>();
    p.span_solution = parse_axis(
        j, "span_solution",
        std::array{SpanSolution::A1, SpanSolution::A2, SpanSolution::A3});
    p.level = parse_axis(j, "level",
                         std::array{ContextLevel::Document, ContextLevel::Sentence});
    p.negative_policy = parse_axis(
        j, "negative_policy",
        std::array{NegativePolicy::C1, NegativePolicy::C2, NegativePolicy::C3});
    p.granularity =
        parse_axis(j, "granularity", std::array{Granularity::D1, Granularity::D2});
    p.entity_policy = parse_axis(j, "entity_policy",
                                 std::array{EntityPolicy::E1, EntityPolicy::E2});
    if (j.contains("label_map")) {
      for (const auto& item : j.at("label_map").items()) {
        p.label_map.emplace(item.key(),
                            RelationLabel::parse(item.value().get<std::string>()));
      }
    }
    if (j.contains("entity_type_map")) {
      for (const auto& item : j.at("entity_type_map").items()) {
        p.entity_type_map.emplace(
            item.key(), EntityType::parse(item.value().get<std::string>()));
      }
    }
    if (!j.contains("allowed_pairs")) {
      throw ValidationError("profile is missing 'allowed_pairs'");
    }
    for (const auto& pair : j.at("allowed_pairs")) {
      if (!pair.is_array() || pair.size() != 2) {
        throw ValidationError("allowed_pairs entries must be [kind, kind]");
      }
      auto a = kind_from_name(pair[0].get<std::string>());
      auto b = kind_from_name(pair[1].get<std::string>());
      if (!a || !b) {
        throw ValidationError("allowed_pairs entry " + pair.dump() +
                              " is not a pair of canonical kinds");
      }
      p.allowed_pairs.insert(KindPair(*a, *b));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed profile: ") + e.what());
  }
  p.validate();
  return p;
}

std::string write_profile(const CorpusProfile& p) {
  ordered_json j;
  j["name"] = p.name;
  j["span_solution"] = to_string(p.span_solution);
  j["level"] = to_string(p.level);
  j["negative_policy"] = to_string(p.negative_policy);
  j["granularity"] = to_string(p.granularity);
  j["entity_policy"] = to_string(p.entity_policy);
  j["label_map"] = ordered_json::object();
  for (const auto& [k, v] : p.label_map) j["label_map"][k] = v.render();
  j["entity_type_map"] = ordered_json::object();
  for (const auto& [k, v] : p.entity_type_map) j["entity_type_map"][k] = v.render();
  j["allowed_pairs"] = ordered_json::array();
  for (const auto& kp : p.allowed_pairs) {
    j["allowed_pairs"].push_back({kind_name(kp.first), kind_name(kp.second)});
  }
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

std::string write_instance(const CandidateInstance& inst) {
  ordered_json j;
  j["doc_id"] = inst.doc_id;
  j["corpus"] = inst.corpus_tag;
  j["id1"] = inst.pair.first.id;
  j["type1"] = inst.pair.first.type.render();
  j["id2"] = inst.pair.second.id;
  j["type2"] = inst.pair.second.type.render();
  j["prompt"] = inst.prompt;
  j["context"] = inst.context;
  j["label"] = inst.label.render();
  j["level"] = level_name(inst.level);
  try {
    return j.dump();
  } catch (const nlohmann::json::type_error& e) {
    throw ValidationError(std::string("instance is not valid UTF-8: ") + e.what());
  }
}

void write_instances(std::span<const CandidateInstance> instances,
                     std::ostream& out) {
  for (const auto& inst : instances) out << write_instance(inst) << '\n';
}

std::vector<CandidateInstance> parse_instances(std::string_view input) {
  std::vector<CandidateInstance> out;
  auto lines = split_lines(input);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    if (lines[i].empty()) continue;
    try {
      auto j = nlohmann::json::parse(lines[i]);
      if (!j.is_object() || j.size() != 10) {
        throw ParseError(lineno, "instance record must have exactly 10 keys");
      }
      CandidateInstance inst;
      inst.doc_id = j.at("doc_id").get<std::string>();
      inst.corpus_tag = j.at("corpus").get<std::string>();
      ConceptRef a{j.at("id1").get<std::string>(),
                   EntityType::parse(j.at("type1").get<std::string>())};
      ConceptRef b{j.at("id2").get<std::string>(),
                   EntityType::parse(j.at("type2").get<std::string>())};
      inst.pair = canonicalize_pair(a, b);
      if (inst.pair.first != a) {
        throw ParseError(lineno, "pair is not in canonical order");
      }
      inst.prompt = j.at("prompt").get<std::string>();
      inst.context = j.at("context").get<std::string>();
      inst.label = RelationLabel::parse(j.at("label").get<std::string>());
      inst.level = level_from_name(j.at("level").get<std::string>());
      out.push_back(std::move(inst));
    } catch (const ParseError&) {
      throw;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(lineno, std::string("malformed instance record: ") + e.what());
    } catch (const ValidationError& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return out;
}

}  // namespace relmerge
