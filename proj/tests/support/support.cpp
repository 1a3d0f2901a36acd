#include "support.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace relmerge::testing {

namespace fs = std::filesystem;

std::string data_dir() { return RELMERGE_TEST_DATA_DIR; }
std::string profiles_dir() { return RELMERGE_PROFILES_DIR; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::vector<std::string>& profiled_fixture_names() {
  static const std::vector<std::string> names{
      "biored", "aimed", "drugprot", "ddi", "hprd50",
      "bc5cdr", "emu",   "pharmgkb", "disgenet"};
  return names;
}

const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names = [] {
    auto n = profiled_fixture_names();
    n.push_back("edge");
    return n;
  }();
  return names;
}

std::unique_ptr<Fixture> load_fixture(const std::string& name) {
  auto f = std::make_unique<Fixture>();
  f->name = name;
  const fs::path dir = fs::path(data_dir()) / "corpora" / name;
  f->corpus_path = (dir / "corpus.txt").string();
  f->profile_path =
      (fs::path(profiles_dir()) / ((name == "edge" ? "biored" : name) + ".json")).string();
  f->docs = parse_pubtator(slurp(f->corpus_path));
  f->profile = parse_profile(slurp(f->profile_path));
  f->cli_args = {"harmonize", "--profile", f->profile_path, "--input", f->corpus_path};

  if (fs::exists(dir / "annotations.txt")) {
    f->annotations = parse_annotations(slurp((dir / "annotations.txt").string()));
    f->options.annotations.auto_annotations = &f->annotations;
    f->cli_args.insert(f->cli_args.end(),
                       {"--annotations", (dir / "annotations.txt").string()});
  }
  if (fs::exists(dir / "lexicon.tsv")) {
    f->lexicon = Lexicon::parse(slurp((dir / "lexicon.tsv").string()));
    f->options.annotations.lexicon = &f->lexicon;
    f->cli_args.insert(f->cli_args.end(), {"--lexicon", (dir / "lexicon.tsv").string()});
  }
  if (fs::exists(dir / "repository.tsv")) {
    const auto kinds = *f->profile.allowed_pairs.begin();
    f->repository = parse_repository(slurp((dir / "repository.tsv").string()),
                                     {EntityType(kinds.first), EntityType(kinds.second)});
    f->options.repository = &f->repository;
    f->cli_args.insert(f->cli_args.end(),
                       {"--repository", (dir / "repository.tsv").string()});
  }
  return f;
}

std::size_t input_relation_count(const Fixture& fixture) {
  std::size_t n = fixture.repository.size();
  for (const auto& d : fixture.docs) n += d.relations.size();
  return n;
}

// ---------------------------------------------------------------------------

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

std::string random_token(Rng& rng) {
  static const std::vector<std::string> words{
      "binds", "inhibits", "cells", "Patients", "The", "expression", "of",
      "levels", "in", "and", "was", "e.g.", "Fig.", "vs.", "et", "al.",
      "induced", "(n=12)", "5", "mg.", "IL-2", "p53;", "\xce\xb1-synuclein",
      "caf\xc3\xa9", "\"quoted\"", "back\\slash", "x|y", "#hash", "A.", "B",
      "treated.", "Results!", "why?", "[CLS]", "a<b", "50%", "dose-dependent,"};
  return words[uniform(rng, 0, words.size() - 1)];
}

std::string random_field(Rng& rng, std::size_t max_len) {
  static const std::string alphabet =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 .,;:-_()[]{}<>/\\\"'\t\n|#@";
  const std::size_t len = uniform(rng, 1, max_len);
  std::string out;
  for (std::size_t i = 0; i < len; ++i) {
    if (coin(rng, 0.05)) {
      out += "\xce\xb2";  // a multi-byte character
    } else {
      out += alphabet[uniform(rng, 0, alphabet.size() - 1)];
    }
  }
  return out;
}

namespace {

EntityType random_type(Rng& rng, const RandomDocOptions& options) {
  if (coin(rng, options.internal_rate)) {
    static const std::vector<std::string> tags{"DrugProt-Chem", "BC5CDR-Chem", "Xtag"};
    const auto& tag = tags[uniform(rng, 0, tags.size() - 1)];
    std::optional<Kind> base;
    if (coin(rng, 0.8)) base = static_cast<Kind>(uniform(rng, 0, 2));
    return EntityType::internal(tag, base);
  }
  return static_cast<Kind>(uniform(rng, 0, 2));
}

}  // namespace

Document random_document(Rng& rng, const std::string& id, const RandomDocOptions& options) {
  Document doc;
  doc.id = id;

  const std::size_t title_words = uniform(rng, 1, 6);
  const std::size_t abstract_words = uniform(rng, 0, 40);
  auto join = [&](std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
      if (i) s += ' ';
      s += random_token(rng);
    }
    return s;
  };
  doc.title = join(title_words);
  doc.abstract_text = join(abstract_words);
  const std::string text = doc.text();

  // Word boundaries over the combined text.
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (std::size_t i = 0; i < text.size();) {
    if (text[i] == ' ') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ') ++j;
    spans.emplace_back(i, j);
    i = j;
  }

  const std::size_t n_ids = uniform(rng, 1, options.max_ids);
  std::vector<std::string> ids;
  std::vector<EntityType> types;
  for (std::size_t i = 0; i < n_ids; ++i) {
    ids.push_back((coin(rng) ? "D" : "N") + std::to_string(uniform(rng, 0, 999)) + "_" +
                  std::to_string(i));
    types.push_back(random_type(rng, options));
  }

  const std::size_t n_mentions = uniform(rng, 0, std::min<std::size_t>(12, spans.size() * 2));
  for (std::size_t k = 0; k < n_mentions; ++k) {
    const std::size_t a = uniform(rng, 0, spans.size() - 1);
    const std::size_t b = std::min(spans.size() - 1, a + uniform(rng, 0, 2));
    EntityMention m;
    m.start = spans[a].first;
    m.end = spans[b].second;
    m.text = text.substr(m.start, m.end - m.start);
    const std::size_t primary = uniform(rng, 0, n_ids - 1);
    m.type = types[primary];
    m.concept_ids.push_back(ids[primary]);
    if (coin(rng, options.composite_rate)) {
      // Composite mentions join ids of the same type, as in
      // "breast or ovarian cancer".
      for (std::size_t j = 0; j < n_ids; ++j) {
        if (j != primary && types[j] == types[primary] && coin(rng)) {
          m.concept_ids.push_back(ids[j]);
        }
      }
    }
    doc.mentions.push_back(std::move(m));
  }
  sort_mentions(doc.mentions);

  static const std::vector<std::string> labels{
      "Association", "Positive_Correlation", "Negative_Correlation", "Bind",
      "INHIBITOR",   "ACTIVATOR",            "CID",                  "Interaction",
      "SUBSTRATE",   "Drug_Interaction"};
  const std::size_t n_rel = n_ids >= 2 ? uniform(rng, 0, options.max_relations) : 0;
  for (std::size_t k = 0; k < n_rel; ++k) {
    SourceRelation r;
    const std::size_t a = uniform(rng, 0, n_ids - 1);
    std::size_t b = uniform(rng, 0, n_ids - 2);
    if (b >= a) ++b;
    r.concept_id1 = ids[a];
    r.concept_id2 = ids[b];
    if (coin(rng, options.unresolved_rate)) r.concept_id2 = "U" + std::to_string(k);
    r.label_text = labels[uniform(rng, 0, labels.size() - 1)];
    doc.relations.push_back(std::move(r));
  }
  return doc;
}

std::vector<Document> random_corpus(Rng& rng, std::size_t max_docs,
                                    const RandomDocOptions& options) {
  std::vector<Document> docs;
  const std::size_t n = uniform(rng, 0, max_docs);
  for (std::size_t i = 0; i < n; ++i) {
    docs.push_back(random_document(rng, "doc" + std::to_string(i), options));
  }
  return docs;
}

RelationLabel random_label(Rng& rng, bool allow_negative) {
  const std::size_t hi = allow_negative ? 9 : 7;
  const auto k = static_cast<LabelKind>(uniform(rng, 0, hi));
  if (k == LabelKind::InternalNone) {
    static const std::vector<std::string> corpora{"BC5CDR", "AIMed", "DDI"};
    return RelationLabel::internal_none(corpora[uniform(rng, 0, corpora.size() - 1)]);
  }
  return k;
}

CandidateInstance random_instance(Rng& rng) {
  CandidateInstance inst;
  inst.doc_id = random_field(rng, 12);
  inst.corpus_tag = coin(rng) ? "BioRED" : random_field(rng, 8);
  RandomDocOptions options;
  options.internal_rate = 0.3;
  ConceptRef a{random_field(rng, 10), random_type(rng, options)};
  ConceptRef b{random_field(rng, 10), random_type(rng, options)};
  if (a.id == b.id) b.id += "x";
  inst.pair = canonicalize_pair(a, b);
  inst.prompt = build_prompt(inst.corpus_tag, random_field(rng, 10), random_field(rng, 10));
  inst.context = random_field(rng, 80);
  inst.label = random_label(rng, true);
  inst.level = coin(rng) ? ContextLevel::Document : ContextLevel::Sentence;
  return inst;
}

// ---------------------------------------------------------------------------

std::vector<PairCandidate> brute_force_pairs(const Document& doc,
                                             const std::set<KindPair>& allowed) {
  // Expand every mention into (id, type, mention index) atoms.
  struct Atom {
    std::string id;
    EntityType type;
    std::size_t mention;
  };
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < doc.mentions.size(); ++i) {
    for (const auto& id : doc.mentions[i].concept_ids) {
      atoms.push_back({id, doc.mentions[i].type, i});
    }
  }
  std::vector<std::string> ids;
  std::vector<EntityType> types;
  for (const auto& a : atoms) {
    if (std::find(ids.begin(), ids.end(), a.id) == ids.end()) {
      ids.push_back(a.id);
      types.push_back(a.type);
    }
  }

  std::vector<PairCandidate> out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = 0; j < ids.size(); ++j) {
      if (i == j) continue;
      // Keep only the orientation that is already canonical.
      auto key_i = std::make_tuple(types[i].render(), ids[i]);
      auto key_j = std::make_tuple(types[j].render(), ids[j]);
      if (!(key_i < key_j)) continue;
      auto bi = types[i].base_kind();
      auto bj = types[j].base_kind();
      if (!bi || !bj || !allowed.contains(KindPair(*bi, *bj))) continue;
      PairCandidate c;
      c.pair.first = {ids[i], types[i]};
      c.pair.second = {ids[j], types[j]};
      for (std::size_t m = 0; m < doc.mentions.size(); ++m) {
        const auto& cids = doc.mentions[m].concept_ids;
        if (std::find(cids.begin(), cids.end(), ids[i]) != cids.end() ||
            std::find(cids.begin(), cids.end(), ids[j]) != cids.end()) {
          c.mentions.push_back(m);
        }
      }
      out.push_back(std::move(c));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const PairCandidate& a, const PairCandidate& b) { return a.pair < b.pair; });
  return out;
}

Confusion brute_force_confusion(const std::vector<RelationTuple>& gold,
                                const std::vector<RelationTuple>& pred) {
  auto positive = [](const std::vector<RelationTuple>& v) {
    std::vector<RelationTuple> out;
    for (const auto& t : v) {
      if (!t.label.is_negative()) out.push_back(t);
    }
    return out;
  };
  const auto g = positive(gold);
  const auto p = positive(pred);
  Confusion c;
  for (const auto& t : p) {
    if (std::find(g.begin(), g.end(), t) != g.end()) {
      ++c.tp;
    } else {
      ++c.fp;
    }
  }
  for (const auto& t : g) {
    if (std::find(p.begin(), p.end(), t) == p.end()) ++c.fn;
  }
  return c;
}

const std::set<KindPair>& all_kind_pairs() {
  static const std::set<KindPair> all{
      {Kind::Gene, Kind::Gene},         {Kind::Gene, Kind::Chemical},
      {Kind::Gene, Kind::Disease},      {Kind::Chemical, Kind::Chemical},
      {Kind::Chemical, Kind::Disease},  {Kind::Disease, Kind::Disease}};
  return all;
}

std::vector<PolicyGolden> policy_goldens() {
  auto profile = [](const std::string& name) {
    return parse_profile(slurp(profiles_dir() + "/" + name + ".json"));
  };
  const auto bc5cdr_chem = EntityType::internal("BC5CDR-Chem", Kind::Chemical);
  std::vector<PolicyGolden> out;

  // c1: two chemicals, one disease, one CID annotation.
  {
    PolicyGolden g;
    g.name = "c1 BC5CDR";
    g.profile = profile("bc5cdr");
    g.doc = parse_pubtator(
                "G1|t|Lidocaine in saline preceded asystole.\n"
                "G1|a|\n"
                "G1\t0\t9\tLidocaine\tChemical\tD008012\n"
                "G1\t13\t19\tsaline\tChemical\tD012965\n"
                "G1\t29\t37\tasystole\tDisease\tD006323\n"
                "G1\tCID\tD008012\tD006323\n")
                .front();
    g.doc = retag_entities({g.doc}, g.profile).front();
    g.expected = {
        {CanonicalPair{{"D008012", bc5cdr_chem}, {"D006323", EntityType::disease()}},
         LabelKind::PositiveCorrelation},
        {CanonicalPair{{"D012965", bc5cdr_chem}, {"D006323", EntityType::disease()}},
         RelationLabel::internal_none("BC5CDR")},
    };
    out.push_back(std::move(g));
  }

  // c2: one gene, one chemical, one disease; only the C-D pair annotated.
  {
    PolicyGolden g;
    g.name = "c2 BioRED";
    g.profile = profile("biored");
    g.doc = parse_pubtator(
                "G2|t|Aspirin, COX2 and colitis.\n"
                "G2|a|\n"
                "G2\t0\t7\tAspirin\tChemicalEntity\tC1\n"
                "G2\t9\t13\tCOX2\tGeneOrGeneProduct\tN1\n"
                "G2\t18\t25\tcolitis\tDiseaseOrPhenotypicFeature\tD1\n"
                "G2\tNegative_Correlation\tC1\tD1\n")
                .front();
    g.doc = retag_entities({g.doc}, g.profile).front();
    g.expected = {
        {CanonicalPair{{"C1", EntityType::chemical()}, {"D1", EntityType::disease()}},
         LabelKind::NegativeCorrelation},
        {CanonicalPair{{"C1", EntityType::chemical()}, {"N1", EntityType::gene()}},
         LabelKind::None},
        {CanonicalPair{{"D1", EntityType::disease()}, {"N1", EntityType::gene()}},
         LabelKind::None},
    };
    out.push_back(std::move(g));
  }

  // c3: three genes and one chemical in one sentence, one repository pair.
  {
    PolicyGolden g;
    g.name = "c3 PharmGKB";
    g.profile = profile("pharmgkb");
    g.doc = parse_pubtator(
                "G3|t|Dosing.\n"
                "G3|a|CYP2C9, VKORC1 and CYP4F2 predict warfarin dose.\n"
                "G3\t8\t14\tCYP2C9\tGene\t1559\n"
                "G3\t16\t22\tVKORC1\tGene\t79001\n"
                "G3\t27\t33\tCYP4F2\tGene\t8529\n"
                "G3\t42\t50\twarfarin\tChemical\tD014859\n"
                "G3\tAssociation\t1559\tD014859\n")
                .front();
    g.doc = retag_entities({g.doc}, g.profile).front();
    g.expected = {
        {CanonicalPair{{"D014859", EntityType::chemical()}, {"1559", EntityType::gene()}},
         LabelKind::Association},
    };
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace relmerge::testing
