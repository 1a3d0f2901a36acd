#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "relmerge/cli.hpp"
#include "relmerge/error.hpp"
#include "relmerge/evaluate.hpp"
#include "relmerge/formats.hpp"
#include "relmerge/harmonize.hpp"
#include "relmerge/instances.hpp"
#include "relmerge/textspan.hpp"

namespace py = pybind11;
using namespace relmerge;

namespace {

using TupleRow = std::tuple<std::string, std::string, std::string, std::string,
                            std::string, std::string>;

std::vector<RelationTuple> to_tuples(const std::vector<TupleRow>& rows) {
  std::vector<RelationTuple> out;
  for (const auto& [doc, id1, t1, id2, t2, label] : rows) {
    out.push_back(RelationTuple{doc,
                                canonicalize_pair({id1, EntityType::parse(t1)},
                                                  {id2, EntityType::parse(t2)}),
                                RelationLabel::parse(label)});
  }
  return out;
}

TupleRow to_row(const RelationTuple& t) {
  return {t.doc_id,           t.pair.first.id,  t.pair.first.type.render(),
          t.pair.second.id,   t.pair.second.type.render(), t.label.render()};
}

py::dict counts_dict(const EvalCounts& c) {
  py::dict d;
  d["tp"] = c.true_positives;
  d["fp"] = c.false_positives;
  d["fn"] = c.false_negatives;
  d["precision"] = c.precision;
  d["recall"] = c.recall;
  d["f1"] = c.f1;
  d["precision_undefined"] = c.precision_undefined;
  return d;
}

py::dict instance_dict(const CandidateInstance& inst) {
  py::dict d;
  d["doc_id"] = inst.doc_id;
  d["corpus"] = inst.corpus_tag;
  d["id1"] = inst.pair.first.id;
  d["type1"] = inst.pair.first.type.render();
  d["id2"] = inst.pair.second.id;
  d["type2"] = inst.pair.second.type.render();
  d["prompt"] = inst.prompt;
  d["context"] = inst.context;
  d["label"] = inst.label.render();
  d["level"] = std::string(level_name(inst.level));
  return d;
}

}  // namespace

PYBIND11_MODULE(_relmerge, m) {
  m.doc() = "Corpus harmonization for biomedical relation extraction";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ConflictError>(m, "ConflictError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<EntityMention>(m, "EntityMention")
      .def_readonly("start", &EntityMention::start)
      .def_readonly("end", &EntityMention::end)
      .def_readonly("text", &EntityMention::text)
      .def_property_readonly("type", [](const EntityMention& x) { return x.type.render(); })
      .def_readonly("concept_ids", &EntityMention::concept_ids)
      .def("__repr__", [](const EntityMention& x) {
        return "<EntityMention " + x.text + " [" + std::to_string(x.start) + "," +
               std::to_string(x.end) + ") " + x.type.render() + ">";
      });

  py::class_<SourceRelation>(m, "SourceRelation")
      .def_readonly("concept_id1", &SourceRelation::concept_id1)
      .def_readonly("concept_id2", &SourceRelation::concept_id2)
      .def_readonly("label_text", &SourceRelation::label_text);

  py::class_<Document>(m, "Document")
      .def_readonly("id", &Document::id)
      .def_readonly("title", &Document::title)
      .def_readonly("abstract_text", &Document::abstract_text)
      .def_readonly("mentions", &Document::mentions)
      .def_readonly("relations", &Document::relations)
      .def("text", &Document::text)
      .def("__eq__", [](const Document& a, const Document& b) { return a == b; });

  m.def("parse_pubtator", &parse_pubtator, py::arg("text"));
  m.def("write_pubtator",
        [](const std::vector<Document>& docs) { return write_pubtator(docs); },
        py::arg("docs"));
  m.def("validate_profile",
        [](const std::string& text) { return write_profile(parse_profile(text)); },
        py::arg("text"), "Parse and validate a profile; returns its normalized JSON.");

  m.def(
      "harmonize",
      [](const std::string& corpus, const std::string& profile_text,
         std::optional<std::string> annotations, std::optional<std::string> lexicon,
         std::optional<std::string> repository, unsigned threads) {
        const auto profile = parse_profile(profile_text);
        const auto docs = parse_pubtator(corpus);
        AnnotationIndex index;
        Lexicon lex;
        std::vector<RepositoryRecord> records;
        HarmonizeOptions options;
        options.threads = threads;
        if (annotations) {
          index = parse_annotations(*annotations);
          options.annotations.auto_annotations = &index;
        }
        if (lexicon) {
          lex = Lexicon::parse(*lexicon);
          options.annotations.lexicon = &lex;
        }
        if (repository) {
          if (profile.allowed_pairs.size() != 1) {
            throw ConfigError("a repository needs a profile with exactly one allowed pair");
          }
          const auto& kinds = *profile.allowed_pairs.begin();
          records = parse_repository(*repository,
                                     {EntityType(kinds.first), EntityType(kinds.second)});
          options.repository = &records;
        }
        py::gil_scoped_release release;
        auto result = harmonize_corpus(docs, profile, options);
        return std::make_pair(write_harmonized(result.corpus), write_report(result.report));
      },
      py::arg("corpus"), py::arg("profile"), py::arg("annotations") = py::none(),
      py::arg("lexicon") = py::none(), py::arg("repository") = py::none(),
      py::arg("threads") = 1u,
      "Harmonize a PubTator-style corpus; returns (harmonized JSON, report JSON lines).");

  m.def(
      "merge",
      [](const std::vector<std::string>& corpora) {
        std::vector<HarmonizedCorpus> parsed;
        for (const auto& c : corpora) parsed.push_back(parse_harmonized(c));
        return write_harmonized(merge_corpora(parsed));
      },
      py::arg("corpora"));

  m.def(
      "generate_instances",
      [](const std::string& harmonized, std::optional<std::string> corpus_tag,
         unsigned threads) {
        InstanceOptions options;
        options.corpus_tag = corpus_tag;
        options.threads = threads;
        auto instances = generate_instances(parse_harmonized(harmonized), options);
        py::list out;
        for (const auto& inst : instances) out.append(instance_dict(inst));
        return out;
      },
      py::arg("harmonized"), py::arg("corpus_tag") = py::none(), py::arg("threads") = 1u);

  m.def(
      "instances_jsonl",
      [](const std::string& harmonized, std::optional<std::string> corpus_tag) {
        InstanceOptions options;
        options.corpus_tag = corpus_tag;
        std::ostringstream out;
        write_instances(generate_instances(parse_harmonized(harmonized), options), out);
        return out.str();
      },
      py::arg("harmonized"), py::arg("corpus_tag") = py::none());

  m.def("build_prompt", &build_prompt, py::arg("corpus_tag"), py::arg("name1"),
        py::arg("name2"));

  m.def(
      "segment_sentences",
      [](const std::string& text, std::optional<std::size_t> title_end) {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (const auto& s : segment_sentences(text, title_end)) out.emplace_back(s.start, s.end);
        return out;
      },
      py::arg("text"), py::arg("title_end") = py::none());

  m.def(
      "canonicalize_pair",
      [](const std::string& id1, const std::string& type1, const std::string& id2,
         const std::string& type2) {
        auto p = canonicalize_pair({id1, EntityType::parse(type1)},
                                   {id2, EntityType::parse(type2)});
        return std::make_tuple(p.first.id, p.first.type.render(), p.second.id,
                               p.second.type.render());
      },
      py::arg("id1"), py::arg("type1"), py::arg("id2"), py::arg("type2"));

  m.def(
      "score",
      [](const std::vector<TupleRow>& gold, const std::vector<TupleRow>& pred) {
        auto report = score(to_tuples(gold), to_tuples(pred));
        py::dict out = counts_dict(report.micro);
        py::dict per;
        for (const auto& [key, c] : report.per_pair_type) per[py::str(key)] = counts_dict(c);
        out["per_pair_type"] = per;
        return out;
      },
      py::arg("gold"), py::arg("pred"),
      "Tuples are (doc_id, id1, type1, id2, type2, label).");

  m.def(
      "paired_t_test",
      [](const std::vector<double>& xs, const std::vector<double>& ys) {
        auto r = paired_t_test(xs, ys);
        py::dict d;
        d["t"] = r.t;
        d["p"] = r.p;
        d["df"] = r.df;
        d["degenerate_variance"] = r.degenerate_variance;
        return d;
      },
      py::arg("xs"), py::arg("ys"));

  m.def("regularized_incomplete_beta", &regularized_incomplete_beta, py::arg("a"),
        py::arg("b"), py::arg("x"));

  m.def("kfold_split", &kfold_split, py::arg("ids"), py::arg("k"), py::arg("seed"));

  m.def(
      "subsample",
      [](const std::vector<std::string>& ids, std::uint64_t seed,
         std::optional<std::size_t> count, std::optional<double> fraction) {
        if (count.has_value() == fraction.has_value()) {
          throw ValidationError("give exactly one of count or fraction");
        }
        return count ? subsample(ids, *count, seed) : subsample_fraction(ids, *fraction, seed);
      },
      py::arg("ids"), py::arg("seed"), py::arg("count") = py::none(),
      py::arg("fraction") = py::none());

  m.def(
      "baseline_predict",
      [](const std::string& instances_jsonl) {
        std::vector<TupleRow> out;
        for (const auto& t : baseline_predict(parse_instances(instances_jsonl))) {
          out.push_back(to_row(t));
        }
        return out;
      },
      py::arg("instances_jsonl"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        int code = run_cli(args, out, err);
        return std::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command line tool in-process; returns (code, stdout, stderr).");
}
