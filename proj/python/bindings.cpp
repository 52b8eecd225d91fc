#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <sstream>

#include "tmr/cli.hpp"
#include "tmr/embed.hpp"
#include "tmr/error.hpp"
#include "tmr/lexical.hpp"
#include "tmr/meteor.hpp"
#include "tmr/normalize.hpp"
#include "tmr/store.hpp"
#include "tmr/sts_eval.hpp"
#include "tmr/vector_index.hpp"

namespace py = pybind11;
using namespace tmr;

namespace {

py::dict match_dict(const MatchResult& m) {
  py::dict d;
  d["id"] = m.unit.id;
  d["score"] = m.score;
  d["method"] = to_string(m.method);
  d["class"] = to_string(classify_match(m.score));
  d["source"] = m.unit.source_text;
  d["target"] = m.unit.target_text;
  return d;
}

// A store embedded with the deterministic provider plus its vector index.
class Memory {
 public:
  Memory(const std::vector<std::tuple<UnitId, std::string, std::string>>& units, std::size_t dim)
      : provider_(dim), store_(dim), index_(dim) {
    std::vector<TranslationUnit> tus;
    for (const auto& [id, src, tgt] : units) tus.push_back({id, src, tgt});
    store_ = make_store(tus, dim);
    embed_and_index();
  }

  Memory(TranslationMemoryStore store)
      : provider_(store.dim()), store_(std::move(store)), index_(store_.dim()) {
    embed_and_index();
  }

  std::size_t size() const { return store_.size(); }
  std::size_t dim() const { return store_.dim(); }

  py::list lexical(const std::string& query, std::size_t k) const {
    py::list out;
    for (const auto& m : top_lexical_matches(query, store_, k)) out.append(match_dict(m));
    return out;
  }

  py::list nearest(const std::string& query, std::size_t k) {
    py::list out;
    const auto q = embed_one(provider_, query);
    for (const auto& n : index_.nearest(q, k)) {
      out.append(match_dict({store_.get(n.id)->unit, n.similarity, MatchMethod::embedding}));
    }
    return out;
  }

  void save(const std::filesystem::path& path) const { store_.save(path); }

 private:
  DeterministicProvider provider_;
  TranslationMemoryStore store_;
  VectorIndex index_;

  void embed_and_index() {
    std::vector<UnitId> ids;
    std::vector<std::string> texts;
    store_.scan([&](const MemoryRecord& r) {
      if (!r.vector) {
        ids.push_back(r.unit.id);
        texts.push_back(r.unit.source_text);
      }
    });
    if (!texts.empty()) {
      auto vectors = embed_batch(provider_, texts);
      for (std::size_t i = 0; i < ids.size(); ++i) {
        if (!vectors[i].is_zero()) store_.set_vector(ids[i], std::move(vectors[i]));
      }
    }
    index_ = VectorIndex::from_store(store_);
  }
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Translation memory retrieval core";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ArgumentError>(m, "ArgumentError", base);
  py::register_exception<ParseError>(m, "ParseError", base);
  py::register_exception<IoError>(m, "IoError", base);

  m.def("levenshtein",
        [](const std::string& a, const std::string& b) { return levenshtein(std::string_view(a), std::string_view(b)); },
        py::arg("a"), py::arg("b"), "Edit distance over unicode scalar values.");
  m.def("fuzzy_score",
        [](const std::string& a, const std::string& b) { return fuzzy_score(std::string_view(a), std::string_view(b)); },
        py::arg("a"), py::arg("b"));

  m.def("tokenize", &meteor::tokenize, py::arg("text"));
  m.def(
      "align_exact",
      [](const std::vector<std::string>& hyp, const std::vector<std::string>& ref) {
        const auto a = meteor::align_exact(hyp, ref);
        py::dict d;
        d["matches"] = a.matches;
        d["chunks"] = a.chunks;
        d["hyp_len"] = a.hyp_len;
        d["ref_len"] = a.ref_len;
        d["optimal"] = a.optimal;
        return d;
      },
      py::arg("hyp"), py::arg("ref"));
  m.def(
      "meteor_score",
      [](const std::string& hyp, const std::string& ref, double alpha, double beta, double gamma) {
        return meteor::meteor_score(hyp, ref, {alpha, beta, gamma});
      },
      py::arg("hyp"), py::arg("ref"), py::arg("alpha") = 0.9, py::arg("beta") = 3.0, py::arg("gamma") = 0.5);

  m.def(
      "deterministic_embed",
      [](const std::string& text, std::size_t dim) {
        const auto v = deterministic_embed(text, dim);
        return std::vector<double>(v.values().begin(), v.values().end());
      },
      py::arg("text"), py::arg("dim") = kDefaultDim);
  m.def(
      "cosine",
      [](std::vector<double> a, std::vector<double> b) {
        return cosine(EmbeddingVector(std::move(a)), EmbeddingVector(std::move(b)));
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "normalize",
      [](const std::string& text, std::optional<std::vector<std::pair<std::string, std::string>>> entities,
         std::optional<std::filesystem::path> gazetteer) {
        if (entities && gazetteer) throw ArgumentError("pass entities or gazetteer, not both");
        std::optional<GazetteerTagger> tagger;
        if (gazetteer) tagger.emplace(GazetteerTagger::load(*gazetteer));
        if (entities) {
          std::vector<GazetteerTagger::Entry> entries;
          for (const auto& [surface, kind] : *entities) entries.push_back({surface, parse_placeholder_kind(kind)});
          tagger.emplace(std::move(entries));
        }
        return PlaceholderPipeline(tagger ? &*tagger : nullptr)(text);
      },
      py::arg("text"), py::arg("entities") = py::none(), py::arg("gazetteer") = py::none());

  m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) { return pearson(x, y); });
  m.def("spearman", [](const std::vector<double>& x, const std::vector<double>& y) { return spearman(x, y); });
  m.def("mse", [](const std::vector<double>& p, const std::vector<double>& g) { return mse(p, g); });

  m.def(
      "evaluate_sts",
      [](const std::vector<std::tuple<std::string, std::string, double>>& pairs, const std::string& method,
         double lo, double hi, std::size_t dim) {
        std::vector<StsPair> ps;
        for (const auto& [s1, s2, gold] : pairs) {
          if (gold < lo || gold > hi) throw ArgumentError("gold score outside [lo, hi]");
          ps.push_back({s1, s2, gold, lo, hi});
        }
        const auto kind = parse_sts_method(method);
        DeterministicProvider provider(dim);
        const auto r = evaluate_sts(ps, kind, kind == StsMethod::embed_cosine ? &provider : nullptr);
        py::dict d;
        d["method"] = r.method;
        d["pearson"] = r.pearson;
        d["spearman"] = r.spearman;
        d["mse"] = r.mse;
        d["n"] = r.n;
        return d;
      },
      py::arg("pairs"), py::arg("method") = "edit", py::arg("lo") = 1.0, py::arg("hi") = 5.0,
      py::arg("dim") = kDefaultDim);

  py::class_<Memory>(m, "Memory")
      .def(py::init<const std::vector<std::tuple<UnitId, std::string, std::string>>&, std::size_t>(),
           py::arg("units"), py::arg("dim") = kDefaultDim)
      .def_static(
          "open", [](const std::filesystem::path& p) { return Memory(TranslationMemoryStore::open(p)); },
          py::arg("path"))
      .def("__len__", &Memory::size)
      .def_property_readonly("dim", &Memory::dim)
      .def("lexical", &Memory::lexical, py::arg("query"), py::arg("k") = 1)
      .def("nearest", &Memory::nearest, py::arg("query"), py::arg("k") = 1)
      .def("save", &Memory::save, py::arg("path"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in process; returns (exit_code, stdout, stderr).");
}
