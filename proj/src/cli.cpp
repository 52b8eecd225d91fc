#include "tmr/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tmr/bench.hpp"
#include "tmr/embed.hpp"
#include "tmr/error.hpp"
#include "tmr/lexical.hpp"
#include "tmr/normalize.hpp"
#include "tmr/sidecar.hpp"
#include "tmr/store.hpp"
#include "tmr/sts_eval.hpp"
#include "tmr/tm_eval.hpp"
#include "tmr/vector_index.hpp"

namespace tmr::cli {

namespace {

constexpr const char* kDefaultSidecar = "tmr-encoder";

struct ProviderOptions {
  std::string kind = "deterministic";
  std::string sidecar_cmd = kDefaultSidecar;
  std::size_t dim = kDefaultDim;
  std::size_t batch_size = kDefaultBatchSize;
};

struct GlobalOptions {
  unsigned threads = 1;
  std::string format = "json";
  ProviderOptions provider;
};

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderOptions& opts) {
  if (opts.kind == "sidecar") {
    return std::make_unique<SidecarProvider>(sidecar_command(opts.sidecar_cmd), opts.batch_size);
  }
  return std::make_unique<DeterministicProvider>(opts.dim, opts.batch_size);
}

std::int64_t creation_time() {
  // Reproducible builds convention: honour SOURCE_DATE_EPOCH when set.
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    try {
      return std::stoll(epoch);
    } catch (const std::exception&) {
      throw ArgumentError("SOURCE_DATE_EPOCH is not an integer");
    }
  }
  return static_cast<std::int64_t>(std::time(nullptr));
}

// Embeds the source of every record lacking a vector, in request-sized
// chunks, and attaches the results.
void embed_missing(TranslationMemoryStore& store, EmbeddingProvider& provider) {
  if (provider.spec().dim != store.dim()) {
    throw DimensionError(store.dim(), provider.spec().dim);
  }
  std::vector<UnitId> ids;
  std::vector<std::string> texts;
  store.scan([&](const MemoryRecord& r) {
    if (!r.vector) {
      ids.push_back(r.unit.id);
      texts.push_back(r.unit.source_text);
    }
  });
  if (texts.empty()) return;
  auto vectors = embed_batch(provider, texts);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!vectors[i].is_zero()) store.set_vector(ids[i], std::move(vectors[i]));
  }
}

nlohmann::ordered_json match_json(std::size_t rank, const MatchResult& m) {
  nlohmann::ordered_json j;
  j["rank"] = rank;
  j["id"] = m.unit.id;
  j["score"] = m.score;
  j["method"] = to_string(m.method);
  j["class"] = to_string(classify_match(m.score));
  j["source"] = m.unit.source_text;
  j["target"] = m.unit.target_text;
  return j;
}

void write_output(const std::string& body, const std::string& report_path, std::ostream& out) {
  if (report_path.empty()) {
    out << body;
    return;
  }
  std::ofstream f(report_path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + report_path);
  f << body;
  if (!f) throw IoError("write failed: " + report_path);
}

void add_provider_options(CLI::App* cmd, ProviderOptions& p) {
  cmd->add_option("--provider", p.kind, "Embedding provider")
      ->check(CLI::IsMember({"deterministic", "sidecar"}))
      ->capture_default_str();
  cmd->add_option("--sidecar-cmd", p.sidecar_cmd,
                  "Sidecar command line (TMR_SIDECAR_CMD overrides)")
      ->capture_default_str();
  cmd->add_option("--dim", p.dim, "Vector dimension of the deterministic provider")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--batch-size", p.batch_size, "Texts per embedding request")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Translation memory retrieval and evaluation", "tmr"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--threads", g.threads, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"json", "table"}))
      ->capture_default_str();

  // ingest
  struct {
    std::string tm, input_format, db, source_lang = "en", target_lang = "es";
    bool embed = false;
  } ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Load a TSV/JSONL memory into a store file");
  ingest_cmd->fallthrough();
  ingest_cmd->add_option("--tm", ingest.tm, "Translation memory file")->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--input-format", ingest.input_format, "tsv or jsonl (default: by extension)")
      ->check(CLI::IsMember({"tsv", "jsonl"}));
  ingest_cmd->add_option("--db", ingest.db, "Store file to write")->required();
  ingest_cmd->add_flag("--embed", ingest.embed, "Embed every source segment");
  ingest_cmd->add_option("--source-lang", ingest.source_lang)->capture_default_str();
  ingest_cmd->add_option("--target-lang", ingest.target_lang)->capture_default_str();
  add_provider_options(ingest_cmd, g.provider);

  // query
  struct {
    std::string db, text, method = "embed";
    std::size_t k = 5;
  } query;
  auto* query_cmd = app.add_subcommand("query", "Retrieve the best matches for one segment");
  query_cmd->fallthrough();
  query_cmd->add_option("--db", query.db, "Store file")->required()->check(CLI::ExistingFile);
  query_cmd->add_option("--text", query.text, "Query segment")->required();
  query_cmd->add_option("--method", query.method)
      ->check(CLI::IsMember({"embed", "lexical"}))
      ->capture_default_str();
  query_cmd->add_option("--k", query.k, "Number of matches")->check(CLI::PositiveNumber)->capture_default_str();
  add_provider_options(query_cmd, g.provider);

  // eval-sts
  struct {
    std::string dataset, dataset_format = "sick", method = "edit";
    double scale_lo = 1.0, scale_hi = 5.0;
  } sts;
  auto* sts_cmd = app.add_subcommand("eval-sts", "Correlate a similarity method with STS gold scores");
  sts_cmd->fallthrough();
  sts_cmd->add_option("--dataset", sts.dataset)->required()->check(CLI::ExistingFile);
  sts_cmd->add_option("--dataset-format", sts.dataset_format)
      ->check(CLI::IsMember({"sick", "tsv3"}))
      ->capture_default_str();
  sts_cmd->add_option("--method", sts.method)->check(CLI::IsMember({"edit", "embed"}))->capture_default_str();
  sts_cmd->add_option("--scale-lo", sts.scale_lo, "Lowest gold score")->capture_default_str();
  sts_cmd->add_option("--scale-hi", sts.scale_hi, "Highest gold score")->capture_default_str();
  add_provider_options(sts_cmd, g.provider);

  // eval-tm
  struct {
    std::string tm, db, input, refs, gazetteer, report, sts_mode = "query-source";
    bool normalize = false, no_sts = false;
    std::vector<double> edges{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  } tm;
  auto* tm_cmd = app.add_subcommand("eval-tm", "Compare lexical and embedding retrieval with METEOR");
  tm_cmd->fallthrough();
  auto* tm_opt = tm_cmd->add_option("--tm", tm.tm, "Translation memory file")->check(CLI::ExistingFile);
  auto* db_opt = tm_cmd->add_option("--db", tm.db, "Store file")->check(CLI::ExistingFile);
  tm_opt->excludes(db_opt);
  tm_cmd->add_option("--input", tm.input, "Incoming segments, one per line")->required()->check(CLI::ExistingFile);
  tm_cmd->add_option("--refs", tm.refs, "Reference translations, one per line")->required()->check(CLI::ExistingFile);
  tm_cmd->add_flag("--normalize", tm.normalize, "Replace numbers, dates and entities with placeholders");
  tm_cmd->add_option("--gazetteer", tm.gazetteer, "Entity gazetteer (surface<TAB>kind)")->check(CLI::ExistingFile);
  tm_cmd->add_option("--sts-mode", tm.sts_mode)
      ->check(CLI::IsMember({"query-source", "reference-target"}))
      ->capture_default_str();
  tm_cmd->add_flag("--no-sts", tm.no_sts, "Skip the mean-STS column");
  tm_cmd->add_option("--edges", tm.edges, "Partition edges")->delimiter(',');
  tm_cmd->add_option("--report", tm.report, "Write the report here instead of stdout");
  add_provider_options(tm_cmd, g.provider);

  // bench
  struct {
    std::size_t n = 1000, repetitions = 5;
    std::vector<std::size_t> retrieval_sizes;
  } bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time embedding and retrieval");
  bench_cmd->fallthrough();
  bench_cmd->add_option("--n", bench.n, "Memory size")->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd->add_option("--repetitions", bench.repetitions)->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd->add_option("--retrieval-sizes", bench.retrieval_sizes,
                        "Time retrieval alone over random vectors of these sizes")
      ->delimiter(',');
  add_provider_options(bench_cmd, g.provider);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const bool table = g.format == "table";
    if (ingest_cmd->parsed()) {
      const auto format = ingest.input_format.empty() ? unit_format_for_path(ingest.tm)
                                                      : parse_unit_format(ingest.input_format);
      const LanguagePair langs{ingest.source_lang, ingest.target_lang};
      const auto units = load_units(ingest.tm, format, langs);
      StoreMetadata meta{langs, creation_time()};
      auto store = make_store(units, g.provider.dim, meta);
      std::size_t embedded = 0;
      if (ingest.embed) {
        auto provider = make_provider(g.provider);
        if (provider->spec().dim != store.dim()) {
          store = make_store(units, provider->spec().dim, meta);
        }
        embed_missing(store, *provider);
        store.scan([&](const MemoryRecord& r) { embedded += r.vector ? 1 : 0; });
      }
      store.save(ingest.db);
      nlohmann::ordered_json j;
      j["db"] = ingest.db;
      j["units"] = store.size();
      j["embedded"] = embedded;
      j["dim"] = store.dim();
      out << j.dump() << '\n';
    } else if (query_cmd->parsed()) {
      const auto store = TranslationMemoryStore::open(query.db);
      std::vector<MatchResult> matches;
      if (query.method == "lexical") {
        matches = top_lexical_matches(query.text, store, query.k);
      } else {
        const auto index = VectorIndex::from_store(store);
        if (index.empty()) throw EmptyIndexError("store has no vectors; ingest with --embed");
        auto provider = make_provider(g.provider);
        const auto q = embed_one(*provider, query.text);
        for (const auto& n : index.nearest(q, query.k, g.threads)) {
          matches.push_back({store.get(n.id)->unit, n.similarity, MatchMethod::embedding});
        }
      }
      for (std::size_t i = 0; i < matches.size(); ++i) {
        out << match_json(i + 1, matches[i]).dump() << '\n';
      }
    } else if (sts_cmd->parsed()) {
      const auto pairs = load_sts(sts.dataset, parse_sts_format(sts.dataset_format), sts.scale_lo,
                                  sts.scale_hi);
      const auto method = parse_sts_method(sts.method);
      std::unique_ptr<EmbeddingProvider> provider;
      if (method == StsMethod::embed_cosine) provider = make_provider(g.provider);
      const auto m = evaluate_sts(pairs, method, provider.get(), g.threads);
      if (table) {
        char line[160];
        std::snprintf(line, sizeof line, "%-14s %9s %9s %9s %7s\n%-14s %9.4f %9.4f %9.4f %7zu\n",
                      "method", "pearson", "spearman", "mse", "n", m.method.c_str(), m.pearson,
                      m.spearman, m.mse, m.n);
        out << line;
      } else {
        out << to_json(m) << '\n';
      }
    } else if (tm_cmd->parsed()) {
      if (tm.tm.empty() == tm.db.empty()) {
        err << "eval-tm: exactly one of --tm or --db is required\n";
        return kExitUsage;
      }
      if (!tm.gazetteer.empty() && !tm.normalize) {
        err << "eval-tm: --gazetteer requires --normalize\n";
        return kExitUsage;
      }
      PartitionSpec spec;
      spec.edges = tm.edges;
      spec.validate();
      auto provider = make_provider(g.provider);
      TranslationMemoryStore store =
          tm.db.empty()
              ? make_store(load_units(tm.tm, unit_format_for_path(tm.tm)), provider->spec().dim)
              : TranslationMemoryStore::open(tm.db);
      embed_missing(store, *provider);
      const auto index = VectorIndex::from_store(store);
      const auto inputs = load_eval_inputs(tm.input, tm.refs);
      const auto rows = build_eval_rows(inputs, store, index, *provider, g.threads);

      std::optional<GazetteerTagger> gazetteer;
      if (!tm.gazetteer.empty()) gazetteer.emplace(GazetteerTagger::load(tm.gazetteer));
      std::optional<PlaceholderPipeline> pipeline;
      if (tm.normalize) pipeline.emplace(gazetteer ? &*gazetteer : nullptr);

      TmEvalReport report;
      report.provider = provider->spec().name;
      report.sts_mode = parse_sts_mode(tm.sts_mode);
      report.partition = partition_and_average(rows, spec, pipeline ? &*pipeline : nullptr);
      if (!tm.no_sts) {
        const auto kept = drop_ties(rows);
        report.mean_sts = mean_sts_per_bucket(kept, *provider, spec, report.sts_mode);
      }
      write_output(table ? to_table(report) : to_json(report) + "\n", tm.report, out);
    } else if (bench_cmd->parsed()) {
      if (!bench.retrieval_sizes.empty()) {
        std::vector<RetrievalTiming> runs;
        for (auto n : bench.retrieval_sizes) {
          runs.push_back(bench_retrieval(n, g.provider.dim, bench.repetitions));
        }
        out << to_json(std::span<const RetrievalTiming>(runs)) << '\n';
      } else {
        auto provider = make_provider(g.provider);
        out << to_json(bench_timing(bench.n, *provider, bench.repetitions)) << '\n';
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace tmr::cli
