// gdeltkg — GDELT knowledge-graph toolkit CLI.
// Pipeline stages: ingest -> fetch -> build-kg -> index -> query/ask/rag/bench -> eval.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "gdeltkg/gdeltkg.hpp"

namespace fs = std::filesystem;
using namespace gdeltkg;

namespace {

bool g_verbose = false;

void vlog(const std::string& msg) {
    if (g_verbose) std::cerr << "[gdeltkg] " << msg << "\n";
}

std::vector<std::string> split_csv_arg(const std::string& arg) {
    std::vector<std::string> out;
    for (auto part : split(arg, ',')) {
        auto t = trim(part);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

std::string now_iso_utc() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

struct Clients {
    std::unique_ptr<ChatClient> chat;
    std::unique_ptr<EmbedClient> embed;
    std::unique_ptr<EmbedClient> eval_embed;
};

Clients make_clients(const Config& cfg, bool need_chat, bool need_embed, bool need_eval) {
    Clients c;
    if (cfg.stub) {
        if (need_chat) c.chat = std::make_unique<StubChatClient>();
        if (need_embed) c.embed = std::make_unique<StubEmbedClient>(cfg.stub_dim);
        if (need_eval) c.eval_embed = std::make_unique<StubEmbedClient>(cfg.stub_dim);
        return c;
    }
    if (need_chat) c.chat = std::make_unique<HttpChatClient>(cfg.chat.resolve(), cfg.temperature, cfg.max_answer_tokens);
    if (need_embed) c.embed = std::make_unique<HttpEmbedClient>(cfg.embed.resolve());
    if (need_eval) c.eval_embed = std::make_unique<HttpEmbedClient>(cfg.eval_embed.resolve());
    return c;
}

template <class Record, class Parser>
ParseResult<Record> parse_files(const std::vector<std::string>& paths, const TableSchema& schema, Parser parser,
                                const char* what) {
    ParseResult<Record> merged;
    for (const auto& path : paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open " + std::string(what) + " file " + path);
        auto res = parser(in, schema);
        for (auto& err : res.errors) err.row += merged.rows;
        merged.rows += res.rows;
        merged.bytes_replaced += res.bytes_replaced;
        merged.records.insert(merged.records.end(), std::make_move_iterator(res.records.begin()),
                              std::make_move_iterator(res.records.end()));
        merged.errors.insert(merged.errors.end(), std::make_move_iterator(res.errors.begin()),
                             std::make_move_iterator(res.errors.end()));
    }
    return merged;
}

// Cross-file duplicate pass: within one ingest batch identities stay unique
// even when the batch spans several dump files.
void dedup_events(ParseResult<EventRecord>& events) {
    std::unordered_set<int64_t> seen;
    std::vector<EventRecord> kept;
    for (auto& e : events.records) {
        if (seen.insert(e.global_event_id).second) kept.push_back(std::move(e));
        else events.errors.push_back({0, "GLOBALEVENTID", "duplicate GLOBALEVENTID " + std::to_string(e.global_event_id) + " across files"});
    }
    events.records = std::move(kept);
}

void dedup_articles(ParseResult<ArticleRecord>& articles) {
    std::unordered_set<std::string> seen;
    std::vector<ArticleRecord> kept;
    for (auto& a : articles.records) {
        if (seen.insert(a.document_identifier).second) kept.push_back(std::move(a));
        else articles.errors.push_back({0, "DocumentIdentifier", "duplicate DocumentIdentifier " + a.document_identifier + " across files"});
    }
    articles.records = std::move(kept);
}

void flag_mention_duplicates(ParseResult<MentionRecord>& mentions) {
    std::set<std::pair<int64_t, std::string>> seen;
    for (auto& m : mentions.records) m.duplicate = !seen.insert({m.global_event_id, m.identifier}).second;
}

int cmd_ingest(const Config&, const SchemaMap& schema, const std::vector<std::string>& events_files,
               const std::vector<std::string>& mentions_files, const std::vector<std::string>& gkg_files,
               const std::string& keywords, bool case_sensitive, int64_t from_ts, int64_t to_ts,
               const std::string& out_dir) {
    auto events = parse_files<EventRecord>(events_files, schema.events,
                                           [](std::istream& i, const TableSchema& t) { return parse_events(i, t); }, "events");
    auto mentions = parse_files<MentionRecord>(mentions_files, schema.mentions,
                                               [](std::istream& i, const TableSchema& t) { return parse_mentions(i, t); }, "mentions");
    auto articles = parse_files<ArticleRecord>(gkg_files, schema.gkg,
                                               [](std::istream& i, const TableSchema& t) { return parse_gkg(i, t); }, "gkg");
    dedup_events(events);
    dedup_articles(articles);
    flag_mention_duplicates(mentions);
    vlog("parsed events=" + std::to_string(events.records.size()) + " mentions=" +
         std::to_string(mentions.records.size()) + " articles=" + std::to_string(articles.records.size()));
    size_t parse_errors = events.errors.size() + mentions.errors.size() + articles.errors.size();
    if (parse_errors) std::cerr << "skipped " << parse_errors << " malformed/duplicate rows\n";
    size_t replaced = events.bytes_replaced + mentions.bytes_replaced + articles.bytes_replaced;
    if (replaced) std::cerr << "replaced " << replaced << " invalid UTF-8 bytes\n";

    KeywordFilter filter;
    filter.keywords = split_csv_arg(keywords);
    filter.case_sensitive = case_sensitive;
    if (from_ts > 0 || to_ts > 0)
        filter.time_window = {{from_ts > 0 ? from_ts : 0, to_ts > 0 ? to_ts : 99999999999999ll}};

    CaseStudySubset subset = filter_subset(events.records, mentions.records, articles.records, filter);
    subset.provenance.sources = events_files;
    subset.provenance.sources.insert(subset.provenance.sources.end(), mentions_files.begin(), mentions_files.end());
    subset.provenance.sources.insert(subset.provenance.sources.end(), gkg_files.begin(), gkg_files.end());
    save_subset(subset, schema, out_dir);

    auto report = consistency_report(subset);
    std::cout << report.to_text();
    std::cout << "retained fraction: " << subset.provenance.retained_fraction << "\n";
    std::cout << "subset written to " << out_dir << "\n";
    return 0;
}

int cmd_fetch(const Config& cfg, const std::string& subset_dir, const std::string& out_dir,
              const std::string& fixtures, int timeout_s, int parallel) {
    CaseStudySubset subset = load_subset(subset_dir);
    if (subset.articles.empty()) throw std::runtime_error("subset has no articles to fetch");
    std::vector<std::string> urls;
    for (const auto& a : subset.articles) urls.push_back(a.document_identifier);
    FetchPolicy policy;
    policy.timeout_s = timeout_s > 0 ? timeout_s : cfg.fetch_timeout_s;
    policy.parallel = parallel > 0 ? parallel : cfg.fetch_parallel;
    policy.max_bytes = cfg.fetch_max_bytes;
    policy.user_agent = cfg.user_agent;
    policy.fixtures_dir = fixtures;
    FetchSummary s = fetch_corpus(urls, out_dir, policy);
    std::cout << "fetched ok=" << s.ok << " fixture=" << s.fixture << " failed=" << s.failed
              << " skipped=" << s.skipped << " (of " << s.total() << " distinct urls)\n";
    return 0;
}

int cmd_build_kg(const std::string& subset_dir, const std::string& out_file, bool skip_unresolved) {
    CaseStudySubset subset = load_subset(subset_dir);
    BuildReport report;
    KnowledgeGraph kg = build_dkg(subset, {.skip_unresolved = skip_unresolved}, &report);
    save_graph(kg, out_file);
    std::cout << "dkg: " << kg.node_count() << " nodes, " << kg.edge_count() << " edges ("
              << report.row_nodes << " row nodes, " << report.value_nodes << " value nodes, "
              << report.structural_edges << " structural edges)\n";
    if (report.skipped_event_refs || report.skipped_article_refs)
        std::cout << "skipped unresolved links: events=" << report.skipped_event_refs
                  << " articles=" << report.skipped_article_refs << "\n";
    std::cout << "graph written to " << out_file << "\n";
    return 0;
}

int cmd_index(const Config& cfg, const std::string& corpus_dir, const std::string& out_file, int max_tokens,
              size_t batch) {
    auto corpus = load_corpus(corpus_dir);
    Clients clients = make_clients(cfg, false, true, false);
    StoreBuildOptions opts;
    opts.max_tokens = max_tokens > 0 ? max_tokens : cfg.chunk_tokens;
    opts.batch_size = batch;
    StoreBuildReport report;
    VectorStore store = build_store(corpus, *clients.embed, default_tokenizer(), opts, &report);
    save_store(store, out_file);
    std::cout << "indexed " << report.documents << " documents into " << store.size() << " chunks (dim "
              << store.dim << ", embedder " << store.embedder_id << ")\n";
    for (const auto& f : report.failures)
        std::cerr << "embedding failed: " << f.document_identifier << "#" << f.chunk_index << ": " << f.error << "\n";
    std::cout << "store written to " << out_file << "\n";
    return 0;
}

int cmd_search(const Config& cfg, const std::string& store_file, const std::string& query, size_t k) {
    Clients clients = make_clients(cfg, false, true, false);
    VectorStore store = load_store(store_file, clients.embed->id());
    auto neighbors = nearest_chunks(store, query, k, *clients.embed);
    for (const auto& n : neighbors) {
        std::string snippet = n.entry->chunk.text.substr(0, 120);
        std::cout << n.distance << "\t" << n.entry->chunk.document_identifier << "#"
                  << n.entry->chunk.chunk_index << "\t" << snippet << "\n";
    }
    return 0;
}

int cmd_query(const std::string& kg_file, const std::string& keywords, const std::string& emit,
              int top_themes_k, const std::string& source_pattern, const std::string& attribution_entity,
              const std::string& out_file) {
    KnowledgeGraph kg = load_graph(kg_file);
    if (top_themes_k > 0) {
        for (const auto& [theme, count] : top_themes(kg, static_cast<size_t>(top_themes_k)))
            std::cout << theme << "\t" << count << "\n";
        return 0;
    }
    if (!source_pattern.empty()) {
        std::cout << count_articles_by_source(kg, source_pattern) << "\n";
        return 0;
    }
    if (!attribution_entity.empty()) {
        auto result = mention_attribution(kg, attribution_entity);
        for (const auto& a : result.articles) std::cout << a << "\n";
        std::cout << "attributed articles: " << result.attribution_count << "\n";
        return 0;
    }
    if (keywords.empty())
        throw CLI::ValidationError("query", "one of --keywords/--top-themes/--count-articles-by-source/--attribution is required");
    Subgraph sg = keyword_edge_search(kg, split_csv_arg(keywords));
    if (emit == "sentences") {
        std::ostringstream os;
        for (const auto& s : sg.sentences()) os << s << "\n";
        if (out_file.empty()) std::cout << os.str();
        else write_text(out_file, os.str());
        std::cerr << sg.edge_ids.size() << " edges, " << sg.node_ids.size() << " nodes\n";
    } else if (emit == "subgraph") {
        if (out_file.empty()) throw CLI::ValidationError("query", "--emit subgraph requires --out");
        save_graph(materialize(sg), out_file);
        std::cout << "subgraph written to " << out_file << " (" << sg.edge_ids.size() << " edges)\n";
    } else if (emit == "graphml") {
        std::string doc = export_graphml(materialize(sg));
        if (out_file.empty()) std::cout << doc;
        else write_text(out_file, doc);
    } else {
        throw CLI::ValidationError("query", "unknown --emit format: " + emit);
    }
    return 0;
}

QaResources make_resources(const Config& cfg, const KnowledgeGraph* kg, const VectorStore* store,
                           Clients& clients) {
    QaResources res;
    res.kg = kg;
    res.store = store;
    res.chat = clients.chat.get();
    res.embed = clients.embed.get();
    res.sentence_cap = cfg.sentence_cap;
    res.chunk_cap = cfg.chunk_cap;
    res.k = cfg.k;
    res.deterministic = cfg.stub;
    return res;
}

int print_result(const QAResult& r, const std::string& out_file) {
    if (!out_file.empty()) write_text(out_file, detail::result_to_json(r).dump(2) + "\n");
    if (r.status != "ok") {
        std::cerr << "error: " << r.error << "\n";
        return 1;
    }
    std::cout << r.answer << "\n";
    std::cerr << "(context: " << r.context_size << (r.truncated ? " entries, truncated" : " entries")
              << "; model " << r.model << ")\n";
    return 0;
}

int cmd_ask(const Config& cfg, const std::string& kg_file, const std::string& question_text,
            const std::string& keywords, const std::string& out_file) {
    KnowledgeGraph kg = load_graph(kg_file);
    Clients clients = make_clients(cfg, true, false, false);
    QaResources res = make_resources(cfg, &kg, nullptr, clients);
    Question q{"adhoc", question_text, split_csv_arg(keywords)};
    return print_result(answer(q, Method::GraphQuery, res), out_file);
}

int cmd_rag(const Config& cfg, const std::string& store_file, const std::string& question_text, size_t k,
            const std::string& out_file) {
    Clients clients = make_clients(cfg, true, true, false);
    VectorStore store = load_store(store_file, clients.embed->id());
    Config cfg2 = cfg;
    if (k > 0) cfg2.k = k;
    QaResources res = make_resources(cfg2, nullptr, &store, clients);
    Question q{"adhoc", question_text, {}};
    return print_result(answer(q, Method::VectorRag, res), out_file);
}

int cmd_bench(const Config& cfg, const std::string& kg_file, const std::string& store_file,
              const std::string& questions_file, const std::string& methods_arg, const std::string& out_dir) {
    std::vector<Question> questions =
        questions_file.empty() ? default_questions() : load_questions(questions_file);
    std::vector<Method> methods;
    for (const auto& m : split_csv_arg(methods_arg)) {
        if (m == "graph_query") methods.push_back(Method::GraphQuery);
        else if (m == "vector_rag") methods.push_back(Method::VectorRag);
        else throw CLI::ValidationError("bench", "unknown method: " + m);
    }
    if (methods.empty()) throw CLI::ValidationError("bench", "no methods selected");

    std::optional<KnowledgeGraph> kg;
    std::optional<VectorStore> store;
    bool need_rag = std::count(methods.begin(), methods.end(), Method::VectorRag) > 0;
    Clients clients = make_clients(cfg, true, need_rag, false);
    if (!kg_file.empty()) kg = load_graph(kg_file);
    if (!store_file.empty()) store = load_store(store_file, need_rag ? clients.embed->id() : "");

    QaResources res = make_resources(cfg, kg ? &*kg : nullptr, store ? &*store : nullptr, clients);
    auto results = run_benchmark(questions, methods, res);

    RunMeta meta;
    meta.chat_model = clients.chat->model();
    meta.store_embedder = store ? store->embedder_id : "";
    meta.k = cfg.k;
    meta.sentence_cap = cfg.sentence_cap;
    meta.chunk_cap = cfg.chunk_cap;
    meta.stub = cfg.stub;
    meta.created = cfg.stub ? "1970-01-01T00:00:00Z" : now_iso_utc();
    save_run(results, meta, out_dir);

    size_t failures = 0;
    for (const auto& r : results) {
        if (r.status != "ok") ++failures;
        std::cout << r.question_id << " " << r.method_label << ": " << r.status
                  << (r.status == "ok" ? "" : " (" + r.error + ")") << "\n";
    }
    std::cout << results.size() << " cells (" << failures << " errors) written to " << out_dir << "\n";
    return 0;
}

int cmd_eval(const Config& cfg, const std::string& run_dir, const std::string& truth_file,
             const std::vector<std::string>& answers_files, const std::string& out_dir,
             const std::string& formats_arg) {
    auto results = load_run(run_dir);
    for (const auto& f : answers_files) {
        auto imported = import_external_answers(f);
        results.insert(results.end(), imported.begin(), imported.end());
    }
    auto truths = truth_file.empty() ? default_ground_truth() : load_ground_truth(truth_file);

    std::vector<ReportFormat> formats;
    for (const auto& f : split_csv_arg(formats_arg)) {
        auto rf = report_format_from_name(f);
        if (!rf) throw CLI::ValidationError("eval", "unknown report format: " + f);
        formats.push_back(*rf);
    }

    Clients clients = make_clients(cfg, false, false, true);
    ScoreOutcome outcome = score_run(results, truths, *clients.eval_embed);
    for (const auto& m : outcome.missing)
        std::cerr << "not scored: " << m.question_id << " " << m.method << " (" << m.reason << ")\n";
    auto summaries = summarize(outcome.scores);
    emit_report(summaries, outcome.scores, outcome.missing, out_dir, formats);
    std::cout << detail::report_table_text(summaries);
    std::cout << "scored " << outcome.scores.size() << " of " << results.size() << " results; report in "
              << out_dir << "\n";
    return 0;
}

int cmd_export(const std::string& kg_file, const std::string& format, const std::string& out_file) {
    KnowledgeGraph kg = load_graph(kg_file);
    std::string doc;
    if (format == "graphml") doc = export_graphml(kg);
    else if (format == "edge-list" || format == "edge_list_text") doc = export_edge_list(kg);
    else throw CLI::ValidationError("export", "unknown format: " + format);
    if (out_file.empty()) std::cout << doc;
    else {
        write_text(out_file, doc);
        std::cout << "written to " << out_file << "\n";
    }
    return 0;
}

int cmd_config_show(const Config& cfg) {
    std::cout << "stub = " << (cfg.stub ? "true" : "false") << "\n";
    std::cout << "k = " << cfg.k << "\n";
    std::cout << "sentence_cap = " << cfg.sentence_cap << "\n";
    std::cout << "chunk_cap = " << cfg.chunk_cap << "\n";
    std::cout << "chunk_tokens = " << cfg.chunk_tokens << "\n";
    std::cout << "temperature = " << cfg.temperature << "\n";
    std::cout << "default_keywords = \"" << cfg.default_keywords << "\"\n";
    std::cout << "[chat]\nbase_url = \"" << cfg.chat.base_url << "\"\nmodel = \"" << cfg.chat.model << "\"\n";
    std::cout << "[embed]\nbase_url = \"" << cfg.embed.base_url << "\"\nmodel = \"" << cfg.embed.model << "\"\n";
    std::cout << "[eval_embed]\nbase_url = \"" << cfg.eval_embed.base_url << "\"\nmodel = \""
              << cfg.eval_embed.model << "\"\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GDELT knowledge-graph toolkit: ingest GDELT tables, build the direct KG, "
                 "query it, index article text, and benchmark LLM question answering"};
    app.require_subcommand(1);

    std::string config_file;
    bool stub_flag = false;
    app.add_option("--config", config_file, "TOML config file")->envname("GDELTKG_CONFIG");
    app.add_flag("--stub", stub_flag, "use deterministic offline stub clients");
    app.add_flag("--verbose", g_verbose, "chatty progress on stderr");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "parse GDELT tables and apply the keyword/time filter");
    std::vector<std::string> events_files, mentions_files, gkg_files;
    std::string keywords, ingest_out, schema_file;
    bool case_sensitive = false;
    int64_t from_ts = 0, to_ts = 0;
    ingest->add_option("--events", events_files, "events/export file(s)")->required();
    ingest->add_option("--mentions", mentions_files, "mentions file(s)")->required();
    ingest->add_option("--gkg", gkg_files, "gkg/articles file(s)")->required();
    auto* kw_opt = ingest->add_option("--keywords", keywords, "comma-separated keywords (default: case-study list)");
    ingest->add_flag("--case-sensitive", case_sensitive, "match keywords case-sensitively");
    ingest->add_option("--from", from_ts, "window start, YYYYMMDDHHMMSS (UTC as encoded in the feed)");
    ingest->add_option("--to", to_ts, "window end, YYYYMMDDHHMMSS");
    ingest->add_option("--out", ingest_out, "subset output directory")->required();
    ingest->add_option("--schema", schema_file, "column-map schema file (default: built-in GDELT 2.x map)");

    // fetch
    auto* fetch = app.add_subcommand("fetch", "download article bodies for the subset URLs");
    std::string fetch_subset, fetch_out, fixtures;
    int fetch_timeout = 0, fetch_parallel = 0;
    fetch->add_option("--subset", fetch_subset, "subset directory")->required();
    fetch->add_option("--out", fetch_out, "corpus output directory")->required();
    fetch->add_option("--fixtures", fixtures, "fixture directory (offline mode: URLs resolve to local files)");
    fetch->add_option("--timeout", fetch_timeout, "per-request timeout seconds");
    fetch->add_option("--parallel", fetch_parallel, "concurrent hosts");

    // build-kg
    auto* build = app.add_subcommand("build-kg", "materialize the direct knowledge graph from a subset");
    std::string build_subset, build_out;
    bool skip_unresolved = false;
    build->add_option("--subset", build_subset, "subset directory")->required();
    build->add_option("--out", build_out, "graph output file")->required();
    build->add_flag("--skip-unresolved", skip_unresolved, "build even if some references do not resolve");

    // index
    auto* index = app.add_subcommand("index", "chunk and embed a corpus into a vector store");
    std::string index_corpus, index_out;
    int index_max_tokens = 0;
    size_t index_batch = 16;
    index->add_option("--corpus", index_corpus, "corpus directory")->required();
    index->add_option("--out", index_out, "store output file")->required();
    index->add_option("--max-tokens", index_max_tokens, "tokens per chunk (default 500)");
    index->add_option("--batch", index_batch, "embedding batch size");

    // search
    auto* search = app.add_subcommand("search", "nearest chunks for a query");
    std::string search_store, search_query;
    size_t search_k = 5;
    search->add_option("--store", search_store, "store file")->required();
    search->add_option("--query", search_query, "query text")->required();
    search->add_option("-k,--k", search_k, "neighbors to return");

    // query
    auto* query = app.add_subcommand("query", "keyword and aggregate queries over the graph");
    std::string query_kg, query_keywords, query_emit = "sentences", query_source, query_attribution, query_out;
    int query_top_themes = 0;
    query->add_option("--kg", query_kg, "graph file")->required();
    query->add_option("--keywords", query_keywords, "comma-separated keywords for triple-sentence search");
    query->add_option("--emit", query_emit, "sentences|subgraph|graphml");
    query->add_option("--top-themes", query_top_themes, "rank the top K themes");
    query->add_option("--count-articles-by-source", query_source, "count distinct articles for a source pattern");
    query->add_option("--attribution", query_attribution, "articles attributed to a person/organization");
    query->add_option("--out", query_out, "output file (default stdout)");

    // ask
    auto* ask = app.add_subcommand("ask", "graph-route question answering");
    std::string ask_kg, ask_question, ask_keywords, ask_out;
    ask->add_option("--kg", ask_kg, "graph file")->required();
    ask->add_option("--question", ask_question, "question text")->required();
    ask->add_option("--keywords", ask_keywords, "comma-separated retrieval keywords")->required();
    ask->add_option("--out", ask_out, "write the full QA record as JSON");

    // rag
    auto* rag = app.add_subcommand("rag", "vector-store RAG question answering");
    std::string rag_store, rag_question, rag_out;
    size_t rag_k = 0;
    rag->add_option("--store", rag_store, "store file")->required();
    rag->add_option("--question", rag_question, "question text")->required();
    rag->add_option("-k,--k", rag_k, "retrieved chunks");
    rag->add_option("--out", rag_out, "write the full QA record as JSON");

    // bench
    auto* bench = app.add_subcommand("bench", "run the question set across methods");
    std::string bench_kg, bench_store, bench_questions, bench_methods = "graph_query,vector_rag", bench_out;
    bench->add_option("--kg", bench_kg, "graph file")->required();
    bench->add_option("--store", bench_store, "store file (required for vector_rag)");
    bench->add_option("--questions", bench_questions, "question set TOML (default: built-in set)");
    bench->add_option("--methods", bench_methods, "comma-separated methods");
    bench->add_option("--out", bench_out, "run output directory")->required();

    // eval
    auto* eval = app.add_subcommand("eval", "score a run against ground truth");
    std::string eval_run, eval_truth, eval_out, eval_formats = "table,csv,json,boxplot_svg";
    std::vector<std::string> eval_answers;
    eval->add_option("--run", eval_run, "run directory")->required();
    eval->add_option("--truth", eval_truth, "ground-truth TOML (default: built-in set)");
    eval->add_option("--answers", eval_answers, "external answers file(s) to score alongside the run");
    eval->add_option("--out", eval_out, "report output directory")->required();
    eval->add_option("--format", eval_formats, "comma-separated: table,csv,json,boxplot_svg");

    // export
    auto* exp = app.add_subcommand("export", "serialize a graph for external tools");
    std::string export_kg, export_format, export_out;
    exp->add_option("--kg", export_kg, "graph file")->required();
    exp->add_option("--format", export_format, "graphml|edge-list")->required();
    exp->add_option("--out", export_out, "output file (default stdout)");

    // config
    auto* conf = app.add_subcommand("config", "print the effective configuration");

    // overridable knobs (flags beat environment beats config file)
    size_t k_flag = 0, sentence_cap_flag = 0, chunk_cap_flag = 0;
    auto* k_opt = app.add_option("--k", k_flag, "retrieved chunks per question");
    auto* scap_opt = app.add_option("--sentence-cap", sentence_cap_flag, "graph-route context cap");
    auto* ccap_opt = app.add_option("--chunk-cap", chunk_cap_flag, "rag-route context cap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        app.exit(e);
        return 2;  // usage error: unknown subcommand/flag, missing required option
    }

    try {
        Config cfg = load_config(config_file);
        if (stub_flag) cfg.stub = true;
        if (k_opt->count()) cfg.k = k_flag;
        if (scap_opt->count()) cfg.sentence_cap = sentence_cap_flag;
        if (ccap_opt->count()) cfg.chunk_cap = chunk_cap_flag;

        if (ingest->parsed()) {
            SchemaMap schema = schema_file.empty() ? default_schema() : load_schema(schema_file);
            std::string kws = kw_opt->count() ? keywords : cfg.default_keywords;
            return cmd_ingest(cfg, schema, events_files, mentions_files, gkg_files, kws, case_sensitive,
                              from_ts, to_ts, ingest_out);
        }
        if (fetch->parsed()) return cmd_fetch(cfg, fetch_subset, fetch_out, fixtures, fetch_timeout, fetch_parallel);
        if (build->parsed()) return cmd_build_kg(build_subset, build_out, skip_unresolved);
        if (index->parsed()) return cmd_index(cfg, index_corpus, index_out, index_max_tokens, index_batch);
        if (search->parsed()) return cmd_search(cfg, search_store, search_query, search_k);
        if (query->parsed())
            return cmd_query(query_kg, query_keywords, query_emit, query_top_themes, query_source,
                             query_attribution, query_out);
        if (ask->parsed()) return cmd_ask(cfg, ask_kg, ask_question, ask_keywords, ask_out);
        if (rag->parsed()) return cmd_rag(cfg, rag_store, rag_question, rag_k, rag_out);
        if (bench->parsed()) return cmd_bench(cfg, bench_kg, bench_store, bench_questions, bench_methods, bench_out);
        if (eval->parsed()) return cmd_eval(cfg, eval_run, eval_truth, eval_answers, eval_out, eval_formats);
        if (exp->parsed()) return cmd_export(export_kg, export_format, export_out);
        if (conf->parsed()) return cmd_config_show(cfg);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
