#ifndef SECITE_PIPELINE_HPP
#define SECITE_PIPELINE_HPP

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "secite/cluster.hpp"
#include "secite/corpus.hpp"
#include "secite/embed.hpp"
#include "secite/evaluate.hpp"
#include "secite/extract.hpp"
#include "secite/summarize.hpp"
#include "secite/svg_plot.hpp"
#include "secite/textprep.hpp"
#include "secite/tsne.hpp"
#include "secite/util.hpp"

namespace secite {

using Json = nlohmann::ordered_json;

struct RunConfig {
    std::string manifest_path;
    std::string out_dir;
    std::vector<std::size_t> ks = {2, 3};
    std::uint64_t seed = 42;
    bool offline = false;
    bool embed_cleaned = false;   // embed cleaned_text instead of original sentences
    bool normalize = false;       // L2-normalize vectors before clustering
    std::optional<std::string> stopwords_path;
    std::optional<std::string> lexicon_positive_path;
    std::optional<std::string> lexicon_negative_path;
    std::optional<std::string> templates_dir;
    std::optional<std::string> merge_contexts_path;
    std::string embed_url;  // empty: hashed trigram fallback
    std::string gen_url;    // empty: no generation endpoint
    std::size_t fallback_dim = 512;
    std::size_t extractive_sentences = 3;
    std::chrono::milliseconds http_timeout{10000};
    int http_max_retries = 3;
    std::chrono::milliseconds http_backoff{250};

    void validate() const {
        if (out_dir.empty()) throw std::invalid_argument("output directory required");
        for (std::size_t k : ks) {
            if (k < 2) throw std::invalid_argument("k values must be >= 2");
        }
        if (ks.empty()) throw std::invalid_argument("at least one k value required");
    }
};

// Artifact file names under the output directory; each stage reads its
// predecessor's file and writes its own.
inline constexpr const char* kContextsFile = "contexts.json";
inline constexpr const char* kEmbeddingsFile = "embeddings.json";
inline constexpr const char* kClustersFile = "clusters.json";
inline constexpr const char* kProjectionFile = "projection.json";
inline constexpr const char* kScatterFile = "scatter.svg";
inline constexpr const char* kSummariesFile = "summaries.json";
inline constexpr const char* kReportJsonFile = "report.json";
inline constexpr const char* kReportMdFile = "report.md";

namespace pipeline_detail {

inline std::string artifact_path(const RunConfig& cfg, const char* name) {
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

inline std::string iso8601_utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

inline Json load_artifact(const RunConfig& cfg, const char* name, const char* producer) {
    const std::string path = artifact_path(cfg, name);
    std::string content;
    if (!read_file(path, content)) {
        throw std::runtime_error(std::string(name) + " not found in " + cfg.out_dir + " (run `secite " +
                                 producer + "` first)");
    }
    try {
        return Json::parse(content);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(std::string(name) + " is not valid JSON: " + e.what());
    }
}

}  // namespace pipeline_detail

inline std::set<std::string> active_stopwords(const RunConfig& cfg) {
    return cfg.stopwords_path ? load_stopwords(*cfg.stopwords_path) : default_stopwords();
}

inline PolarityLexicon active_lexicon(const RunConfig& cfg) {
    PolarityLexicon lex = default_lexicon();
    if (cfg.lexicon_positive_path) lex.positive = load_wordlist(*cfg.lexicon_positive_path);
    if (cfg.lexicon_negative_path) lex.negative = load_wordlist(*cfg.lexicon_negative_path);
    return lex;
}

inline PromptTemplates active_templates(const RunConfig& cfg) {
    return cfg.templates_dir ? load_templates(*cfg.templates_dir) : default_templates();
}

inline EmbeddingProviderConfig embedding_provider(const RunConfig& cfg) {
    EmbeddingProviderConfig provider;
    if (!cfg.offline && !cfg.embed_url.empty()) {
        provider.kind = ProviderKind::Remote;
        provider.base_url = cfg.embed_url;
    } else {
        provider.kind = ProviderKind::HashedFallback;
        provider.dim = cfg.fallback_dim;
    }
    provider.timeout = cfg.http_timeout;
    provider.max_retries = cfg.http_max_retries;
    provider.backoff = cfg.http_backoff;
    return provider;
}

inline GenerationConfig generation_config(const RunConfig& cfg) {
    GenerationConfig gen;
    gen.base_url = cfg.gen_url;
    gen.timeout = cfg.http_timeout;
    gen.max_retries = cfg.http_max_retries;
    gen.backoff = cfg.http_backoff;
    return gen;
}

// ---------------------------------------------------------------- extract --

struct DocumentRecord {
    std::string id;
    std::string source_path;
    bool parsed = false;
    std::string failure_reason;
    std::size_t sentence_count = 0;
    std::size_t reference_count = 0;
    std::vector<std::string> warnings;
};

struct ExtractStage {
    TargetPaper target;
    std::string target_full_text_path;  // resolved; empty when absent
    std::vector<DocumentRecord> documents;
    std::vector<CitationContext> contexts;
    std::size_t dedup_count = 0;
    std::vector<std::string> warnings;

    std::size_t documents_total() const { return documents.size(); }
    std::size_t documents_parsed() const {
        std::size_t n = 0;
        for (const auto& d : documents) n += d.parsed;
        return n;
    }
};

inline ExtractStage run_extract(const RunConfig& cfg) {
    ExtractStage stage;
    const std::set<std::string> stopwords = active_stopwords(cfg);
    Corpus corpus = ingest_corpus(cfg.manifest_path);
    stage.target = corpus.target;
    stage.warnings = corpus.warnings;

    // Re-resolve the full-text path for stage handoffs.
    {
        std::string manifest_text;
        read_file(cfg.manifest_path, manifest_text);
        const auto m = nlohmann::json::parse(manifest_text);
        if (m.contains("target") && m["target"].contains("full_text_path")) {
            const std::filesystem::path base = std::filesystem::path(cfg.manifest_path).parent_path();
            const std::filesystem::path p = m["target"]["full_text_path"].get<std::string>();
            stage.target_full_text_path = p.is_absolute() ? p.string() : (base / p).string();
        }
    }

    std::map<std::string, std::set<int>> targets_by_doc;
    std::map<std::string, std::size_t> sentences_by_doc;

    for (const Document& doc : corpus.documents) {
        DocumentRecord rec;
        rec.id = doc.id;
        rec.source_path = doc.source_path;
        rec.parsed = doc.status == DocumentStatus::Parsed;
        rec.failure_reason = doc.failure_reason;
        rec.sentence_count = doc.sentences.size();
        rec.reference_count = doc.references.size();
        rec.warnings = doc.warnings;
        sentences_by_doc[doc.id] = doc.sentences.size();

        if (rec.parsed) {
            const std::set<int> target_numbers = resolve_target_reference(doc, corpus.target);
            targets_by_doc[doc.id] = target_numbers;
            if (!target_numbers.empty()) {
                ExtractionOutput extracted = extract_citation_contexts(doc, target_numbers, stopwords);
                stage.dedup_count += extracted.dedup_count;
                for (auto& w : extracted.warnings) rec.warnings.push_back(std::move(w));
                for (CitationContext& ctx : extracted.contexts) {
                    stage.contexts.push_back(trim_context(ctx));
                }
            }
        }
        stage.documents.push_back(std::move(rec));
    }

    // Merge hand-verified contexts, if provided.
    if (cfg.merge_contexts_path) {
        WarningLog log;
        std::map<std::string, std::size_t> manual_seq;
        for (const ManualContextLine& line : parse_manual_contexts(*cfg.merge_contexts_path, &log)) {
            std::vector<MarkerGroup> groups = find_marker_groups(line.sentence, &log);
            if (groups.empty()) {
                log.add("manual context for " + line.doc_id + " has no bracket marker; skipped");
                continue;
            }
            std::set<int> all_numbers;
            for (const auto& g : groups) all_numbers.insert(g.numbers.begin(), g.numbers.end());
            std::set<int> target_numbers;
            auto it = targets_by_doc.find(line.doc_id);
            if (it != targets_by_doc.end() && !it->second.empty()) {
                for (int n : all_numbers) {
                    if (it->second.count(n)) target_numbers.insert(n);
                }
            }
            if (target_numbers.empty()) target_numbers = all_numbers;  // hand-verified

            CitationContext ctx;
            ctx.doc_id = line.doc_id;
            // Synthetic index past any real sentence so manual lines sort last.
            ctx.sentence_index = 1000000 + manual_seq[line.doc_id]++;
            ctx.text = line.sentence;
            ctx.marker_groups = std::move(groups);
            ctx.target_numbers = std::move(target_numbers);
            stage.contexts.push_back(std::move(ctx));
        }
        for (auto& w : log.items) stage.warnings.push_back(std::move(w));
    }

    // Corpus-level dedup on cleaned text (cross-document duplicates).
    {
        std::set<std::string> seen;
        std::vector<CitationContext> unique;
        for (CitationContext& ctx : stage.contexts) {
            const std::string key = clean_text(ctx.text, stopwords).cleaned_text;
            if (seen.insert(key).second) {
                unique.push_back(std::move(ctx));
            } else {
                ++stage.dedup_count;
            }
        }
        stage.contexts = std::move(unique);
    }
    return stage;
}

inline void write_contexts_json(const RunConfig& cfg, const ExtractStage& stage) {
    Json j;
    j["schema"] = "secite.contexts/1";
    j["target"] = {{"id", stage.target.id}, {"title", stage.target.title}};
    if (!stage.target_full_text_path.empty()) {
        j["target"]["full_text_path"] = stage.target_full_text_path;
    }
    j["documents"] = Json::array();
    for (const auto& d : stage.documents) {
        Json dj = {{"id", d.id},
                   {"source_path", d.source_path},
                   {"status", d.parsed ? "parsed" : "parse_failed"},
                   {"sentence_count", d.sentence_count},
                   {"reference_count", d.reference_count},
                   {"warnings", d.warnings}};
        if (!d.parsed) dj["failure_reason"] = d.failure_reason;
        j["documents"].push_back(dj);
    }
    j["extraction"] = {{"documents_total", stage.documents_total()},
                       {"documents_parsed", stage.documents_parsed()},
                       {"contexts_found", stage.contexts.size()},
                       {"dedup_count", stage.dedup_count}};
    j["contexts"] = Json::array();
    for (const auto& ctx : stage.contexts) {
        Json groups = Json::array();
        for (const auto& g : ctx.marker_groups) {
            groups.push_back({{"begin", g.begin},
                              {"end", g.end},
                              {"numbers", std::vector<int>(g.numbers.begin(), g.numbers.end())}});
        }
        j["contexts"].push_back(
            {{"doc_id", ctx.doc_id},
             {"sentence_index", ctx.sentence_index},
             {"text", ctx.text},
             {"marker_groups", groups},
             {"target_numbers", std::vector<int>(ctx.target_numbers.begin(), ctx.target_numbers.end())}});
    }
    j["warnings"] = stage.warnings;
    write_file(pipeline_detail::artifact_path(cfg, kContextsFile), j.dump(2) + "\n");
}

inline ExtractStage load_contexts_json(const RunConfig& cfg, const char* producer = "extract") {
    const Json j = pipeline_detail::load_artifact(cfg, kContextsFile, producer);
    ExtractStage stage;
    stage.target.id = j.at("target").at("id").get<std::string>();
    stage.target.title = j.at("target").at("title").get<std::string>();
    if (j.at("target").contains("full_text_path")) {
        stage.target_full_text_path = j.at("target").at("full_text_path").get<std::string>();
        std::string full_text;
        if (read_file(stage.target_full_text_path, full_text) && utf8_valid(full_text)) {
            stage.target.full_text = std::move(full_text);
        }
    }
    for (const auto& dj : j.at("documents")) {
        DocumentRecord d;
        d.id = dj.at("id").get<std::string>();
        d.source_path = dj.at("source_path").get<std::string>();
        d.parsed = dj.at("status").get<std::string>() == "parsed";
        if (dj.contains("failure_reason")) d.failure_reason = dj.at("failure_reason").get<std::string>();
        d.sentence_count = dj.at("sentence_count").get<std::size_t>();
        d.reference_count = dj.at("reference_count").get<std::size_t>();
        for (const auto& w : dj.at("warnings")) d.warnings.push_back(w.get<std::string>());
        stage.documents.push_back(std::move(d));
    }
    stage.dedup_count = j.at("extraction").at("dedup_count").get<std::size_t>();
    for (const auto& cj : j.at("contexts")) {
        CitationContext ctx;
        ctx.doc_id = cj.at("doc_id").get<std::string>();
        ctx.sentence_index = cj.at("sentence_index").get<std::size_t>();
        ctx.text = cj.at("text").get<std::string>();
        for (const auto& gj : cj.at("marker_groups")) {
            MarkerGroup g;
            g.begin = gj.at("begin").get<std::size_t>();
            g.end = gj.at("end").get<std::size_t>();
            for (const auto& n : gj.at("numbers")) g.numbers.insert(n.get<int>());
            ctx.marker_groups.push_back(std::move(g));
        }
        for (const auto& n : cj.at("target_numbers")) ctx.target_numbers.insert(n.get<int>());
        stage.contexts.push_back(std::move(ctx));
    }
    for (const auto& w : j.at("warnings")) stage.warnings.push_back(w.get<std::string>());
    return stage;
}

// ---------------------------------------------------------------- cluster --

struct ClusterStage {
    std::vector<CleanedStatement> statements;  // aligned with contexts
    std::vector<EmbeddingVector> vectors;
    ProviderKind provider = ProviderKind::HashedFallback;
    std::size_t dim = 0;
    ClusterCountComparison comparison;
    SentimentLabeling labeling;
    double mean_silhouette = 0.0;
    std::vector<std::string> warnings;

    const ClusterModel& selected_model() const { return comparison.models.at(comparison.selected_k); }
};

inline ClusterStage run_cluster(const RunConfig& cfg, const ExtractStage& extract) {
    cfg.validate();
    ClusterStage stage;
    const std::set<std::string> stopwords = active_stopwords(cfg);
    for (const auto& ctx : extract.contexts) {
        stage.statements.push_back(
            make_cleaned_statement(ctx.doc_id, ctx.sentence_index, ctx.text, stopwords));
    }
    const std::size_t n = stage.statements.size();

    std::vector<std::size_t> feasible;
    for (std::size_t k : cfg.ks) {
        if (k <= n) {
            feasible.push_back(k);
        } else {
            stage.warnings.push_back("k=" + std::to_string(k) + " skipped: only " +
                                     std::to_string(n) + " statements");
        }
    }
    if (feasible.empty()) {
        std::string ks_text;
        for (std::size_t k : cfg.ks) ks_text += (ks_text.empty() ? "" : ",") + std::to_string(k);
        throw std::runtime_error("clustering not feasible: " + std::to_string(n) +
                                 " statements for k in {" + ks_text + "}");
    }

    const EmbeddingProviderConfig provider = embedding_provider(cfg);
    stage.provider = provider.kind;
    std::vector<std::string> texts;
    texts.reserve(n);
    for (const auto& s : stage.statements) {
        texts.push_back(cfg.embed_cleaned ? s.cleaned_text : s.original_text);
    }
    stage.vectors = embed_batch(texts, provider);
    if (cfg.normalize) {
        for (auto& v : stage.vectors) l2_normalize(v);
    }
    stage.dim = stage.vectors.empty() ? 0 : stage.vectors[0].dim();

    stage.comparison = compare_cluster_counts(stage.vectors, feasible, cfg.seed);
    stage.mean_silhouette = stage.comparison.mean_silhouette_by_k.at(stage.comparison.selected_k);

    WarningLog label_log;
    stage.labeling =
        label_clusters(stage.selected_model(), stage.statements, active_lexicon(cfg), &label_log);
    for (auto& w : label_log.items) stage.warnings.push_back(std::move(w));
    return stage;
}

inline void write_embeddings_json(const RunConfig& cfg, const ClusterStage& stage) {
    Json j;
    j["schema"] = "secite.embeddings/1";
    j["provider"] = provider_kind_name(stage.provider);
    j["dim"] = stage.dim;
    j["seed"] = cfg.seed;
    j["embed_cleaned"] = cfg.embed_cleaned;
    j["normalize"] = cfg.normalize;
    j["count"] = stage.vectors.size();
    j["vectors"] = Json::array();
    for (const auto& v : stage.vectors) j["vectors"].push_back(v.values);
    write_file(pipeline_detail::artifact_path(cfg, kEmbeddingsFile), j.dump() + "\n");
}

inline void write_clusters_json(const RunConfig& cfg, const ClusterStage& stage) {
    const ClusterModel& model = stage.selected_model();
    Json j;
    j["schema"] = "secite.clusters/1";
    j["provider"] = provider_kind_name(stage.provider);
    j["dim"] = stage.dim;
    j["k"] = model.k;
    j["seed"] = model.seed;
    j["assignments"] = model.assignments;
    Json labels = Json::object();
    for (const auto& [c, label] : stage.labeling.label_of_cluster) {
        labels[std::to_string(c)] = to_string(label);
    }
    j["labels"] = labels;
    j["mean_silhouette"] = stage.mean_silhouette;
    Json by_k = Json::object();
    for (const auto& [k, s] : stage.comparison.mean_silhouette_by_k) by_k[std::to_string(k)] = s;
    j["k_comparison"] = by_k;
    j["selected_k"] = stage.comparison.selected_k;
    j["inertia"] = model.inertia;
    j["iterations_run"] = model.iterations_run;
    Json scores = Json::object();
    for (const auto& [c, s] : stage.labeling.cluster_polarity_score) scores[std::to_string(c)] = s;
    j["cluster_polarity_scores"] = scores;
    j["centroids"] = Json::array();
    for (const auto& c : model.centroids) j["centroids"].push_back(c.values);
    j["warnings"] = stage.warnings;
    write_file(pipeline_detail::artifact_path(cfg, kClustersFile), j.dump(2) + "\n");
}

struct LoadedClusters {
    std::string provider;
    std::size_t dim = 0;
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> assignments;
    SentimentLabeling labeling;
    double mean_silhouette = 0.0;
    std::map<std::size_t, double> k_comparison;
    std::size_t selected_k = 0;
};

inline LoadedClusters load_clusters_json(const RunConfig& cfg) {
    const Json j = pipeline_detail::load_artifact(cfg, kClustersFile, "cluster");
    LoadedClusters out;
    out.provider = j.at("provider").get<std::string>();
    out.dim = j.at("dim").get<std::size_t>();
    out.k = j.at("k").get<std::size_t>();
    out.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& a : j.at("assignments")) out.assignments.push_back(a.get<std::size_t>());
    for (const auto& [c, label] : j.at("labels").items()) {
        out.labeling.label_of_cluster[std::stoul(c)] = sentiment_from_string(label.get<std::string>());
    }
    out.mean_silhouette = j.at("mean_silhouette").get<double>();
    for (const auto& [k, s] : j.at("k_comparison").items()) {
        out.k_comparison[std::stoul(k)] = s.get<double>();
    }
    out.selected_k = j.at("selected_k").get<std::size_t>();
    return out;
}

struct LoadedEmbeddings {
    std::string provider;
    std::size_t dim = 0;
    std::uint64_t seed = 0;
    std::vector<EmbeddingVector> vectors;
};

inline LoadedEmbeddings load_embeddings_json(const RunConfig& cfg) {
    const Json j = pipeline_detail::load_artifact(cfg, kEmbeddingsFile, "cluster");
    LoadedEmbeddings out;
    out.provider = j.at("provider").get<std::string>();
    out.dim = j.at("dim").get<std::size_t>();
    out.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& vj : j.at("vectors")) {
        EmbeddingVector v;
        for (const auto& x : vj) v.values.push_back(x.get<double>());
        out.vectors.push_back(std::move(v));
    }
    return out;
}

// ---------------------------------------------------------------- project --

struct ProjectStage {
    Projection2D projection;
    std::string svg;
    std::vector<std::string> warnings;
};

inline ProjectStage run_project(const RunConfig& cfg, const std::vector<EmbeddingVector>& vectors,
                                const std::vector<std::size_t>& assignments,
                                const SentimentLabeling& labeling,
                                std::optional<double> mean_silhouette) {
    ProjectStage stage;
    TsneConfig tsne_cfg;
    tsne_cfg.seed = cfg.seed;
    WarningLog log;
    stage.projection = tsne_project(vectors, tsne_cfg, &log);
    stage.warnings = std::move(log.items);
    stage.svg = render_scatter(stage.projection, labeling, assignments, mean_silhouette);
    return stage;
}

inline void write_projection_json(const RunConfig& cfg, const ProjectStage& stage,
                                  const std::vector<std::size_t>& assignments,
                                  const SentimentLabeling& labeling) {
    // Format pinned for downstream tooling: a top-level array of points.
    Json j = Json::array();
    for (std::size_t i = 0; i < stage.projection.points.size(); ++i) {
        const std::size_t cluster = i < assignments.size() ? assignments[i] : 0;
        std::string label = "cluster " + std::to_string(cluster);
        auto it = labeling.label_of_cluster.find(cluster);
        if (it != labeling.label_of_cluster.end()) label = to_string(it->second);
        j.push_back({{"x", stage.projection.points[i][0]},
                     {"y", stage.projection.points[i][1]},
                     {"cluster", cluster},
                     {"label", label}});
    }
    write_file(pipeline_detail::artifact_path(cfg, kProjectionFile), j.dump(2) + "\n");
    write_file(pipeline_detail::artifact_path(cfg, kScatterFile), stage.svg);
}

// -------------------------------------------------------------- summarize --

struct SummarizeStage {
    std::vector<Summary> summaries;
    std::vector<std::string> skipped;  // stages not attempted, with the reason
    std::vector<std::string> warnings;
};

inline SummarizeStage run_summarize(const RunConfig& cfg, const ExtractStage& extract,
                                    const std::vector<std::size_t>& assignments,
                                    const SentimentLabeling& labeling) {
    SummarizeStage stage;
    if (extract.contexts.size() != assignments.size()) {
        throw std::runtime_error("summarize: contexts/assignments size mismatch");
    }
    const EmbedFn embed = make_embed_fn(embedding_provider(cfg));
    const GenerationConfig gen = generation_config(cfg);
    const PromptTemplates templates = active_templates(cfg);
    const bool offline = cfg.offline || cfg.gen_url.empty();
    if (!cfg.offline && cfg.gen_url.empty()) {
        stage.warnings.push_back("no generation endpoint configured; using extractive fallback");
    }

    std::map<SentimentLabel, std::vector<CitationContext>> by_polarity;
    for (std::size_t i = 0; i < extract.contexts.size(); ++i) {
        auto it = labeling.label_of_cluster.find(assignments[i]);
        if (it == labeling.label_of_cluster.end()) continue;
        if (it->second == SentimentLabel::Neutral) continue;  // k=3 middle cluster
        by_polarity[it->second].push_back(extract.contexts[i]);
    }

    for (const SentimentLabel polarity : {SentimentLabel::Positive, SentimentLabel::Negative}) {
        auto it = by_polarity.find(polarity);
        if (it == by_polarity.end() || it->second.empty()) {
            stage.skipped.push_back(std::string("citations/") + to_string(polarity) +
                                    ": no statements in this cluster");
            continue;
        }
        stage.summaries.push_back(summarize_cluster(it->second, polarity, extract.target, gen,
                                                    offline, embed, templates,
                                                    cfg.extractive_sentences));
    }

    if (extract.target.full_text && !trim(*extract.target.full_text).empty()) {
        if (offline) {
            stage.skipped.push_back("full_text: offline mode (no generation endpoint)");
        } else {
            for (const SentimentLabel polarity :
                 {SentimentLabel::Positive, SentimentLabel::Negative}) {
                stage.summaries.push_back(
                    summarize_fulltext(extract.target, polarity, gen, false, templates));
            }
        }
    } else {
        stage.skipped.push_back("full_text: target full text not provided");
    }
    return stage;
}

inline void write_summaries_json(const RunConfig& cfg, const SummarizeStage& stage) {
    Json j;
    j["schema"] = "secite.summaries/1";
    j["summaries"] = Json::array();
    for (const auto& s : stage.summaries) {
        Json sj = {{"paper_id", s.paper_id},
                   {"polarity", to_string(s.polarity)},
                   {"source", to_string(s.source)},
                   {"text", s.text},
                   {"provider", to_string(s.provider)}};
        if (s.source == SummarySource::Citations) {
            sj["cited_refs"] = std::vector<int>(s.cited_refs.begin(), s.cited_refs.end());
        }
        j["summaries"].push_back(sj);
    }
    j["skipped"] = stage.skipped;
    j["warnings"] = stage.warnings;
    write_file(pipeline_detail::artifact_path(cfg, kSummariesFile), j.dump(2) + "\n");
}

inline SummarizeStage load_summaries_json(const RunConfig& cfg) {
    const Json j = pipeline_detail::load_artifact(cfg, kSummariesFile, "summarize");
    SummarizeStage stage;
    for (const auto& sj : j.at("summaries")) {
        Summary s;
        s.paper_id = sj.at("paper_id").get<std::string>();
        s.polarity = sentiment_from_string(sj.at("polarity").get<std::string>());
        s.source = sj.at("source").get<std::string>() == "citations" ? SummarySource::Citations
                                                                     : SummarySource::FullText;
        s.text = sj.at("text").get<std::string>();
        s.provider = sj.at("provider").get<std::string>() == "remote_llm"
                         ? SummaryProvider::RemoteLlm
                         : SummaryProvider::ExtractiveFallback;
        if (sj.contains("cited_refs")) {
            for (const auto& n : sj.at("cited_refs")) s.cited_refs.insert(n.get<int>());
        }
        stage.summaries.push_back(std::move(s));
    }
    for (const auto& w : j.at("skipped")) stage.skipped.push_back(w.get<std::string>());
    for (const auto& w : j.at("warnings")) stage.warnings.push_back(w.get<std::string>());
    return stage;
}

// --------------------------------------------------------------- evaluate --

// Citation-derived vs full-text similarity, per polarity, when both exist.
inline std::optional<std::map<std::string, double>> similarity_by_polarity(
    const std::vector<Summary>& summaries, const EmbedFn& embed, WarningLog* warnings = nullptr) {
    std::map<std::string, double> out;
    for (const SentimentLabel polarity : {SentimentLabel::Positive, SentimentLabel::Negative}) {
        const Summary* citation = nullptr;
        const Summary* fulltext = nullptr;
        for (const auto& s : summaries) {
            if (s.polarity != polarity) continue;
            if (s.source == SummarySource::Citations) citation = &s;
            if (s.source == SummarySource::FullText) fulltext = &s;
        }
        if (citation && fulltext) {
            out[to_string(polarity)] = semantic_similarity(*citation, *fulltext, embed, warnings);
        }
    }
    if (out.empty()) return std::nullopt;
    return out;
}

struct PipelineResult {
    EvaluationReport report;
    int exit_code = 0;  // 0 success, 2 partial-stage failure (1 = fatal, thrown)
};

// Full pipeline: ingest/extract, clean+embed+cluster, project, summarize,
// evaluate. Failures after extraction are recorded in the report instead of
// aborting; manifest and embedding-contract problems stay fatal.
inline PipelineResult run_pipeline(const RunConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);
    const std::string started = pipeline_detail::iso8601_utc_now();

    std::vector<std::string> warnings;
    bool stage_failed = false;
    auto record_failure = [&](const char* stage, const std::exception& e) {
        warnings.push_back(std::string(stage) + " stage failed: " + e.what());
        stage_failed = true;
    };

    const ExtractStage extract = run_extract(cfg);
    write_contexts_json(cfg, extract);
    for (const auto& w : extract.warnings) warnings.push_back(w);
    for (const auto& d : extract.documents) {
        for (const auto& w : d.warnings) warnings.push_back(d.id + ": " + w);
    }

    std::map<std::string, std::string> artifacts;
    artifacts["contexts_json"] = pipeline_detail::artifact_path(cfg, kContextsFile);

    std::optional<ClusterStage> cluster;
    std::optional<SummarizeStage> summarize;

    const std::size_t min_k = *std::min_element(cfg.ks.begin(), cfg.ks.end());
    if (extract.contexts.size() >= min_k) {
        try {
            cluster = run_cluster(cfg, extract);
            write_embeddings_json(cfg, *cluster);
            write_clusters_json(cfg, *cluster);
            artifacts["embeddings_json"] = pipeline_detail::artifact_path(cfg, kEmbeddingsFile);
            artifacts["clusters_json"] = pipeline_detail::artifact_path(cfg, kClustersFile);
            for (const auto& w : cluster->warnings) warnings.push_back(w);
        } catch (const EmbeddingError&) {
            throw;  // embedding-contract violations stay fatal
        } catch (const std::exception& e) {
            record_failure("cluster", e);
        }
    } else {
        warnings.push_back("clustering not run: " + std::to_string(extract.contexts.size()) +
                           " contexts (need at least " + std::to_string(min_k) + ")");
    }

    {
        // Project whatever we have so the scatter artifact always exists.
        std::vector<std::size_t> assignments;
        SentimentLabeling labeling;
        std::vector<EmbeddingVector> vectors;
        std::optional<double> mean_sil;
        if (cluster) {
            assignments = cluster->selected_model().assignments;
            labeling = cluster->labeling;
            vectors = cluster->vectors;
            mean_sil = cluster->mean_silhouette;
        } else if (!extract.contexts.empty()) {
            std::vector<std::string> texts;
            for (const auto& ctx : extract.contexts) texts.push_back(ctx.text);
            vectors = embed_batch(texts, embedding_provider(cfg));
            assignments.assign(vectors.size(), 0);
        }
        try {
            const ProjectStage p = run_project(cfg, vectors, assignments, labeling, mean_sil);
            write_projection_json(cfg, p, assignments, labeling);
            artifacts["projection_json"] = pipeline_detail::artifact_path(cfg, kProjectionFile);
            artifacts["scatter_svg"] = pipeline_detail::artifact_path(cfg, kScatterFile);
            for (const auto& w : p.warnings) warnings.push_back(w);
        } catch (const std::exception& e) {
            record_failure("project", e);
        }
    }

    if (cluster) {
        try {
            SummarizeStage s = run_summarize(cfg, extract, cluster->selected_model().assignments,
                                             cluster->labeling);
            write_summaries_json(cfg, s);
            artifacts["summaries_json"] = pipeline_detail::artifact_path(cfg, kSummariesFile);
            for (const auto& w : s.warnings) warnings.push_back(w);
            for (const auto& sk : s.skipped) warnings.push_back("summarize skipped " + sk);
            summarize = std::move(s);
        } catch (const std::exception& e) {
            record_failure("summarize", e);
        }
    }

    std::optional<ClusteringSection> clustering_section;
    std::optional<LabelingSection> labeling_section;
    if (cluster) {
        ClusteringSection cs;
        cs.silhouette_by_k = cluster->comparison.mean_silhouette_by_k;
        cs.selected_k = cluster->comparison.selected_k;
        clustering_section = std::move(cs);

        LabelingSection ls;
        for (std::size_t i = 0; i < cluster->selected_model().assignments.size(); ++i) {
            const auto label =
                cluster->labeling.label_of_cluster.at(cluster->selected_model().assignments[i]);
            ls.members_by_label[to_string(label)]++;
        }
        labeling_section = std::move(ls);
    }

    std::optional<std::map<std::string, double>> similarity;
    if (summarize) {
        try {
            WarningLog sim_log;
            similarity = similarity_by_polarity(summarize->summaries,
                                                make_embed_fn(embedding_provider(cfg)), &sim_log);
            for (auto& w : sim_log.items) warnings.push_back(std::move(w));
        } catch (const std::exception& e) {
            record_failure("evaluate", e);
        }
    }

    PipelineResult result;
    result.report = build_report(
        extract.target.id, extract.documents_total(), extract.documents_parsed(),
        extract.contexts.size(), extract.dedup_count, std::move(clustering_section),
        std::move(labeling_section), std::move(similarity), std::move(artifacts), started,
        pipeline_detail::iso8601_utc_now(), std::move(warnings));
    write_file(pipeline_detail::artifact_path(cfg, kReportJsonFile),
               report_to_json(result.report).dump(2) + "\n");
    write_file(pipeline_detail::artifact_path(cfg, kReportMdFile),
               report_to_markdown(result.report));
    result.exit_code = stage_failed ? 2 : 0;
    return result;
}

// ------------------------------------------------------- CLI stage drivers --

inline void cli_extract(const RunConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);
    const ExtractStage stage = run_extract(cfg);
    write_contexts_json(cfg, stage);
}

inline void cli_cluster(const RunConfig& cfg) {
    cfg.validate();
    const ExtractStage extract = load_contexts_json(cfg);
    const ClusterStage stage = run_cluster(cfg, extract);
    write_embeddings_json(cfg, stage);
    write_clusters_json(cfg, stage);
}

inline void cli_project(const RunConfig& cfg) {
    cfg.validate();
    const LoadedEmbeddings embeddings = load_embeddings_json(cfg);
    const LoadedClusters clusters = load_clusters_json(cfg);
    if (embeddings.provider != clusters.provider || embeddings.dim != clusters.dim) {
        throw std::runtime_error("embeddings.json and clusters.json disagree on provider/dim (" +
                                 embeddings.provider + "/" + std::to_string(embeddings.dim) + " vs " +
                                 clusters.provider + "/" + std::to_string(clusters.dim) +
                                 "); re-run `secite cluster`");
    }
    if (embeddings.vectors.size() != clusters.assignments.size()) {
        throw std::runtime_error("embeddings.json and clusters.json disagree on point count");
    }
    const ProjectStage stage = run_project(cfg, embeddings.vectors, clusters.assignments,
                                           clusters.labeling, clusters.mean_silhouette);
    write_projection_json(cfg, stage, clusters.assignments, clusters.labeling);
}

inline void cli_summarize(const RunConfig& cfg) {
    cfg.validate();
    const ExtractStage extract = load_contexts_json(cfg);
    const LoadedClusters clusters = load_clusters_json(cfg);
    if (clusters.assignments.size() != extract.contexts.size()) {
        throw std::runtime_error("clusters.json does not match contexts.json; re-run `secite cluster`");
    }
    const SummarizeStage stage =
        run_summarize(cfg, extract, clusters.assignments, clusters.labeling);
    write_summaries_json(cfg, stage);
}

inline int cli_evaluate(const RunConfig& cfg) {
    cfg.validate();
    const std::string started = pipeline_detail::iso8601_utc_now();
    const ExtractStage extract = load_contexts_json(cfg);

    std::vector<std::string> warnings = extract.warnings;
    std::map<std::string, std::string> artifacts;
    artifacts["contexts_json"] = pipeline_detail::artifact_path(cfg, kContextsFile);

    std::optional<ClusteringSection> clustering_section;
    std::optional<LabelingSection> labeling_section;
    std::optional<std::map<std::string, double>> similarity;

    try {
        const LoadedClusters clusters = load_clusters_json(cfg);
        ClusteringSection cs;
        cs.silhouette_by_k = clusters.k_comparison;
        cs.selected_k = clusters.selected_k;
        clustering_section = std::move(cs);
        LabelingSection ls;
        for (std::size_t a : clusters.assignments) {
            auto it = clusters.labeling.label_of_cluster.find(a);
            if (it != clusters.labeling.label_of_cluster.end()) {
                ls.members_by_label[to_string(it->second)]++;
            }
        }
        labeling_section = std::move(ls);
        artifacts["clusters_json"] = pipeline_detail::artifact_path(cfg, kClustersFile);
    } catch (const std::exception&) {
        warnings.push_back("clustering artifacts missing; section reads not run");
    }

    try {
        const SummarizeStage summaries = load_summaries_json(cfg);
        similarity = similarity_by_polarity(summaries.summaries,
                                            make_embed_fn(embedding_provider(cfg)));
        artifacts["summaries_json"] = pipeline_detail::artifact_path(cfg, kSummariesFile);
    } catch (const std::exception&) {
        warnings.push_back("summary artifacts missing; similarity reads not run");
    }

    const EvaluationReport report = build_report(
        extract.target.id, extract.documents_total(), extract.documents_parsed(),
        extract.contexts.size(), extract.dedup_count, std::move(clustering_section),
        std::move(labeling_section), std::move(similarity), std::move(artifacts), started,
        pipeline_detail::iso8601_utc_now(), std::move(warnings));
    write_file(pipeline_detail::artifact_path(cfg, kReportJsonFile),
               report_to_json(report).dump(2) + "\n");
    write_file(pipeline_detail::artifact_path(cfg, kReportMdFile), report_to_markdown(report));
    return 0;
}

}  // namespace secite

#endif  // SECITE_PIPELINE_HPP
