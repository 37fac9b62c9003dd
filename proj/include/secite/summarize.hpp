#ifndef SECITE_SUMMARIZE_HPP
#define SECITE_SUMMARIZE_HPP

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "secite/cluster.hpp"
#include "secite/embed.hpp"
#include "secite/extract.hpp"
#include "secite/http_json.hpp"
#include "secite/util.hpp"

namespace secite {

struct PromptTemplate {
    std::string name;
    std::string text;  // {placeholder} syntax, single-pass substitution
    std::size_t max_tokens = 512;
};

// Verbatim single-pass substitution: placeholders are {lowercase_names} in the
// template; braces inside substituted values stay literal. A placeholder with
// no entry in the fill map throws, naming the placeholder.
inline std::string render_prompt(const PromptTemplate& tmpl,
                                 const std::map<std::string, std::string>& fill) {
    std::string out;
    out.reserve(tmpl.text.size());
    std::size_t i = 0;
    while (i < tmpl.text.size()) {
        const char c = tmpl.text[i];
        if (c != '{') {
            out.push_back(c);
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < tmpl.text.size() &&
               (std::islower(static_cast<unsigned char>(tmpl.text[j])) || tmpl.text[j] == '_')) {
            ++j;
        }
        if (j > i + 1 && j < tmpl.text.size() && tmpl.text[j] == '}') {
            const std::string name = tmpl.text.substr(i + 1, j - i - 1);
            auto it = fill.find(name);
            if (it == fill.end()) {
                throw std::runtime_error("missing placeholder: " + name);
            }
            out += it->second;
            i = j + 1;
        } else {
            out.push_back(c);  // stray '{' is literal
            ++i;
        }
    }
    return out;
}

struct PromptTemplates {
    PromptTemplate cluster;
    PromptTemplate fulltext_chunk;
    PromptTemplate fulltext_reduce;
};

// These templates are this project's own wording; edit the files under
// data/templates/ (or pass a directory) to change them.
inline PromptTemplates default_templates() {
    PromptTemplates t;
    t.cluster.name = "cluster";
    t.cluster.text =
        "You are reviewing how other papers cite \"{paper_title}\".\n"
        "The statements below were grouped as {polarity} citations.\n"
        "Write a concise {polarity} summary of the paper based only on them. "
        "Keep every bracketed reference number (for example [12]) exactly as it appears.\n"
        "\n"
        "Statements:\n"
        "{statements}\n"
        "\n"
        "Summary:";
    t.cluster.max_tokens = 512;

    t.fulltext_chunk.name = "fulltext_chunk";
    t.fulltext_chunk.text =
        "Summarize the {polarity} aspects (strengths if positive, limitations if negative) "
        "of this excerpt from \"{paper_title}\":\n"
        "\n"
        "{full_text}\n"
        "\n"
        "Summary:";
    t.fulltext_chunk.max_tokens = 512;

    t.fulltext_reduce.name = "fulltext_reduce";
    t.fulltext_reduce.text =
        "Combine these partial summaries of \"{paper_title}\" into one cohesive {polarity} "
        "summary:\n"
        "\n"
        "{full_text}\n"
        "\n"
        "Summary:";
    t.fulltext_reduce.max_tokens = 512;
    return t;
}

// Template directory layout: cluster.txt, fulltext_chunk.txt,
// fulltext_reduce.txt. Files that are absent keep their defaults.
inline PromptTemplates load_templates(const std::string& dir) {
    PromptTemplates t = default_templates();
    auto maybe_load = [&](PromptTemplate& tmpl, const std::string& file) {
        std::string content;
        if (read_file(dir + "/" + file, content)) tmpl.text = content;
    };
    maybe_load(t.cluster, "cluster.txt");
    maybe_load(t.fulltext_chunk, "fulltext_chunk.txt");
    maybe_load(t.fulltext_reduce, "fulltext_reduce.txt");
    return t;
}

struct GenerationConfig {
    std::string base_url;
    std::string auth_env_var = "SECITE_GEN_TOKEN";
    std::size_t max_tokens = 1024;
    double temperature = 0.0;  // determinism preferred
    std::chrono::milliseconds timeout{30000};
    int max_retries = 3;
    std::chrono::milliseconds backoff{250};
    std::size_t max_chunk = 12000;  // characters per full-text chunk

    void validate() const {
        if (temperature < 0.0) throw std::invalid_argument("temperature must be >= 0");
    }
};

// POST {base_url}/generate {"prompt","max_tokens","temperature"} -> {"text"}.
inline std::string generate_text(const std::string& prompt, const GenerationConfig& cfg) {
    cfg.validate();
    if (cfg.base_url.empty()) {
        throw std::runtime_error("no generation endpoint configured");
    }
    HttpEndpoint ep;
    ep.base_url = cfg.base_url;
    ep.auth_env_var = cfg.auth_env_var;
    ep.timeout = cfg.timeout;
    ep.max_retries = cfg.max_retries;
    ep.backoff = cfg.backoff;

    nlohmann::json body;
    body["prompt"] = prompt;
    body["max_tokens"] = cfg.max_tokens;
    body["temperature"] = cfg.temperature;
    const nlohmann::json reply = post_json(ep, "/generate", body);
    if (!reply.is_object() || !reply.contains("text") || !reply["text"].is_string()) {
        throw std::runtime_error("generation reply missing \"text\" field");
    }
    return reply["text"].get<std::string>();
}

enum class SummarySource { Citations, FullText };
enum class SummaryProvider { RemoteLlm, ExtractiveFallback };

struct Summary {
    std::string paper_id;
    SentimentLabel polarity = SentimentLabel::Positive;
    SummarySource source = SummarySource::Citations;
    std::string text;
    std::set<int> cited_refs;  // only meaningful for source == Citations
    SummaryProvider provider = SummaryProvider::RemoteLlm;
};

namespace detail {

// Canonical corpus order for contexts regardless of input permutation.
inline std::vector<std::size_t> canonical_order(const std::vector<CitationContext>& contexts) {
    std::vector<std::size_t> order(contexts.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (contexts[a].doc_id != contexts[b].doc_id) return contexts[a].doc_id < contexts[b].doc_id;
        return contexts[a].sentence_index < contexts[b].sentence_index;
    });
    return order;
}

inline std::set<int> all_marker_numbers(const std::vector<CitationContext>& contexts) {
    std::set<int> out;
    for (const auto& ctx : contexts) {
        for (const auto& g : ctx.marker_groups) out.insert(g.numbers.begin(), g.numbers.end());
    }
    return out;
}

}  // namespace detail

// Deterministic offline summary: the k_sentences contexts closest (cosine) to
// the embedding centroid, emitted in corpus order. Permutation-stable: the
// input order never changes the selection or the output.
inline std::string extractive_summary(const std::vector<CitationContext>& contexts,
                                      std::size_t k_sentences, const EmbedFn& embed) {
    if (contexts.empty()) throw std::invalid_argument("extractive_summary: no contexts");
    if (k_sentences < 1) throw std::invalid_argument("extractive_summary: k_sentences must be >= 1");

    const std::vector<std::size_t> order = detail::canonical_order(contexts);
    std::vector<std::string> texts;
    texts.reserve(contexts.size());
    for (std::size_t idx : order) texts.push_back(contexts[idx].text);

    const std::vector<EmbeddingVector> vectors = embed(texts);
    if (vectors.size() != texts.size()) {
        throw std::runtime_error("extractive_summary: embedding count mismatch");
    }
    const std::size_t dim = vectors.empty() ? 0 : vectors[0].dim();
    EmbeddingVector centroid;
    centroid.values.assign(dim, 0.0);
    for (const auto& v : vectors) {
        for (std::size_t d = 0; d < dim; ++d) centroid.values[d] += v.values[d];
    }
    for (double& x : centroid.values) x /= static_cast<double>(vectors.size());

    std::vector<std::size_t> ranked(texts.size());
    std::iota(ranked.begin(), ranked.end(), 0);
    std::vector<double> score(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        score[i] = cosine_similarity(vectors[i], centroid);
    }
    std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
        if (score[a] != score[b]) return score[a] > score[b];
        return a < b;  // tie: earlier corpus position
    });

    const std::size_t keep = std::min(k_sentences, texts.size());
    std::vector<std::size_t> selected(ranked.begin(), ranked.begin() + keep);
    std::sort(selected.begin(), selected.end());  // back to corpus order

    std::string out;
    for (std::size_t i : selected) {
        if (!out.empty()) out.push_back(' ');
        out += texts[i];
    }
    return out;
}

namespace detail {

// Reference numbers actually mentioned in the summary text, limited to
// numbers present in the inputs (a generator may hallucinate markers).
inline std::set<int> cited_refs_in(const std::string& summary_text,
                                   const std::vector<CitationContext>& contexts) {
    const std::set<int> allowed = all_marker_numbers(contexts);
    std::set<int> out;
    for (const MarkerGroup& g : find_marker_groups(summary_text)) {
        for (int n : g.numbers) {
            if (allowed.count(n)) out.insert(n);
        }
    }
    return out;
}

inline std::string numbered_statements(const std::vector<CitationContext>& contexts) {
    const std::vector<std::size_t> order = canonical_order(contexts);
    std::string out;
    std::size_t i = 1;
    for (std::size_t idx : order) {
        out += std::to_string(i++) + ". " + contexts[idx].text + "\n";
    }
    if (!out.empty()) out.pop_back();
    return out;
}

inline std::string polarity_word(SentimentLabel polarity) {
    return to_lower_ascii(to_string(polarity));
}

}  // namespace detail

// Summarizes one sentiment cluster from its citation statements. Remote
// generation by default; offline mode routes to the extractive fallback.
inline Summary summarize_cluster(const std::vector<CitationContext>& contexts,
                                 SentimentLabel polarity, const TargetPaper& target,
                                 const GenerationConfig& cfg, bool offline, const EmbedFn& embed,
                                 const PromptTemplates& templates = default_templates(),
                                 std::size_t fallback_sentences = 3) {
    if (contexts.empty()) {
        throw std::runtime_error(std::string("no statements for polarity ") + to_string(polarity));
    }
    Summary summary;
    summary.paper_id = target.id;
    summary.polarity = polarity;
    summary.source = SummarySource::Citations;

    if (offline) {
        summary.provider = SummaryProvider::ExtractiveFallback;
        summary.text = extractive_summary(contexts, fallback_sentences, embed);
    } else {
        summary.provider = SummaryProvider::RemoteLlm;
        const std::string prompt = render_prompt(
            templates.cluster, {{"paper_title", target.title},
                                {"polarity", detail::polarity_word(polarity)},
                                {"statements", detail::numbered_statements(contexts)}});
        summary.text = generate_text(prompt, cfg);
        if (trim(summary.text).empty()) {
            throw std::runtime_error("generation endpoint returned an empty summary");
        }
    }
    summary.cited_refs = detail::cited_refs_in(summary.text, contexts);
    return summary;
}

namespace detail {

// Split at whitespace near the chunk limit so words survive intact.
inline std::vector<std::string> chunk_text(const std::string& text, std::size_t max_chunk) {
    std::vector<std::string> chunks;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = std::min(text.size(), pos + max_chunk);
        if (end < text.size()) {
            std::size_t brk = end;
            while (brk > pos && !is_ascii_space(text[brk - 1])) --brk;
            if (brk > pos) end = brk;
        }
        chunks.push_back(text.substr(pos, end - pos));
        pos = end;
    }
    return chunks;
}

}  // namespace detail

// Two-level map-reduce over the target's full text: each chunk is summarized,
// then the chunk summaries are reduced into one. A single chunk needs no
// reduce call. There is no offline substitute for full papers.
inline Summary summarize_fulltext(const TargetPaper& target, SentimentLabel polarity,
                                  const GenerationConfig& cfg, bool offline,
                                  const PromptTemplates& templates = default_templates()) {
    if (!target.full_text || trim(*target.full_text).empty()) {
        throw std::runtime_error("target full text required");
    }
    if (offline) {
        throw std::runtime_error(
            "full-text summarization requires a generation endpoint; offline mode has no substitute");
    }
    Summary summary;
    summary.paper_id = target.id;
    summary.polarity = polarity;
    summary.source = SummarySource::FullText;
    summary.provider = SummaryProvider::RemoteLlm;

    const std::string polarity_word = detail::polarity_word(polarity);
    const std::vector<std::string> chunks = detail::chunk_text(*target.full_text, cfg.max_chunk);
    std::vector<std::string> partials;
    partials.reserve(chunks.size());
    for (const std::string& chunk : chunks) {
        const std::string prompt =
            render_prompt(templates.fulltext_chunk, {{"paper_title", target.title},
                                                     {"polarity", polarity_word},
                                                     {"full_text", chunk}});
        partials.push_back(generate_text(prompt, cfg));
    }
    if (partials.size() == 1) {
        summary.text = partials[0];
    } else {
        std::string joined;
        for (const std::string& p : partials) {
            if (!joined.empty()) joined += "\n\n";
            joined += p;
        }
        const std::string prompt =
            render_prompt(templates.fulltext_reduce, {{"paper_title", target.title},
                                                      {"polarity", polarity_word},
                                                      {"full_text", joined}});
        summary.text = generate_text(prompt, cfg);
    }
    if (trim(summary.text).empty()) {
        throw std::runtime_error("generation endpoint returned an empty summary");
    }
    return summary;
}

inline const char* to_string(SummarySource s) {
    return s == SummarySource::Citations ? "citations" : "full_text";
}

inline const char* to_string(SummaryProvider p) {
    return p == SummaryProvider::RemoteLlm ? "remote_llm" : "extractive_fallback";
}

}  // namespace secite

#endif  // SECITE_SUMMARIZE_HPP
