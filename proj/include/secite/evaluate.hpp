#ifndef SECITE_EVALUATE_HPP
#define SECITE_EVALUATE_HPP

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "secite/embed.hpp"
#include "secite/summarize.hpp"
#include "secite/util.hpp"

namespace secite {

// Cosine similarity between the embeddings of two summaries, both produced by
// the active provider so scores are comparable across the run.
inline double semantic_similarity(const Summary& a, const Summary& b, const EmbedFn& embed,
                                  WarningLog* warnings = nullptr) {
    if (trim(a.text).empty() || trim(b.text).empty()) {
        throw std::invalid_argument("empty summary");
    }
    const std::vector<EmbeddingVector> vectors = embed({a.text, b.text});
    if (vectors.size() != 2) throw std::runtime_error("semantic_similarity: embedding count mismatch");
    return cosine_similarity(vectors[0], vectors[1], warnings);
}

struct ExtractionStats {
    std::size_t documents_total = 0;
    std::size_t documents_parsed = 0;
    std::size_t contexts_found = 0;
    std::size_t dedup_count = 0;
    double success_rate = 0.0;  // documents_parsed / documents_total, 0 when empty

    bool operator==(const ExtractionStats&) const = default;
};

struct ClusteringSection {
    std::map<std::size_t, double> silhouette_by_k;
    std::size_t selected_k = 0;

    bool operator==(const ClusteringSection&) const = default;
};

struct LabelingSection {
    std::map<std::string, std::size_t> members_by_label;  // label name -> member count

    bool operator==(const LabelingSection&) const = default;
};

struct SimilaritySection {
    std::map<std::string, double> by_polarity;  // "Positive"/"Negative" -> score
    double mean = 0.0;

    bool operator==(const SimilaritySection&) const = default;
};

struct EvaluationReport {
    std::string paper_id;
    ExtractionStats extraction;
    std::optional<ClusteringSection> clustering;  // absent = not run
    std::optional<LabelingSection> labeling;
    std::optional<SimilaritySection> similarity;
    std::map<std::string, std::string> artifacts;  // name -> path
    std::string started_at;   // ISO 8601 UTC
    std::string finished_at;
    std::vector<std::string> warnings;

    bool operator==(const EvaluationReport&) const = default;
};

// Assembles the report, deriving success_rate and the mean similarity so the
// stored fields cannot drift from their inputs.
inline EvaluationReport build_report(std::string paper_id, std::size_t documents_total,
                                     std::size_t documents_parsed, std::size_t contexts_found,
                                     std::size_t dedup_count,
                                     std::optional<ClusteringSection> clustering,
                                     std::optional<LabelingSection> labeling,
                                     std::optional<std::map<std::string, double>> similarity_by_polarity,
                                     std::map<std::string, std::string> artifacts,
                                     std::string started_at, std::string finished_at,
                                     std::vector<std::string> warnings) {
    EvaluationReport report;
    report.paper_id = std::move(paper_id);
    report.extraction.documents_total = documents_total;
    report.extraction.documents_parsed = documents_parsed;
    report.extraction.contexts_found = contexts_found;
    report.extraction.dedup_count = dedup_count;
    report.extraction.success_rate =
        documents_total == 0
            ? 0.0
            : static_cast<double>(documents_parsed) / static_cast<double>(documents_total);
    report.clustering = std::move(clustering);
    report.labeling = std::move(labeling);
    if (similarity_by_polarity && !similarity_by_polarity->empty()) {
        SimilaritySection sim;
        sim.by_polarity = std::move(*similarity_by_polarity);
        double total = 0.0;
        for (const auto& [_, v] : sim.by_polarity) total += v;
        sim.mean = total / static_cast<double>(sim.by_polarity.size());
        report.similarity = std::move(sim);
    }
    report.artifacts = std::move(artifacts);
    report.started_at = std::move(started_at);
    report.finished_at = std::move(finished_at);
    report.warnings = std::move(warnings);
    return report;
}

inline nlohmann::ordered_json report_to_json(const EvaluationReport& report) {
    nlohmann::ordered_json j;
    j["schema"] = "secite.report/1";
    j["paper_id"] = report.paper_id;
    j["extraction"] = {
        {"documents_total", report.extraction.documents_total},
        {"documents_parsed", report.extraction.documents_parsed},
        {"contexts_found", report.extraction.contexts_found},
        {"dedup_count", report.extraction.dedup_count},
        {"success_rate", report.extraction.success_rate},
    };
    if (report.clustering) {
        nlohmann::ordered_json by_k = nlohmann::ordered_json::object();
        for (const auto& [k, s] : report.clustering->silhouette_by_k) {
            by_k[std::to_string(k)] = s;
        }
        j["clustering"] = {{"silhouette_by_k", by_k}, {"selected_k", report.clustering->selected_k}};
    } else {
        j["clustering"] = nullptr;
    }
    if (report.labeling) {
        nlohmann::ordered_json labels = nlohmann::ordered_json::object();
        for (const auto& [name, count] : report.labeling->members_by_label) labels[name] = count;
        j["labeling"] = {{"members_by_label", labels}};
    } else {
        j["labeling"] = nullptr;
    }
    if (report.similarity) {
        nlohmann::ordered_json by_pol = nlohmann::ordered_json::object();
        for (const auto& [name, v] : report.similarity->by_polarity) by_pol[name] = v;
        j["similarity"] = {{"by_polarity", by_pol}, {"mean", report.similarity->mean}};
    } else {
        j["similarity"] = nullptr;
    }
    nlohmann::ordered_json artifacts = nlohmann::ordered_json::object();
    for (const auto& [name, path] : report.artifacts) artifacts[name] = path;
    j["artifacts"] = artifacts;
    j["timestamps"] = {{"started", report.started_at}, {"finished", report.finished_at}};
    j["warnings"] = report.warnings;
    return j;
}

inline EvaluationReport report_from_json(const nlohmann::ordered_json& j) {
    EvaluationReport report;
    report.paper_id = j.at("paper_id").get<std::string>();
    const auto& ex = j.at("extraction");
    report.extraction.documents_total = ex.at("documents_total").get<std::size_t>();
    report.extraction.documents_parsed = ex.at("documents_parsed").get<std::size_t>();
    report.extraction.contexts_found = ex.at("contexts_found").get<std::size_t>();
    report.extraction.dedup_count = ex.at("dedup_count").get<std::size_t>();
    report.extraction.success_rate = ex.at("success_rate").get<double>();
    if (!j.at("clustering").is_null()) {
        ClusteringSection c;
        for (const auto& [k, s] : j.at("clustering").at("silhouette_by_k").items()) {
            c.silhouette_by_k[std::stoul(k)] = s.get<double>();
        }
        c.selected_k = j.at("clustering").at("selected_k").get<std::size_t>();
        report.clustering = std::move(c);
    }
    if (!j.at("labeling").is_null()) {
        LabelingSection l;
        for (const auto& [name, count] : j.at("labeling").at("members_by_label").items()) {
            l.members_by_label[name] = count.get<std::size_t>();
        }
        report.labeling = std::move(l);
    }
    if (!j.at("similarity").is_null()) {
        SimilaritySection s;
        for (const auto& [name, v] : j.at("similarity").at("by_polarity").items()) {
            s.by_polarity[name] = v.get<double>();
        }
        s.mean = j.at("similarity").at("mean").get<double>();
        report.similarity = std::move(s);
    }
    for (const auto& [name, path] : j.at("artifacts").items()) {
        report.artifacts[name] = path.get<std::string>();
    }
    report.started_at = j.at("timestamps").at("started").get<std::string>();
    report.finished_at = j.at("timestamps").at("finished").get<std::string>();
    for (const auto& w : j.at("warnings")) report.warnings.push_back(w.get<std::string>());
    return report;
}

inline std::string report_to_markdown(const EvaluationReport& report) {
    std::ostringstream md;
    md << "# SECite report: " << report.paper_id << "\n\n";

    md << "## Extraction\n\n"
       << "| metric | value |\n|---|---|\n"
       << "| documents total | " << report.extraction.documents_total << " |\n"
       << "| documents parsed | " << report.extraction.documents_parsed << " |\n"
       << "| contexts found | " << report.extraction.contexts_found << " |\n"
       << "| duplicates removed | " << report.extraction.dedup_count << " |\n"
       << "| success rate | " << format_double(report.extraction.success_rate, 3) << " |\n\n";

    md << "## Clustering\n\n";
    if (report.clustering) {
        md << "| k | mean silhouette |\n|---|---|\n";
        for (const auto& [k, s] : report.clustering->silhouette_by_k) {
            md << "| " << k << " | " << format_double(s, 4) << " |\n";
        }
        md << "\nSelected k: " << report.clustering->selected_k << "\n\n";
    } else {
        md << "not run\n\n";
    }

    md << "## Labeling\n\n";
    if (report.labeling) {
        md << "| label | statements |\n|---|---|\n";
        for (const auto& [name, count] : report.labeling->members_by_label) {
            md << "| " << name << " | " << count << " |\n";
        }
        md << "\n";
    } else {
        md << "not run\n\n";
    }

    md << "## Summary similarity\n\n";
    if (report.similarity) {
        md << "| polarity | similarity |\n|---|---|\n";
        for (const auto& [name, v] : report.similarity->by_polarity) {
            md << "| " << name << " | " << format_double(v, 4) << " |\n";
        }
        md << "| mean | " << format_double(report.similarity->mean, 4) << " |\n\n";
    } else {
        md << "not run\n\n";
    }

    md << "## Artifacts\n\n";
    if (report.artifacts.empty()) {
        md << "none\n\n";
    } else {
        for (const auto& [name, path] : report.artifacts) {
            md << "- " << name << ": `" << path << "`\n";
        }
        md << "\n";
    }

    // Hand-filled rubric; the tool never scores these itself.
    md << "## Manual evaluation (optional)\n\n"
       << "Fill in after reading the summaries. Scores are 1-5.\n\n"
       << "| summary | conceptual correctness | factual correctness | informativeness |\n"
       << "|---|---|---|---|\n"
       << "| positive (citations) |  |  |  |\n"
       << "| negative (citations) |  |  |  |\n"
       << "| positive (full text) |  |  |  |\n"
       << "| negative (full text) |  |  |  |\n\n";

    if (!report.warnings.empty()) {
        md << "## Warnings\n\n";
        for (const auto& w : report.warnings) md << "- " << w << "\n";
        md << "\n";
    }

    md << "Run: " << report.started_at << " to " << report.finished_at << "\n";
    return md.str();
}

}  // namespace secite

#endif  // SECITE_EVALUATE_HPP
