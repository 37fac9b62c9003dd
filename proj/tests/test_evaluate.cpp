#include <catch_amalgamated.hpp>

#include "secite/evaluate.hpp"
#include "support.hpp"

using namespace secite;

namespace {

EmbedFn fallback_embed() {
    EmbeddingProviderConfig cfg;
    cfg.kind = ProviderKind::HashedFallback;
    cfg.dim = 256;
    return make_embed_fn(cfg);
}

Summary summary_of(std::string text, SentimentLabel polarity = SentimentLabel::Positive,
                   SummarySource source = SummarySource::Citations) {
    Summary s;
    s.paper_id = "p";
    s.polarity = polarity;
    s.source = source;
    s.text = std::move(text);
    return s;
}

}  // namespace

TEST_CASE("semantic_similarity of identical texts is 1") {
    const auto a = summary_of("The framework reproduces races reliably.");
    const auto b = summary_of("The framework reproduces races reliably.");
    CHECK(semantic_similarity(a, b, fallback_embed()) == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("semantic_similarity rejects empty summaries") {
    const auto a = summary_of("text");
    const auto empty = summary_of("   ");
    CHECK_THROWS_WITH(semantic_similarity(a, empty, fallback_embed()),
                      Catch::Matchers::ContainsSubstring("empty summary"));
}

TEST_CASE("semantic_similarity is symmetric and bounded") {
    Rng rng(40);
    const std::string words[] = {"replay", "race", "overhead", "robust", "limited", "kernel"};
    const EmbedFn embed = fallback_embed();
    for (int trial = 0; trial < 30; ++trial) {
        std::string ta, tb;
        for (int w = 0; w < 5; ++w) {
            ta += words[rng.next_index(6)] + " ";
            tb += words[rng.next_index(6)] + " ";
        }
        const auto a = summary_of(ta);
        const auto b = summary_of(tb);
        const double ab = semantic_similarity(a, b, embed);
        CHECK(ab == semantic_similarity(b, a, embed));
        CHECK(ab >= -1.0 - 1e-12);
        CHECK(ab <= 1.0 + 1e-12);
    }
}

namespace {

EvaluationReport sample_report() {
    ClusteringSection clustering;
    clustering.silhouette_by_k = {{2, 0.1516}, {3, 0.1381}};
    clustering.selected_k = 2;
    LabelingSection labeling;
    labeling.members_by_label = {{"Positive", 5}, {"Negative", 4}};
    return build_report("rrf", 9, 7, 9, 1, clustering, labeling,
                        std::map<std::string, double>{{"Positive", 0.63}, {"Negative", 0.71}},
                        {{"contexts_json", "/tmp/out/contexts.json"}}, "2026-01-01T00:00:00Z",
                        "2026-01-01T00:00:05Z", {"one warning"});
}

}  // namespace

TEST_CASE("build_report derives success_rate and mean similarity") {
    const EvaluationReport report = sample_report();
    CHECK(report.extraction.success_rate == Catch::Approx(7.0 / 9.0).margin(1e-12));
    CHECK(format_double(report.extraction.success_rate, 3) == "0.778");
    REQUIRE(report.similarity.has_value());
    CHECK(report.similarity->mean == Catch::Approx(0.67).margin(1e-12));

    const EvaluationReport empty = build_report("p", 0, 0, 0, 0, std::nullopt, std::nullopt,
                                                std::nullopt, {}, "t0", "t1", {});
    CHECK(empty.extraction.success_rate == 0.0);
    CHECK_FALSE(empty.similarity.has_value());
}

TEST_CASE("report JSON round-trips field for field") {
    const EvaluationReport report = sample_report();
    const auto j = report_to_json(report);
    const EvaluationReport parsed = report_from_json(j);
    CHECK(parsed == report);
    // serialization itself is stable
    CHECK(report_to_json(parsed).dump() == j.dump());
}

TEST_CASE("report JSON round-trips with absent sections") {
    const EvaluationReport report = build_report("p", 3, 3, 0, 0, std::nullopt, std::nullopt,
                                                 std::nullopt, {}, "a", "b", {});
    const EvaluationReport parsed = report_from_json(report_to_json(report));
    CHECK(parsed == report);
    CHECK_FALSE(parsed.clustering.has_value());
    CHECK_FALSE(parsed.similarity.has_value());
}

TEST_CASE("markdown report contains the comparison tables") {
    const std::string md = report_to_markdown(sample_report());
    CHECK(md.find("| 2 | 0.1516 |") != std::string::npos);
    CHECK(md.find("| 3 | 0.1381 |") != std::string::npos);
    CHECK(md.find("Selected k: 2") != std::string::npos);
    CHECK(md.find("| Positive | 0.6300 |") != std::string::npos);
    CHECK(md.find("| mean | 0.6700 |") != std::string::npos);
    CHECK(md.find("| success rate | 0.778 |") != std::string::npos);
    CHECK(md.find("Manual evaluation") != std::string::npos);
    CHECK(md.find("conceptual correctness") != std::string::npos);
}

TEST_CASE("markdown report renders missing stages as not run") {
    const EvaluationReport report = build_report("p", 2, 2, 0, 0, std::nullopt, std::nullopt,
                                                 std::nullopt, {}, "a", "b", {});
    const std::string md = report_to_markdown(report);
    CHECK(md.find("## Clustering\n\nnot run") != std::string::npos);
    CHECK(md.find("## Summary similarity\n\nnot run") != std::string::npos);
}
