#include <catch_amalgamated.hpp>

#include "secite/cluster.hpp"
#include "support.hpp"

using namespace secite;

namespace {

std::vector<EmbeddingVector> one_d(std::initializer_list<double> values) {
    std::vector<EmbeddingVector> out;
    for (double v : values) out.push_back({{v}});
    return out;
}

// Independent oracle: the naive per-point, per-cluster mean-distance formula.
std::vector<double> silhouette_oracle(const std::vector<EmbeddingVector>& points,
                                      const std::vector<std::size_t>& assignments) {
    const std::size_t n = points.size();
    auto dist = [&](std::size_t i, std::size_t j) {
        double s = 0.0;
        for (std::size_t d = 0; d < points[i].values.size(); ++d) {
            const double diff = points[i].values[d] - points[j].values[d];
            s += diff * diff;
        }
        return std::sqrt(s);
    };
    std::size_t k = 0;
    for (std::size_t a : assignments) k = std::max(k, a + 1);
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> total(k, 0.0);
        std::vector<std::size_t> count(k, 0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            total[assignments[j]] += dist(i, j);
            count[assignments[j]]++;
        }
        const std::size_t own = assignments[i];
        if (count[own] == 0) continue;  // singleton
        const double a = total[own] / static_cast<double>(count[own]);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c == own || count[c] == 0) continue;
            b = std::min(b, total[c] / static_cast<double>(count[c]));
        }
        out[i] = (a == 0.0 && b == 0.0) ? 0.0 : (b - a) / std::max(a, b);
    }
    return out;
}

}  // namespace

TEST_CASE("kmeans_fit separates two obvious groups exactly") {
    const auto points = one_d({0, 0, 0, 10, 10, 10});
    const auto model = kmeans_fit(points, 2);
    CHECK(model.inertia == 0.0);
    CHECK(model.assignments[0] == model.assignments[1]);
    CHECK(model.assignments[1] == model.assignments[2]);
    CHECK(model.assignments[3] == model.assignments[4]);
    CHECK(model.assignments[4] == model.assignments[5]);
    CHECK(model.assignments[0] != model.assignments[3]);
    const std::set<double> centroids = {model.centroids[0].values[0], model.centroids[1].values[0]};
    CHECK(centroids == std::set<double>{0.0, 10.0});
}

TEST_CASE("kmeans_fit inertia trace is non-increasing") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
        const auto points = testsupport::gaussian_points(40, 4, seed);
        const auto model = kmeans_fit(points, 3, 42);
        REQUIRE(model.inertia_trace.size() >= 2);
        for (std::size_t i = 1; i < model.inertia_trace.size(); ++i) {
            CHECK(model.inertia_trace[i] <= model.inertia_trace[i - 1] + 1e-9);
        }
        CHECK(model.inertia == model.inertia_trace.back());
    }
}

TEST_CASE("kmeans_fit is deterministic for a fixed seed") {
    const auto points = testsupport::gaussian_points(30, 5, 7);
    const auto a = kmeans_fit(points, 2, 42);
    const auto b = kmeans_fit(points, 2, 42);
    CHECK(a.assignments == b.assignments);
    CHECK(a.inertia == b.inertia);  // bitwise
    for (std::size_t c = 0; c < a.centroids.size(); ++c) {
        CHECK(a.centroids[c].values == b.centroids[c].values);
    }
}

TEST_CASE("kmeans_fit validates its inputs") {
    CHECK_THROWS_WITH(kmeans_fit(one_d({1.0}), 2),
                      Catch::Matchers::ContainsSubstring("at least k points"));
    std::vector<EmbeddingVector> mixed = {{{1.0, 2.0}}, {{1.0}}, {{2.0}}};
    CHECK_THROWS_WITH(kmeans_fit(mixed, 2), Catch::Matchers::ContainsSubstring("mixed"));
    CHECK_THROWS(kmeans_fit(one_d({1, 2, 3}), 1));
}

TEST_CASE("kmeans_fit every cluster keeps at least one member") {
    // Heavy duplication invites empty clusters from coincident seeding.
    std::vector<EmbeddingVector> points;
    for (int i = 0; i < 12; ++i) points.push_back({{1.0, 1.0}});
    points.push_back({{5.0, 5.0}});
    points.push_back({{9.0, 9.0}});
    const auto model = kmeans_fit(points, 3, 42);
    std::vector<std::size_t> counts(3, 0);
    for (std::size_t a : model.assignments) counts[a]++;
    for (std::size_t c = 0; c < 3; ++c) CHECK(counts[c] >= 1);
    // recomputed inertia agrees with the stored value
    double recomputed = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t d = 0; d < 2; ++d) {
            const double diff =
                points[i].values[d] - model.centroids[model.assignments[i]].values[d];
            recomputed += diff * diff;
        }
    }
    CHECK(recomputed == Catch::Approx(model.inertia).epsilon(1e-9));
}

TEST_CASE("kmeans_fit with n == k makes every point a centroid") {
    const auto points = one_d({1, 5, 9});
    const auto model = kmeans_fit(points, 3, 42);
    CHECK(model.inertia == 0.0);
    std::set<std::size_t> used(model.assignments.begin(), model.assignments.end());
    CHECK(used.size() == 3);
}

TEST_CASE("silhouette extremes") {
    const std::vector<EmbeddingVector> separated = {{{0, 0}}, {{0, 0}}, {{10, 10}}, {{10, 10}}};
    const auto high = silhouette(separated, {0, 0, 1, 1});
    for (double s : high.per_point) CHECK(s == 1.0);
    CHECK(high.mean == 1.0);

    const std::vector<EmbeddingVector> identical(6, EmbeddingVector{{3.0, 3.0}});
    const auto flat = silhouette(identical, {0, 0, 0, 1, 1, 1});
    for (double s : flat.per_point) CHECK(s == 0.0);
    CHECK(flat.mean == 0.0);
}

TEST_CASE("silhouette handles singletons and rejects a single cluster") {
    const std::vector<EmbeddingVector> points = {{{0.0}}, {{1.0}}, {{5.0}}};
    const auto result = silhouette(points, {0, 0, 1});
    CHECK(result.per_point[2] == 0.0);  // singleton convention

    CHECK_THROWS_WITH(silhouette(points, {0, 0, 0}),
                      Catch::Matchers::ContainsSubstring("silhouette undefined for k=1"));
}

TEST_CASE("silhouette matches the direct O(n^2) oracle on random instances") {
    Rng rng(91);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t k = 2 + trial % 2;
        const auto points = testsupport::gaussian_points(30, 5, 1000 + trial);
        std::vector<std::size_t> assignments(30);
        for (std::size_t i = 0; i < 30; ++i) {
            assignments[i] = i < k ? i : rng.next_index(k);  // every cluster non-empty
        }
        const auto result = silhouette(points, assignments);
        const auto expected = silhouette_oracle(points, assignments);
        for (std::size_t i = 0; i < 30; ++i) {
            CHECK(result.per_point[i] == Catch::Approx(expected[i]).margin(1e-9));
            CHECK(std::abs(result.per_point[i]) <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("silhouette mean is invariant under cluster relabeling") {
    const auto points = testsupport::gaussian_points(20, 3, 55);
    std::vector<std::size_t> assignments(20);
    for (std::size_t i = 0; i < 20; ++i) assignments[i] = i % 3;
    const double mean = silhouette(points, assignments).mean;
    std::vector<std::size_t> permuted = assignments;
    for (auto& a : permuted) a = (a + 1) % 3;  // 0->1, 1->2, 2->0
    CHECK(silhouette(points, permuted).mean == Catch::Approx(mean).margin(1e-12));
}

TEST_CASE("silhouette is scale-invariant") {
    const auto points = testsupport::gaussian_points(24, 4, 66);
    std::vector<std::size_t> assignments(24);
    for (std::size_t i = 0; i < 24; ++i) assignments[i] = i % 2;
    const double mean = silhouette(points, assignments).mean;
    auto scaled = points;
    for (auto& p : scaled) {
        for (double& v : p.values) v *= 37.5;
    }
    CHECK(silhouette(scaled, assignments).mean == Catch::Approx(mean).margin(1e-9));
}

namespace {

std::vector<CleanedStatement> statements_from(const std::vector<std::string>& texts) {
    std::vector<CleanedStatement> out;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        out.push_back(make_cleaned_statement("d", i, texts[i], default_stopwords()));
    }
    return out;
}

}  // namespace

TEST_CASE("label_clusters names clusters via lexicon polarity") {
    ClusterModel model;
    model.k = 2;
    model.assignments = {0, 0, 1, 1};
    const auto statements = statements_from({
        "The tool is effective and outperforms baselines.",
        "A robust and efficient design.",
        "Evaluation is limited and incurs overhead.",
        "The approach fails under load.",
    });
    const auto labeling = label_clusters(model, statements);
    CHECK(labeling.label_of_cluster.at(0) == SentimentLabel::Positive);
    CHECK(labeling.label_of_cluster.at(1) == SentimentLabel::Negative);
    CHECK(labeling.cluster_polarity_score.at(0) > labeling.cluster_polarity_score.at(1));
}

TEST_CASE("label_clusters breaks exact ties toward the lower index with a warning") {
    ClusterModel model;
    model.k = 2;
    model.assignments = {0, 1};
    const auto statements = statements_from({"plain words only", "plain words only"});
    WarningLog log;
    const auto labeling = label_clusters(model, statements, default_lexicon(), &log);
    CHECK(labeling.label_of_cluster.at(0) == SentimentLabel::Positive);
    CHECK(labeling.label_of_cluster.at(1) == SentimentLabel::Negative);
    REQUIRE(log.items.size() == 1);
    CHECK(log.items[0].find("tie") != std::string::npos);
}

TEST_CASE("label_clusters with k=3 orders Positive, Neutral, Negative") {
    ClusterModel model;
    model.k = 3;
    model.assignments = {0, 1, 2};
    const auto statements = statements_from({
        "limited overhead fails",            // strongly negative
        "effective robust outperforms",      // strongly positive
        "describes the experimental setup",  // neutral
    });
    const auto labeling = label_clusters(model, statements);
    CHECK(labeling.label_of_cluster.at(1) == SentimentLabel::Positive);
    CHECK(labeling.label_of_cluster.at(2) == SentimentLabel::Neutral);
    CHECK(labeling.label_of_cluster.at(0) == SentimentLabel::Negative);
    // bijection onto the 3-label set
    std::set<SentimentLabel> seen;
    for (const auto& [_, label] : labeling.label_of_cluster) seen.insert(label);
    CHECK(seen.size() == 3);
}

TEST_CASE("label_clusters is a bijection on random inputs (property)") {
    Rng rng(123);
    const std::vector<std::string> vocab = {"effective", "limited", "overhead", "robust",
                                            "plain",     "fails",   "useful",   "setup"};
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t k = 2 + rng.next_index(2);
        const std::size_t n = k + rng.next_index(10);
        ClusterModel model;
        model.k = k;
        std::vector<std::string> texts;
        for (std::size_t i = 0; i < n; ++i) {
            model.assignments.push_back(i < k ? i : rng.next_index(k));
            std::string text;
            for (int w = 0; w < 4; ++w) text += vocab[rng.next_index(vocab.size())] + " ";
            texts.push_back(text);
        }
        const auto labeling = label_clusters(model, statements_from(texts));
        std::set<SentimentLabel> seen;
        for (const auto& [_, label] : labeling.label_of_cluster) seen.insert(label);
        REQUIRE(labeling.label_of_cluster.size() == k);
        REQUIRE(seen.size() == k);
    }
}

TEST_CASE("label_clusters rejects unsupported k") {
    ClusterModel model;
    model.k = 4;
    model.assignments = {0, 1, 2, 3};
    CHECK_THROWS(label_clusters(model, statements_from({"a", "b", "c", "d"})));
}

TEST_CASE("compare_cluster_counts prefers two clusters on two blobs") {
    std::vector<EmbeddingVector> points;
    for (const auto& text : testsupport::two_blob_statements(30)) {
        points.push_back(hashed_fallback_embed(text, 512));
    }
    const auto cmp = compare_cluster_counts(points, {2, 3}, 42);
    CHECK(cmp.mean_silhouette_by_k.at(2) > cmp.mean_silhouette_by_k.at(3));
    CHECK(cmp.selected_k == 2);
}

TEST_CASE("compare_cluster_counts with one candidate selects it") {
    const auto points = testsupport::gaussian_points(10, 3, 2);
    const auto cmp = compare_cluster_counts(points, {2}, 42);
    CHECK(cmp.selected_k == 2);
    CHECK(cmp.mean_silhouette_by_k.size() == 1);
}

TEST_CASE("scaling all points leaves assignments and the selected k unchanged") {
    std::vector<EmbeddingVector> points;
    for (const auto& text : testsupport::two_blob_statements(15)) {
        points.push_back(hashed_fallback_embed(text, 256));
    }
    const auto base = compare_cluster_counts(points, {2, 3}, 42);
    auto scaled = points;
    for (auto& p : scaled) {
        for (double& v : p.values) v *= 4.0;
    }
    const auto after = compare_cluster_counts(scaled, {2, 3}, 42);
    CHECK(after.selected_k == base.selected_k);
    CHECK(after.models.at(2).assignments == base.models.at(2).assignments);
}

TEST_CASE("bundled lexicon files match the built-in lists") {
    const auto lex = load_lexicon(testsupport::data_path("lexicon_positive.txt"),
                                  testsupport::data_path("lexicon_negative.txt"));
    CHECK(lex.positive == default_lexicon().positive);
    CHECK(lex.negative == default_lexicon().negative);
}
