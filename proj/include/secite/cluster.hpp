#ifndef SECITE_CLUSTER_HPP
#define SECITE_CLUSTER_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "secite/embed.hpp"
#include "secite/textprep.hpp"
#include "secite/util.hpp"

namespace secite {

struct ClusterModel {
    std::size_t k = 0;
    std::vector<EmbeddingVector> centroids;
    std::vector<std::size_t> assignments;  // per point, in [0, k)
    double inertia = 0.0;
    std::uint64_t seed = 0;
    std::size_t iterations_run = 0;
    std::vector<double> inertia_trace;  // winning restart, one entry per assignment step
};

namespace detail {

inline double squared_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double d = a.values[i] - b.values[i];
        s += d * d;
    }
    return s;
}

inline void check_points(const std::vector<EmbeddingVector>& points, std::size_t k) {
    if (k < 2) throw std::invalid_argument("kmeans_fit: k must be >= 2");
    if (points.size() < k) {
        throw std::invalid_argument("kmeans_fit: need at least k points (" +
                                    std::to_string(points.size()) + " < " + std::to_string(k) + ")");
    }
    const std::size_t dim = points[0].dim();
    for (const auto& p : points) {
        if (p.dim() != dim) throw std::invalid_argument("kmeans_fit: mixed vector dimensions");
        if (!p.finite()) throw std::invalid_argument("kmeans_fit: non-finite input");
    }
}

// k-means++ seeding: each new centroid drawn with probability proportional to
// the squared distance from the nearest one already chosen.
inline std::vector<EmbeddingVector> kmeanspp_init(const std::vector<EmbeddingVector>& points,
                                                  std::size_t k, Rng& rng) {
    const std::size_t n = points.size();
    std::vector<EmbeddingVector> centroids;
    centroids.reserve(k);
    centroids.push_back(points[rng.next_index(n)]);

    std::vector<double> d2(n, 0.0);
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = squared_distance(points[i], centroids[0]);
            for (std::size_t j = 1; j < centroids.size(); ++j) {
                best = std::min(best, squared_distance(points[i], centroids[j]));
            }
            d2[i] = best;
            total += best;
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            const double r = rng.next_double() * total;
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= r) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.next_index(n);  // all points coincide with a centroid
        }
        centroids.push_back(points[pick]);
    }
    return centroids;
}

}  // namespace detail

// Lloyd iterations from k-means++ seeding. Empty clusters are repaired by
// reseeding with the point farthest from its current centroid; the restart
// with the lowest inertia wins. Deterministic for fixed (seed, restarts).
inline ClusterModel kmeans_fit(const std::vector<EmbeddingVector>& points, std::size_t k,
                               std::uint64_t seed = 42, std::size_t restarts = 10,
                               std::size_t max_iter = 300, double tol = 1e-6) {
    detail::check_points(points, k);
    const std::size_t n = points.size();
    const std::size_t dim = points[0].dim();

    Rng rng(seed);
    ClusterModel best;
    best.inertia = std::numeric_limits<double>::infinity();

    for (std::size_t restart = 0; restart < restarts; ++restart) {
        std::vector<EmbeddingVector> centroids = detail::kmeanspp_init(points, k, rng);
        std::vector<std::size_t> assignments(n, 0);
        std::vector<double> trace;
        std::size_t iterations = 0;

        auto assign_and_score = [&]() {
            double inertia = 0.0;
            std::vector<std::size_t> counts(k, 0);
            for (std::size_t i = 0; i < n; ++i) {
                std::size_t bc = 0;
                double bd = detail::squared_distance(points[i], centroids[0]);
                for (std::size_t c = 1; c < k; ++c) {
                    const double d = detail::squared_distance(points[i], centroids[c]);
                    if (d < bd) {
                        bd = d;
                        bc = c;
                    }
                }
                assignments[i] = bc;
                counts[bc]++;
            }
            // Repair empty clusters: move the point farthest from its centroid
            // (from a cluster that can spare one) into the empty slot.
            for (std::size_t c = 0; c < k; ++c) {
                if (counts[c] > 0) continue;
                double worst = -1.0;
                std::size_t worst_i = n;
                for (std::size_t i = 0; i < n; ++i) {
                    if (counts[assignments[i]] < 2) continue;
                    const double d = detail::squared_distance(points[i], centroids[assignments[i]]);
                    if (d > worst) {
                        worst = d;
                        worst_i = i;
                    }
                }
                if (worst_i == n) break;  // cannot repair (n == k edge)
                counts[assignments[worst_i]]--;
                assignments[worst_i] = c;
                counts[c] = 1;
                centroids[c] = points[worst_i];
            }
            for (std::size_t i = 0; i < n; ++i) {
                inertia += detail::squared_distance(points[i], centroids[assignments[i]]);
            }
            return inertia;
        };

        double inertia = assign_and_score();
        trace.push_back(inertia);

        for (std::size_t iter = 0; iter < max_iter; ++iter) {
            // Update step: centroid = mean of members.
            std::vector<EmbeddingVector> next(k);
            std::vector<std::size_t> counts(k, 0);
            for (auto& c : next) c.values.assign(dim, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                counts[assignments[i]]++;
                for (std::size_t d = 0; d < dim; ++d) {
                    next[assignments[i]].values[d] += points[i].values[d];
                }
            }
            double displacement = 0.0;
            for (std::size_t c = 0; c < k; ++c) {
                if (counts[c] == 0) continue;  // repaired on the next assignment
                for (std::size_t d = 0; d < dim; ++d) next[c].values[d] /= counts[c];
                displacement =
                    std::max(displacement, std::sqrt(detail::squared_distance(next[c], centroids[c])));
                centroids[c] = next[c];
            }
            inertia = assign_and_score();
            trace.push_back(inertia);
            ++iterations;
            if (displacement < tol) break;
        }

        if (inertia < best.inertia) {
            best.k = k;
            best.centroids = std::move(centroids);
            best.assignments = std::move(assignments);
            best.inertia = inertia;
            best.seed = seed;
            best.iterations_run = iterations;
            best.inertia_trace = std::move(trace);
        }
    }
    return best;
}

struct SilhouetteResult {
    std::vector<double> per_point;  // each in [-1, 1]
    double mean = 0.0;
};

// s(i) = (b(i) - a(i)) / max(a(i), b(i)) with a(i) the mean distance to the
// other members of i's cluster and b(i) the smallest mean distance to another
// cluster. Singletons and a=b=0 score 0.
inline SilhouetteResult silhouette(const std::vector<EmbeddingVector>& points,
                                   const std::vector<std::size_t>& assignments) {
    const std::size_t n = points.size();
    if (assignments.size() != n) {
        throw std::invalid_argument("silhouette: points/assignments size mismatch");
    }
    std::size_t k = 0;
    for (std::size_t a : assignments) k = std::max(k, a + 1);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t a : assignments) counts[a]++;
    std::size_t nonempty = 0;
    for (std::size_t c : counts) nonempty += (c > 0);
    if (nonempty < 2) throw std::invalid_argument("silhouette undefined for k=1");

    SilhouetteResult result;
    result.per_point.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (counts[assignments[i]] == 1) continue;  // singleton: s = 0
        std::vector<double> sum_to(k, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            sum_to[assignments[j]] += std::sqrt(detail::squared_distance(points[i], points[j]));
        }
        const double a = sum_to[assignments[i]] / static_cast<double>(counts[assignments[i]] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c == assignments[i] || counts[c] == 0) continue;
            b = std::min(b, sum_to[c] / static_cast<double>(counts[c]));
        }
        result.per_point[i] = (a == 0.0 && b == 0.0) ? 0.0 : (b - a) / std::max(a, b);
    }
    double total = 0.0;
    for (double s : result.per_point) total += s;
    result.mean = n > 0 ? total / static_cast<double>(n) : 0.0;
    return result;
}

enum class SentimentLabel { Positive, Neutral, Negative };

inline const char* to_string(SentimentLabel label) {
    switch (label) {
        case SentimentLabel::Positive: return "Positive";
        case SentimentLabel::Neutral: return "Neutral";
        case SentimentLabel::Negative: return "Negative";
    }
    return "Positive";
}

inline SentimentLabel sentiment_from_string(const std::string& s) {
    if (ieq(s, "positive")) return SentimentLabel::Positive;
    if (ieq(s, "neutral")) return SentimentLabel::Neutral;
    if (ieq(s, "negative")) return SentimentLabel::Negative;
    throw std::invalid_argument("unknown sentiment label: " + s);
}

struct PolarityLexicon {
    std::set<std::string> positive;
    std::set<std::string> negative;
};

// Default polarity word lists for naming clusters; the same lists ship as
// data/lexicon_positive.txt and data/lexicon_negative.txt.
inline const PolarityLexicon& default_lexicon() {
    static const PolarityLexicon kLexicon = {
        {
            "accurate",  "automates",   "automated",  "automatic",  "benefit",    "best",
            "boosts",    "capable",     "clear",      "compelling", "comprehensive",
            "consistent","contributes", "effective",  "effectively","efficient",  "efficiently",
            "elegant",   "enables",     "excellent",  "fast",       "faster",     "flexible",
            "general",   "good",        "helpful",    "improved",   "improves",   "innovative",
            "insightful","lightweight", "novel",      "outperforms","powerful",   "practical",
            "precise",   "promising",   "reliable",   "reliably",   "rigorous",   "robust",
            "scalable",  "seminal",     "significant","simple",     "sound",      "strong",
            "succeeds",  "successful",  "successfully","superior",  "supports",   "thorough",
            "useful",    "valuable",    "versatile",  "well",
        },
        {
            "bottleneck", "breaks",     "brittle",    "complicated", "costly",     "crashes",
            "cumbersome", "deficient",  "degrades",   "difficult",   "drawback",   "drawbacks",
            "error",      "errors",     "expensive",  "fails",       "failure",    "failures",
            "false",      "flawed",     "fragile",    "hard",        "imprecise",  "inaccurate",
            "incomplete", "inconsistent","ineffective","inefficient", "infeasible", "insufficient",
            "lacking",    "lacks",      "limitation", "limitations", "limited",    "limits",
            "misses",     "noisy",      "overhead",   "poor",        "poorly",     "problematic",
            "prohibitive","restricted", "restrictive","shortcoming", "shortcomings","slow",
            "slower",     "struggles",  "suboptimal", "suffers",     "unable",     "unreliable",
            "unsound",    "unstable",   "weak",       "weakness",    "worse",
        },
    };
    return kLexicon;
}

inline PolarityLexicon load_lexicon(const std::string& positive_path,
                                    const std::string& negative_path) {
    return PolarityLexicon{load_wordlist(positive_path), load_wordlist(negative_path)};
}

struct SentimentLabeling {
    std::map<std::size_t, SentimentLabel> label_of_cluster;
    std::map<std::size_t, double> cluster_polarity_score;
};

// Names clusters by lexicon scoring of their member statements: score =
// mean over members of (positive hits - negative hits) / max(1, tokens).
// Exact ties go to the lower cluster index with a warning.
inline SentimentLabeling label_clusters(const ClusterModel& model,
                                        const std::vector<CleanedStatement>& statements,
                                        const PolarityLexicon& lexicon = default_lexicon(),
                                        WarningLog* warnings = nullptr) {
    if (statements.size() != model.assignments.size()) {
        throw std::invalid_argument("label_clusters: statements/assignments size mismatch");
    }
    if (model.k != 2 && model.k != 3) {
        throw std::invalid_argument("label_clusters: sentiment labels defined for k=2 or k=3");
    }

    std::vector<double> score_sum(model.k, 0.0);
    std::vector<std::size_t> members(model.k, 0);
    for (std::size_t i = 0; i < statements.size(); ++i) {
        int hits = 0;
        for (const std::string& tok : statements[i].tokens) {
            if (lexicon.positive.count(tok)) ++hits;
            if (lexicon.negative.count(tok)) --hits;
        }
        const double denom = std::max<std::size_t>(1, statements[i].tokens.size());
        score_sum[model.assignments[i]] += hits / denom;
        members[model.assignments[i]]++;
    }

    SentimentLabeling labeling;
    std::vector<std::size_t> order(model.k);
    for (std::size_t c = 0; c < model.k; ++c) {
        order[c] = c;
        labeling.cluster_polarity_score[c] =
            members[c] > 0 ? score_sum[c] / static_cast<double>(members[c]) : 0.0;
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double sa = labeling.cluster_polarity_score[a];
        const double sb = labeling.cluster_polarity_score[b];
        if (sa != sb) return sa > sb;
        return a < b;  // tie: lower index takes the more positive label
    });
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        if (labeling.cluster_polarity_score[order[i]] == labeling.cluster_polarity_score[order[i + 1]]) {
            warn(warnings, "cluster polarity tie; lower cluster index labeled more positive");
            break;
        }
    }

    if (model.k == 2) {
        labeling.label_of_cluster[order[0]] = SentimentLabel::Positive;
        labeling.label_of_cluster[order[1]] = SentimentLabel::Negative;
    } else {
        labeling.label_of_cluster[order[0]] = SentimentLabel::Positive;
        labeling.label_of_cluster[order[1]] = SentimentLabel::Neutral;
        labeling.label_of_cluster[order[2]] = SentimentLabel::Negative;
    }
    return labeling;
}

struct ClusterCountComparison {
    std::map<std::size_t, double> mean_silhouette_by_k;
    std::size_t selected_k = 0;
    std::map<std::size_t, ClusterModel> models;
};

// Fits each candidate k, scores it with the mean silhouette, and selects the
// argmax (ties prefer the smaller k).
inline ClusterCountComparison compare_cluster_counts(const std::vector<EmbeddingVector>& points,
                                                     const std::vector<std::size_t>& ks,
                                                     std::uint64_t seed = 42,
                                                     std::size_t restarts = 10) {
    if (ks.empty()) throw std::invalid_argument("compare_cluster_counts: no k values");
    ClusterCountComparison cmp;
    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> sorted_ks = ks;
    std::sort(sorted_ks.begin(), sorted_ks.end());
    sorted_ks.erase(std::unique(sorted_ks.begin(), sorted_ks.end()), sorted_ks.end());
    for (std::size_t k : sorted_ks) {
        ClusterModel model = kmeans_fit(points, k, seed, restarts);
        const double mean = silhouette(points, model.assignments).mean;
        cmp.mean_silhouette_by_k[k] = mean;
        cmp.models[k] = std::move(model);
        if (mean > best) {  // strict: ties keep the smaller k (ks ascend)
            best = mean;
            cmp.selected_k = k;
        }
    }
    return cmp;
}

}  // namespace secite

#endif  // SECITE_CLUSTER_HPP
