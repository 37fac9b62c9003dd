#ifndef SECITE_TSNE_HPP
#define SECITE_TSNE_HPP

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "secite/embed.hpp"
#include "secite/util.hpp"

namespace secite {

struct TsneConfig {
    double perplexity = 0.0;  // <= 0 means the default min(30, (n-1)/3)
    std::size_t iterations = 1000;
    double early_exaggeration = 12.0;
    std::size_t exaggeration_iters = 250;
    double learning_rate = 200.0;
    double momentum_initial = 0.5;
    double momentum_final = 0.8;
    std::size_t momentum_switch_iter = 250;
    std::uint64_t seed = 42;
};

struct Projection2D {
    std::vector<std::array<double, 2>> points;
    double final_kl = 0.0;
    // KL(P||Q) per iteration once early exaggeration ends; non-increasing.
    std::vector<double> kl_trace;
};

namespace tsne_detail {

inline std::vector<double> pairwise_squared_distances(const std::vector<EmbeddingVector>& points) {
    const std::size_t n = points.size();
    std::vector<double> d2(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t d = 0; d < points[i].values.size(); ++d) {
                const double diff = points[i].values[d] - points[j].values[d];
                s += diff * diff;
            }
            d2[i * n + j] = s;
            d2[j * n + i] = s;
        }
    }
    return d2;
}

// Symmetric joint probabilities from Gaussian kernels whose per-point
// bandwidth is bisected until the conditional entropy matches
// log2(perplexity) within 1e-5 bits (at most 50 steps).
inline std::vector<double> joint_probabilities(const std::vector<EmbeddingVector>& points,
                                               double perplexity) {
    const std::size_t n = points.size();
    const std::vector<double> d2 = pairwise_squared_distances(points);
    const double target_entropy = std::log2(perplexity);
    std::vector<double> cond(n * n, 0.0);
    std::vector<double> e(n);

    for (std::size_t i = 0; i < n; ++i) {
        double beta = 1.0;
        double beta_min = -std::numeric_limits<double>::infinity();
        double beta_max = std::numeric_limits<double>::infinity();

        double dmin = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) dmin = std::min(dmin, d2[i * n + j]);
        }

        for (int step = 0; step < 50; ++step) {
            double sum = 0.0;
            double weighted = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) {
                    e[j] = 0.0;
                    continue;
                }
                const double shifted = d2[i * n + j] - dmin;
                e[j] = std::exp(-beta * shifted);
                sum += e[j];
                weighted += e[j] * shifted;
            }
            // entropy in bits of the normalized conditional distribution
            const double entropy = std::log2(sum) + beta * weighted / (sum * M_LN2);
            const double diff = entropy - target_entropy;
            if (std::abs(diff) < 1e-5) break;
            if (diff > 0.0) {
                beta_min = beta;
                beta = std::isinf(beta_max) ? beta * 2.0 : 0.5 * (beta + beta_max);
            } else {
                beta_max = beta;
                beta = std::isinf(beta_min) ? beta * 0.5 : 0.5 * (beta + beta_min);
            }
        }
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) sum += e[j];
        if (sum <= 0.0) {  // fully degenerate row: fall back to uniform
            for (std::size_t j = 0; j < n; ++j) cond[i * n + j] = (j == i) ? 0.0 : 1.0 / (n - 1);
        } else {
            for (std::size_t j = 0; j < n; ++j) cond[i * n + j] = e[j] / sum;
        }
    }

    std::vector<double> p(n * n, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            p[i * n + j] = (cond[i * n + j] + cond[j * n + i]) / (2.0 * n);
            total += p[i * n + j];
        }
    }
    // Floor then renormalize so KL(P||Q) stays a divergence of distributions.
    double floored_total = 0.0;
    for (std::size_t idx = 0; idx < p.size(); ++idx) {
        if (idx / n == idx % n) continue;
        p[idx] = std::max(p[idx] / total, 1e-12);
        floored_total += p[idx];
    }
    for (std::size_t idx = 0; idx < p.size(); ++idx) {
        if (idx / n != idx % n) p[idx] /= floored_total;
    }
    return p;
}

// Student-t kernel weights w_ij = 1/(1+||yi-yj||^2) and their total.
inline double student_weights(const std::vector<std::array<double, 2>>& y,
                              std::vector<double>& w) {
    const std::size_t n = y.size();
    w.assign(n * n, 0.0);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = y[i][0] - y[j][0];
            const double dy = y[i][1] - y[j][1];
            const double wij = 1.0 / (1.0 + dx * dx + dy * dy);
            w[i * n + j] = wij;
            w[j * n + i] = wij;
            z += 2.0 * wij;
        }
    }
    return z;
}

inline double kl_divergence(const std::vector<double>& p,
                            const std::vector<std::array<double, 2>>& y) {
    const std::size_t n = y.size();
    std::vector<double> w;
    const double z = student_weights(y, w);
    double kl = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double q = std::max(w[i * n + j] / z, 1e-12);
            kl += p[i * n + j] * std::log(p[i * n + j] / q);
        }
    }
    return kl;
}

// dKL/dy_i = 4 * sum_j (p_factor*P_ij - Q_ij) * w_ij * (y_i - y_j)
inline std::vector<std::array<double, 2>> kl_gradient(const std::vector<double>& p,
                                                      const std::vector<std::array<double, 2>>& y,
                                                      double p_factor = 1.0) {
    const std::size_t n = y.size();
    std::vector<double> w;
    const double z = student_weights(y, w);
    std::vector<std::array<double, 2>> grad(n, {0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
        double gx = 0.0, gy = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double wij = w[i * n + j];
            const double coeff = (p_factor * p[i * n + j] - wij / z) * wij;
            gx += coeff * (y[i][0] - y[j][0]);
            gy += coeff * (y[i][1] - y[j][1]);
        }
        grad[i][0] = 4.0 * gx;
        grad[i][1] = 4.0 * gy;
    }
    return grad;
}

}  // namespace tsne_detail

// Exact O(n^2) t-SNE to 2-D. Below n=4 the placement is deterministic (origin
// / unit-spaced collinear points) with a warning. After the exaggeration
// phase the optimizer rejects any step that would raise KL, zeroing the
// momentum and shrinking the step until KL is non-increasing.
inline Projection2D tsne_project(const std::vector<EmbeddingVector>& points,
                                 const TsneConfig& cfg = {}, WarningLog* warnings = nullptr) {
    Projection2D out;
    const std::size_t n = points.size();
    if (n == 0) return out;
    for (const auto& pt : points) {
        if (!pt.finite()) throw std::invalid_argument("tsne_project: non-finite input");
    }
    if (n < 4) {
        warn(warnings, "tsne_project: fewer than 4 points; using deterministic collinear placement");
        for (std::size_t i = 0; i < n; ++i) {
            out.points.push_back({static_cast<double>(i), 0.0});
        }
        return out;
    }
    if (cfg.iterations < 250) {
        throw std::invalid_argument("tsne_project: iterations must be >= 250");
    }
    const double perplexity =
        cfg.perplexity > 0.0 ? cfg.perplexity
                             : std::min(30.0, static_cast<double>(n - 1) / 3.0);
    if (perplexity >= static_cast<double>(n)) {
        throw std::invalid_argument("tsne_project: perplexity must be < n");
    }

    const std::vector<double> p = tsne_detail::joint_probabilities(points, perplexity);

    Rng rng(cfg.seed);
    std::vector<std::array<double, 2>> y(n);
    for (auto& yi : y) {
        yi[0] = 1e-4 * rng.next_gaussian();
        yi[1] = 1e-4 * rng.next_gaussian();
    }
    std::vector<std::array<double, 2>> velocity(n, {0.0, 0.0});

    double step_scale = 1.0;
    double kl_prev = 0.0;
    bool kl_tracked = false;

    for (std::size_t t = 0; t < cfg.iterations; ++t) {
        const bool exaggerating = t < cfg.exaggeration_iters;
        const double momentum =
            t < cfg.momentum_switch_iter ? cfg.momentum_initial : cfg.momentum_final;
        const double p_factor = exaggerating ? cfg.early_exaggeration : 1.0;
        const auto grad = tsne_detail::kl_gradient(p, y, p_factor);

        if (exaggerating) {
            for (std::size_t i = 0; i < n; ++i) {
                velocity[i][0] = momentum * velocity[i][0] - cfg.learning_rate * grad[i][0];
                velocity[i][1] = momentum * velocity[i][1] - cfg.learning_rate * grad[i][1];
                y[i][0] += velocity[i][0];
                y[i][1] += velocity[i][1];
            }
            continue;
        }

        if (!kl_tracked) {
            kl_prev = tsne_detail::kl_divergence(p, y);
            kl_tracked = true;
            out.kl_trace.push_back(kl_prev);
        }
        std::vector<std::array<double, 2>> vel_try = velocity;
        std::vector<std::array<double, 2>> y_try(n);
        double mom_try = momentum;
        bool accepted = false;
        for (int attempt = 0; attempt < 40; ++attempt) {
            for (std::size_t i = 0; i < n; ++i) {
                vel_try[i][0] = mom_try * vel_try[i][0] - cfg.learning_rate * step_scale * grad[i][0];
                vel_try[i][1] = mom_try * vel_try[i][1] - cfg.learning_rate * step_scale * grad[i][1];
                y_try[i][0] = y[i][0] + vel_try[i][0];
                y_try[i][1] = y[i][1] + vel_try[i][1];
            }
            const double kl_new = tsne_detail::kl_divergence(p, y_try);
            if (kl_new <= kl_prev + 1e-9) {
                y = y_try;
                velocity = vel_try;
                kl_prev = kl_new;
                step_scale = std::min(1.0, step_scale * 1.2);
                accepted = true;
                break;
            }
            // Overshoot: drop the momentum, halve the step, retry.
            vel_try.assign(n, {0.0, 0.0});
            mom_try = 0.0;
            step_scale *= 0.5;
            if (step_scale < 1e-18) break;
        }
        if (!accepted) {
            velocity.assign(n, {0.0, 0.0});  // stay put this iteration
        }
        out.kl_trace.push_back(kl_prev);
    }

    out.points = std::move(y);
    out.final_kl = tsne_detail::kl_divergence(p, out.points);
    return out;
}

}  // namespace secite

#endif  // SECITE_TSNE_HPP
