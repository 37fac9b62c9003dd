#ifndef SECITE_EMBED_HPP
#define SECITE_EMBED_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "secite/http_json.hpp"
#include "secite/util.hpp"

namespace secite {

struct EmbeddingVector {
    std::vector<double> values;

    std::size_t dim() const { return values.size(); }
    double norm() const {
        double s = 0.0;
        for (double v : values) s += v * v;
        return std::sqrt(s);
    }
    bool finite() const {
        for (double v : values) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }
};

// Violations of the embedding wire contract (count/dim mismatches, non-finite
// values, exhausted retries). Fatal: downstream stages cannot mix providers.
struct EmbeddingError : std::runtime_error {
    explicit EmbeddingError(const std::string& what) : std::runtime_error(what) {}
};

enum class ProviderKind { Remote, HashedFallback };

struct EmbeddingProviderConfig {
    ProviderKind kind = ProviderKind::HashedFallback;
    std::string base_url;                       // required for Remote
    std::string auth_env_var = "SECITE_EMBED_TOKEN";
    std::size_t dim = 512;                      // used by the fallback
    std::size_t batch_size = 32;
    std::chrono::milliseconds timeout{10000};
    int max_retries = 3;
    std::chrono::milliseconds backoff{250};

    void validate() const {
        if (kind == ProviderKind::Remote && base_url.empty()) {
            throw std::invalid_argument("remote embedding provider requires base_url");
        }
        if (kind == ProviderKind::HashedFallback && dim < 2) {
            throw std::invalid_argument("hashed fallback requires dim >= 2");
        }
        if (batch_size == 0) throw std::invalid_argument("batch_size must be positive");
    }
};

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Offline substitute for a sentence encoder: character-trigram counts of the
// lowercased text, hashed into dim buckets with 64-bit FNV-1a, L2-normalized.
// Texts without a full trigram map to the zero vector.
inline EmbeddingVector hashed_fallback_embed(std::string_view text, std::size_t dim) {
    if (dim < 2) throw std::invalid_argument("hashed_fallback_embed: dim must be >= 2");
    EmbeddingVector v;
    v.values.assign(dim, 0.0);
    const std::string lowered = to_lower_ascii(text);
    if (lowered.size() < 3) return v;
    for (std::size_t i = 0; i + 3 <= lowered.size(); ++i) {
        const std::size_t bucket =
            static_cast<std::size_t>(fnv1a64(std::string_view(lowered).substr(i, 3)) % dim);
        v.values[bucket] += 1.0;
    }
    double norm = v.norm();
    if (norm > 0.0) {
        for (double& x : v.values) x /= norm;
    }
    return v;
}

// dot(a,b) / (|a||b|); zero-norm inputs yield 0 with a warning. Dimension
// mismatch is a caller bug and throws.
inline double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b,
                                WarningLog* warnings = nullptr) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("cosine_similarity: dimension mismatch (" +
                                    std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0.0 || nb == 0.0) {
        warn(warnings, "cosine similarity of a zero-norm vector; returning 0");
        return 0.0;
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

inline void l2_normalize(EmbeddingVector& v) {
    const double n = v.norm();
    if (n > 0.0) {
        for (double& x : v.values) x /= n;
    }
}

// One vector per input text, order preserved. Remote providers are called in
// batches with retry/backoff; dimension or count mismatches are fatal since
// silently mixing vector spaces would corrupt every downstream stage.
inline std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts,
                                                const EmbeddingProviderConfig& cfg) {
    cfg.validate();
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    if (texts.empty()) return out;

    if (cfg.kind == ProviderKind::HashedFallback) {
        for (const std::string& t : texts) out.push_back(hashed_fallback_embed(t, cfg.dim));
        return out;
    }

    HttpEndpoint ep;
    ep.base_url = cfg.base_url;
    ep.auth_env_var = cfg.auth_env_var;
    ep.timeout = cfg.timeout;
    ep.max_retries = cfg.max_retries;
    ep.backoff = cfg.backoff;

    std::size_t expected_dim = 0;
    for (std::size_t start = 0; start < texts.size(); start += cfg.batch_size) {
        const std::size_t count = std::min(cfg.batch_size, texts.size() - start);
        nlohmann::json body;
        body["texts"] = nlohmann::json::array();
        for (std::size_t i = 0; i < count; ++i) body["texts"].push_back(texts[start + i]);

        nlohmann::json reply;
        try {
            reply = post_json(ep, "/embed", body);
        } catch (const std::exception& e) {
            throw EmbeddingError("embedding batch starting at index " + std::to_string(start) +
                                 " failed: " + e.what());
        }
        if (!reply.is_object() || !reply.contains("vectors") || !reply["vectors"].is_array()) {
            throw EmbeddingError("embedding provider reply missing \"vectors\" array (batch at index " +
                                 std::to_string(start) + ")");
        }
        const auto& vectors = reply["vectors"];
        if (vectors.size() != count) {
            throw EmbeddingError("embedding provider returned " + std::to_string(vectors.size()) +
                                 " vectors for " + std::to_string(count) + " texts (batch at index " +
                                 std::to_string(start) + ")");
        }
        for (const auto& jv : vectors) {
            if (!jv.is_array() || jv.empty()) {
                throw EmbeddingError("embedding provider returned a non-numeric vector");
            }
            EmbeddingVector v;
            v.values.reserve(jv.size());
            for (const auto& x : jv) {
                if (!x.is_number()) throw EmbeddingError("embedding provider returned a non-numeric vector");
                v.values.push_back(x.get<double>());
            }
            if (!v.finite()) throw EmbeddingError("embedding provider returned non-finite values");
            if (expected_dim == 0) {
                expected_dim = v.dim();
            } else if (v.dim() != expected_dim) {
                throw EmbeddingError("embedding dimension mismatch across batches (" +
                                     std::to_string(expected_dim) + " vs " +
                                     std::to_string(v.dim()) + ")");
            }
            out.push_back(std::move(v));
        }
    }
    return out;
}

// Closure over a provider config; the summarize and evaluate stages take this
// so they stay independent of the transport.
using EmbedFn = std::function<std::vector<EmbeddingVector>(const std::vector<std::string>&)>;

inline EmbedFn make_embed_fn(EmbeddingProviderConfig cfg) {
    cfg.validate();
    return [cfg](const std::vector<std::string>& texts) { return embed_batch(texts, cfg); };
}

inline const char* provider_kind_name(ProviderKind k) {
    return k == ProviderKind::Remote ? "remote" : "hashed_fallback";
}

}  // namespace secite

#endif  // SECITE_EMBED_HPP
