#ifndef SECITE_TESTS_SUPPORT_HPP
#define SECITE_TESTS_SUPPORT_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "secite/embed.hpp"
#include "secite/util.hpp"

namespace testsupport {

inline std::string fixture_path(const std::string& rel) {
    return std::string(SECITE_FIXTURE_DIR) + "/" + rel;
}

inline std::string data_path(const std::string& rel) {
    return std::string(SECITE_DATA_DIR) + "/" + rel;
}

inline std::string temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("secite_tests_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

// Two lexically separated groups of synthetic citation statements; hashed
// trigram embeddings place them in two blobs.
inline std::vector<std::string> two_blob_statements(std::size_t per_group,
                                                    std::uint64_t seed = 99) {
    const std::vector<std::string> pos = {
        "effective", "efficient", "robust",  "scalable", "accurate", "outperforms",
        "reliable",  "elegant",   "precise", "powerful", "improves", "excellent"};
    const std::vector<std::string> neg = {
        "overhead", "fails",    "limited",   "crashes",   "fragile", "inaccurate",
        "costly",   "unstable", "cumbersome", "struggles", "slow",    "brittle"};
    std::vector<std::string> out;
    secite::Rng rng(seed);
    for (int group = 0; group < 2; ++group) {
        const auto& vocab = group == 0 ? pos : neg;
        for (std::size_t i = 0; i < per_group; ++i) {
            std::string s = "the tool";
            for (int w = 0; w < 5; ++w) s += " " + vocab[rng.next_index(vocab.size())];
            out.push_back(s);
        }
    }
    return out;
}

inline std::vector<secite::EmbeddingVector> gaussian_points(std::size_t n, std::size_t dim,
                                                            std::uint64_t seed,
                                                            double shift = 0.0) {
    secite::Rng rng(seed);
    std::vector<secite::EmbeddingVector> out(n);
    for (auto& p : out) {
        p.values.resize(dim);
        for (auto& v : p.values) v = rng.next_gaussian() + shift;
    }
    return out;
}

}  // namespace testsupport

#endif  // SECITE_TESTS_SUPPORT_HPP
