#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "slr/keyframes.hpp"
#include "slr/rng.hpp"
#include "slr/symbolic_kb.hpp"

namespace slr::test {

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("slr-" + tag + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline FeatureRow random_row(rng::Engine& eng, double lo, double hi) {
    FeatureRow row;
    for (auto& v : row) v = rng::uniform(eng, lo, hi);
    return row;
}

inline KeyframeMatrix random_matrix(rng::Engine& eng, int k, double lo = 0.0,
                                    double hi = 100.0) {
    KeyframeMatrix m;
    for (int j = 0; j < k; ++j) {
        m.rows.push_back(random_row(eng, lo, hi));
        m.source_indices.push_back(j);
    }
    return m;
}

// Feature-space dataset: one widely separated base matrix per class, each
// instance a noisy copy. Class separation (~hundreds of px) dwarfs the
// per-instance noise, so the dataset is cleanly separable by construction.
inline std::vector<SignInstance> make_feature_dataset(int classes, int signers,
                                                      int instances, int k,
                                                      std::uint64_t seed,
                                                      double noise = 1.0) {
    std::vector<SignInstance> data;
    for (int c = 0; c < classes; ++c) {
        rng::Engine base_eng(rng::mix(seed, "class/" + std::to_string(c)));
        const KeyframeMatrix base = random_matrix(base_eng, k, 0.0, 1000.0);
        for (int s = 0; s < signers; ++s) {
            for (int i = 1; i <= instances; ++i) {
                SignInstance inst;
                inst.label = "C" + std::string(c + 1 < 10 ? "0" : "") + std::to_string(c + 1);
                inst.signer = "s" + std::to_string(s + 1);
                inst.instance = i;
                rng::Engine eng(rng::mix(seed, inst.id()));
                inst.keyframes = base;
                for (auto& row : inst.keyframes.rows)
                    for (auto& v : row) v += rng::uniform(eng, -noise, noise);
                data.push_back(std::move(inst));
            }
        }
    }
    return data;
}

inline std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[v & 0xF];
        v >>= 4;
    }
    return s;
}

}  // namespace slr::test
