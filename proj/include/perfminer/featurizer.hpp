#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace perfminer {

// Lowercase tokens over the alphabet [a-z0-9_].
using TokenSequence = std::vector<std::string>;

// Lowercases and splits on any maximal run of characters outside [a-z0-9_].
TokenSequence tokenize(std::string_view message);

// L2-normalized hashed n-gram counts. dim is a power of two.
struct SparseFeatureVector {
    std::uint32_t dim = 0;
    std::unordered_map<std::uint32_t, double> entries;

    double norm() const;
    double dot(const std::vector<double>& dense) const;
};

constexpr std::uint32_t kDefaultFeatureDim = 1u << 18;

// Unigrams plus adjacent bigrams ("w" and "w1 w2"), indexed by 64-bit FNV-1a
// reduced mod dim, counts L2-normalized. Deterministic across platforms.
// Throws ConfigError unless dim is a power of two >= 2^10.
SparseFeatureVector hash_features(const TokenSequence& tokens, std::uint32_t dim = kDefaultFeatureDim);

} // namespace perfminer
