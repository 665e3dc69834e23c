#include "perfminer/featurizer.hpp"

#include "perfminer/digest.hpp"
#include "perfminer/errors.hpp"

#include <cmath>

namespace perfminer {

TokenSequence tokenize(std::string_view message) {
    TokenSequence tokens;
    std::string current;
    for (char c : message) {
        char l = (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c;
        bool word = (l >= 'a' && l <= 'z') || (l >= '0' && l <= '9') || l == '_';
        if (word) {
            current.push_back(l);
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

double SparseFeatureVector::norm() const {
    double sq = 0.0;
    for (const auto& [idx, w] : entries) sq += w * w;
    return std::sqrt(sq);
}

double SparseFeatureVector::dot(const std::vector<double>& dense) const {
    double sum = 0.0;
    for (const auto& [idx, w] : entries)
        if (idx < dense.size()) sum += w * dense[idx];
    return sum;
}

SparseFeatureVector hash_features(const TokenSequence& tokens, std::uint32_t dim) {
    if (dim < (1u << 10) || (dim & (dim - 1)) != 0)
        throw ConfigError("feature dim must be a power of two >= 2^10, got " + std::to_string(dim));

    SparseFeatureVector vec;
    vec.dim = dim;
    auto add = [&](std::string_view feature) {
        std::uint32_t idx = static_cast<std::uint32_t>(digest::fnv1a64(feature) & (dim - 1));
        vec.entries[idx] += 1.0;
    };
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        add(tokens[i]);
        if (i + 1 < tokens.size()) add(tokens[i] + " " + tokens[i + 1]);
    }
    double n = vec.norm();
    if (n > 0.0)
        for (auto& [idx, w] : vec.entries) w /= n;
    return vec;
}

} // namespace perfminer
