#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace perfminer::digest {

// 64-bit FNV-1a. Stable across platforms; used for feature hashing and
// config fingerprints.
constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

constexpr std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = kFnvOffset) {
    std::uint64_t h = seed;
    for (char c : data) {
        h ^= static_cast<std::uint8_t>(c);
        h *= kFnvPrime;
    }
    return h;
}

struct Md5Digest {
    std::array<std::uint8_t, 16> bytes{};
    std::string hex() const;
    bool operator==(const Md5Digest&) const = default;
    auto operator<=>(const Md5Digest&) const = default;
};

Md5Digest md5(std::string_view data);

struct Sha256Digest {
    std::array<std::uint8_t, 32> bytes{};
    std::string hex() const;
    bool operator==(const Sha256Digest&) const = default;
};

Sha256Digest sha256(std::string_view data);

std::string to_hex(const std::uint8_t* data, std::size_t len);

} // namespace perfminer::digest
