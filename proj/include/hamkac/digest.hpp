#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace hamkac {

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// Derives an independent 64-bit seed for a named subsystem from a root seed.
std::uint64_t labeled_seed(std::uint64_t root, std::string_view label);

/// Uniform draw from [0, n) by rejection; identical on every platform.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);

}  // namespace hamkac
