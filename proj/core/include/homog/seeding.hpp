#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace homog {

/// Derive an independent stream seed from a root seed and a label, so each
/// sampling operation draws from its own reproducible stream.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label);

inline std::mt19937_64 make_rng(std::uint64_t root, std::string_view label) {
  return std::mt19937_64(derive_seed(root, label));
}

}  // namespace homog
