#pragma once

#include <cstdint>
#include <string_view>

namespace spdcsim {

// Deterministic seed derivation. Every random stream in the library is
// seeded from a user seed through these functions; there is no global
// generator.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) noexcept;
std::uint64_t derive_seed(std::uint64_t base, std::string_view salt) noexcept;

// 64-bit FNV-1a, used for config hashes and string salts.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace spdcsim
