#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace texcls {

/// The project-wide generator. std::mt19937_64 is fully specified by the standard,
/// so a seed reproduces the same stream on every conforming platform.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent seeds.
[[nodiscard]] std::uint64_t mix64(std::uint64_t x) noexcept;

/// Order-dependent combination of seed components.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                                        std::uint64_t c = 0) noexcept;

/// Unbiased integer in [0, bound). bound must be > 0.
[[nodiscard]] std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

/// Real in [0, 1) built from the top 53 bits of one draw.
[[nodiscard]] double uniform01(Rng& rng) noexcept;

/// Fisher-Yates shuffle using uniform_below, identical on every platform.
template <typename T>
void portable_shuffle(std::span<T> items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

/// 64-bit FNV-1a.
class Fnv1a {
public:
    void update(std::span<const unsigned char> bytes) noexcept;
    void update(std::string_view text) noexcept;
    void update_u64(std::uint64_t v) noexcept;
    void update_double(double v) noexcept;
    [[nodiscard]] std::uint64_t digest() const noexcept { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

} // namespace texcls
