#include <texcls/rng.hpp>

#include <bit>
#include <limits>

#include <texcls/error.hpp>

namespace texcls {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept {
    std::uint64_t h = mix64(base);
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    h = mix64(h ^ c);
    return h;
}

std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    if (bound == 0) {
        throw ContractError("uniform_below: bound must be positive");
    }
    // Reject the short tail so every residue is equally likely.
    const std::uint64_t threshold = (std::numeric_limits<std::uint64_t>::max() - bound + 1) % bound;
    for (;;) {
        const std::uint64_t r = rng();
        if (r >= threshold) {
            return r % bound;
        }
    }
}

double uniform01(Rng& rng) noexcept {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void Fnv1a::update(std::span<const unsigned char> bytes) noexcept {
    for (unsigned char b : bytes) {
        state_ ^= b;
        state_ *= 0x100000001b3ULL;
    }
}

void Fnv1a::update(std::string_view text) noexcept {
    update(std::span<const unsigned char>(reinterpret_cast<const unsigned char*>(text.data()), text.size()));
    update_u64(text.size());
}

void Fnv1a::update_u64(std::uint64_t v) noexcept {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) {
        buf[i] = static_cast<unsigned char>(v >> (8 * i));
    }
    update(std::span<const unsigned char>(buf, 8));
}

void Fnv1a::update_double(double v) noexcept { update_u64(std::bit_cast<std::uint64_t>(v)); }

} // namespace texcls
