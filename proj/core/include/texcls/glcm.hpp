#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include <texcls/dataset.hpp>
#include <texcls/grid.hpp>

namespace texcls {

/// Co-occurrence directions. Displacements (dr, dc) with rows growing downwards:
/// D0 (0, 1), D45 (-1, 1), D90 (-1, 0), D135 (-1, -1).
enum class Direction : std::uint8_t { D0, D45, D90, D135 };

inline constexpr std::array<Direction, 4> kDirections = {Direction::D0, Direction::D45, Direction::D90,
                                                         Direction::D135};

struct Displacement {
    int dr;
    int dc;
};
Displacement displacement(Direction d) noexcept;
std::string_view direction_name(Direction d) noexcept;

/// Normalized symmetric co-occurrence matrix, levels x levels, entries summing to 1.
struct Glcm {
    int levels = 0;
    Grid<double> p;

    [[nodiscard]] double operator()(int i, int j) const noexcept {
        return p(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
};

/// Raw symmetric pair counts: every in-bounds pair (a, b) adds one to [a][b] and one to [b][a].
Grid<std::uint64_t> cooccurrence_counts(const QuantizedImage& q, Direction dir, int offset = 1);

/// Counts divided by their total. Throws DataError when the image holds no pair.
Glcm compute_glcm(const QuantizedImage& q, Direction dir, int offset = 1);

struct GlcmSet {
    std::array<Glcm, 4> directional;
    Glcm avg;          ///< elementwise mean of the four directions
    Grid<double> rng;  ///< elementwise max - min over the four directions
};

GlcmSet glcm_set(const QuantizedImage& q, int offset = 1);

/// Standard Haralick intermediaries. Entropies use the natural log with 0 log 0 = 0.
struct GlcmMarginals {
    std::vector<double> px;
    std::vector<double> py;
    std::vector<double> p_sum;  ///< index i + j, length 2L - 1
    std::vector<double> p_diff; ///< index |i - j|, length L
    double mean_x = 0, mean_y = 0;
    double std_x = 0, std_y = 0;
    double hx = 0, hy = 0, hxy = 0, hxy1 = 0, hxy2 = 0;
};

GlcmMarginals marginals(const Glcm& g);

} // namespace texcls
