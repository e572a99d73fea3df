#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include <texcls/dataset.hpp>
#include <texcls/grid.hpp>

namespace texcls {

/// Image sources in feature-vector order.
enum class Source : std::uint8_t { Original, Gaussian, Canny, Entropy, Variance };

inline constexpr std::array<Source, 5> kAllSources = {Source::Original, Source::Gaussian, Source::Canny,
                                                      Source::Entropy, Source::Variance};

/// Feature-name prefix: orig, gauss, canny, entropy, var.
std::string_view source_prefix(Source s) noexcept;

/// Subset of the five sources, numbered 1..31 as the 5-bit value of the flags
/// ordered (Variance, Entropy, Canny, Gaussian, Original); Original is the low bit.
class SourceSelection {
public:
    static SourceSelection from_case(int case_number);
    static SourceSelection all() { return from_case(31); }

    [[nodiscard]] int case_number() const noexcept { return bits_; }
    [[nodiscard]] bool has(Source s) const noexcept;
    [[nodiscard]] int count() const noexcept;
    /// Selected sources in feature-vector order.
    [[nodiscard]] std::vector<Source> sources() const;
    /// Flags in table order (V, E, C, G, O).
    [[nodiscard]] std::array<bool, 5> table_flags() const noexcept;

    friend bool operator==(SourceSelection, SourceSelection) = default;

private:
    explicit SourceSelection(int bits) : bits_(bits) {}
    int bits_ = 1;
};

struct GaussianParams {
    double sigma = 2.0;
};

struct CannyParams {
    double sigma = 1.4;
    double high_percentile = 0.9; ///< fraction in (0, 1]
    double low_ratio = 0.4;       ///< low threshold = low_ratio * high
};

struct FilterParams {
    GaussianParams gaussian;
    CannyParams canny;
};

/// Normalized sampled Gaussian of radius ceil(3 sigma).
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian blur with edge replication; output clamped to [0, 1].
IntensityGrid gaussian_filter(const IntensityGrid& img, const GaussianParams& params = {});

/// Sobel gradient of the input (edge replicated).
struct Gradient {
    IntensityGrid magnitude;
    Grid<std::uint8_t> sector; ///< 0: horizontal, 1: 45 deg, 2: vertical, 3: 135 deg
};
Gradient sobel_gradient(const IntensityGrid& img);

/// Thins the gradient magnitude to local maxima across the edge direction.
IntensityGrid non_maximum_suppression(const Gradient& g);

/// Double-threshold edge tracking: pixels >= high seed edges, pixels >= low that are
/// 8-connected to a seed join them. Zero magnitudes never become edges.
Grid<std::uint8_t> hysteresis(const IntensityGrid& thinned, double low, double high);

/// Smoothing, Sobel, non-maximum suppression, hysteresis. Output cells are 0 or 1.
Grid<std::uint8_t> canny_filter(const IntensityGrid& img, const CannyParams& params = {});

/// Shannon entropy (bits) of the 9x9 neighbourhood histogram divided by log2(levels).
IntensityGrid entropy_filter(const QuantizedImage& q);

/// Population variance of the 3x3 neighbourhood divided by 0.25.
IntensityGrid variance_filter(const IntensityGrid& img);

struct FilteredSource {
    Source source;
    QuantizedImage image;
};

/// Filters the sample for every selected source and re-quantizes each result to `levels`.
std::vector<FilteredSource> apply_filter_bank(const ImageSample& sample, SourceSelection selection, int levels,
                                              const FilterParams& params = {});

} // namespace texcls
