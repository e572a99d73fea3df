#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <texcls/dataset.hpp>
#include <texcls/filters.hpp>
#include <texcls/glcm.hpp>

namespace texcls {

inline constexpr std::size_t kGlcmFeatureCount = 17;
inline constexpr std::size_t kBlockSize = 6 * kGlcmFeatureCount + 2; // 104

/// Short feature keys: f1..f13, maxp, cshade, cprom, tsq.
const std::array<std::string_view, kGlcmFeatureCount>& glcm_feature_keys() noexcept;

/// Human-readable name for a feature key ("f9" -> "entropy", "fd" -> "fractal dimension").
std::string_view feature_display_name(std::string_view key) noexcept;

/// Haralick f1..f13 followed by maximum probability, cluster shade, cluster prominence
/// and Tsallis entropy.
struct GlcmFeatures {
    std::array<double, kGlcmFeatureCount> values{};
    /// Set when f3 or f12 hit a zero denominator and was defined as 0.
    bool singular = false;

    double& operator[](std::size_t i) noexcept { return values[i]; }
    double operator[](std::size_t i) const noexcept { return values[i]; }
};

/// f1..f13 written into out[0..12].
void haralick_features(const Glcm& g, const GlcmMarginals& m, GlcmFeatures& out);

struct ExtraFeatures {
    double maxp = 0, cshade = 0, cprom = 0, tsq = 0;
};

/// Throws ParameterError for q == 1 (the Shannon limit is f9).
ExtraFeatures extra_glcm_features(const Glcm& g, const GlcmMarginals& m, double tsallis_q);

/// All 17 features of one matrix.
GlcmFeatures glcm_features(const Glcm& g, double tsallis_q);

struct FractalEstimate {
    double dimension = 2.0;          ///< clamped into [2, 3]
    double raw_slope = 2.0;          ///< least-squares slope before clamping
    double residual = 0.0;           ///< RMS residual of the log-log fit
    std::vector<int> box_sizes;
    std::vector<double> box_counts; ///< N(s), area-normalized for partial grids
};

/// Differential box counting over box sizes 2, 4, 8, ... <= min(H, W) / 2.
/// Throws NumericalError if fewer than three scales fit.
FractalEstimate fractal_dimension(const QuantizedImage& q);

struct LyapunovParams {
    int embedding_dimension = 3;
    int delay = 1;
    int horizon = 5; ///< k in lambda(k)
};

struct LyapunovEstimate {
    double exponent = 0.0; ///< nats per step
    std::size_t pairs = 0; ///< neighbour pairs that contributed
    bool degenerate = false; ///< no usable pair; exponent defined as 0
};

/// Sato's average log-divergence of nearest-neighbour pairs in a delay embedding.
LyapunovEstimate sato_mle(std::span<const double> series, const LyapunovParams& params = {});
/// Row-major flattening of the image, then the series estimator.
/// Throws NumericalError when the series is shorter than 512.
LyapunovEstimate sato_mle(const QuantizedImage& q, const LyapunovParams& params = {});

struct FeatureConfig {
    int levels = 64;
    double tsallis_q = 1.5;
    LyapunovParams lyapunov;
    FilterParams filters;
};

/// 104 values: six records of 17 (d0, d45, d90, d135, avg, rng) then fd and mle.
/// avg and rng are the mean and range of the directional feature values.
struct ImageFeatureBlock {
    std::array<GlcmFeatures, 6> records;
    double fd = 2.0;
    double mle = 0.0;

    [[nodiscard]] std::vector<double> flatten() const;
};

/// Canonical names "<variant>.<key>" and "global.fd", "global.mle".
const std::vector<std::string>& block_feature_names();

ImageFeatureBlock feature_block(const QuantizedImage& q, double tsallis_q, const LyapunovParams& lyapunov = {});

struct FeatureVector {
    std::vector<std::string> names;
    std::vector<double> values;
};

/// Names of a full vector for the selection, each prefixed with its source.
std::vector<std::string> feature_names(SourceSelection selection);

FeatureVector feature_vector(const ImageSample& sample, SourceSelection selection, const FeatureConfig& config);

/// Splits "orig.d0.f9" into its feature key "f9"; "var.global.fd" -> "fd".
std::string_view feature_key(std::string_view full_name) noexcept;

} // namespace texcls
