#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <texcls/grid.hpp>

namespace texcls {

/// One labeled grayscale image with intensities in [0, 1].
struct ImageSample {
    std::string id;
    std::string label;
    IntensityGrid pixels;
};

/// Gray levels in [0, levels - 1].
struct QuantizedImage {
    int levels = 0;
    Grid<std::uint16_t> data;
};

inline constexpr std::size_t kMinImageSide = 16;

/// Throws DataError when the sample violates the size, range or label invariants.
void validate_sample(const ImageSample& sample);

/// Loads `<root>/<class>/<image>` or, if `<root>/manifest.csv` exists (or root is itself
/// a manifest file), the rows of an `id,label,path` manifest with paths relative to it.
/// Classes and files are visited in lexicographic order.
std::vector<ImageSample> load_dataset(const std::filesystem::path& root);

/// Decodes one 8-bit grayscale or color raster; color is reduced with BT.601 luma weights.
IntensityGrid load_image(const std::filesystem::path& file);

/// Stable 64-bit digest over sample ids, labels and pixel values.
std::uint64_t dataset_digest(std::span<const ImageSample> samples);

/// Uniform-width binning of [0, 1]: floor(v * levels) clamped to levels - 1.
QuantizedImage quantize(const IntensityGrid& pixels, int levels);
QuantizedImage quantize(const ImageSample& sample, int levels);

struct SplitSpec {
    std::uint64_t seed = 0;
    double train_fraction = 0.6;
};

/// Index partition into the input sequence.
struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Training set size for n samples: round-half-up of fraction * n, kept in [1, n - 1].
std::size_t train_size(std::size_t n, double train_fraction);

/// Seeded uniform permutation followed by a prefix cut. Throws DataError when fewer
/// than two classes are present or when a class ends up absent from training.
Split permute_split(std::span<const std::string> labels, const SplitSpec& spec);
Split permute_split(std::span<const ImageSample> samples, const SplitSpec& spec);

} // namespace texcls
