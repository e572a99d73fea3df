#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <texcls/bayes.hpp>
#include <texcls/dataset.hpp>
#include <texcls/texture_features.hpp>

namespace texcls {

/// Per-sample feature rows with their canonical column names.
struct FeatureTable {
    std::vector<std::string> ids;
    std::vector<std::string> labels;
    std::vector<std::string> names;
    FeatureMatrix values; ///< ids.size() x names.size()

    /// Column indices whose names start with a selected source prefix, in table order.
    [[nodiscard]] std::vector<Eigen::Index> columns_for(SourceSelection selection) const;
    /// Sorted distinct labels.
    [[nodiscard]] std::vector<std::string> classes() const;
};

/// Extracts all five sources (520 columns) for every sample, in parallel.
FeatureTable extract_features(std::span<const ImageSample> samples, const FeatureConfig& config,
                              unsigned workers = 1);

/// Digest of everything that determines extracted values.
std::uint64_t extraction_key(std::uint64_t dataset_digest, const FeatureConfig& config);

/// Comma-separated: header `id,label,<names>`, one row per sample, shortest
/// round-trip decimal for every value.
void write_feature_cache(const std::filesystem::path& file, const FeatureTable& table);
FeatureTable read_feature_cache(const std::filesystem::path& file);

/// Shortest decimal string that parses back to exactly `v`.
std::string format_exact(double v);
/// Fixed notation with the given number of decimals.
std::string format_fixed(double v, int decimals);
double parse_double(std::string_view text);

} // namespace texcls
