#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <texcls/ga.hpp>
#include <texcls/texture_features.hpp>

namespace texcls {

enum class Stage { Raw, Pca, Ga };

std::string_view stage_name(Stage s) noexcept;
Stage parse_stage(std::string_view text);

/// How the GA mask is obtained per case: re-run on every permutation, or run once on
/// the first permutation's split and reused.
enum class MaskMode { PerPermutation, Fixed };

struct ExperimentConfig {
    std::filesystem::path dataset;
    std::filesystem::path cache;  ///< optional feature cache file
    std::filesystem::path output = "results";
    std::vector<int> cases;       ///< default: 1..31
    int permutations = 100;
    double train_fraction = 0.6;
    double inner_fraction = 0.75; ///< GA fitness split of the training fold (inner mode)
    std::uint64_t seed = 0;
    std::vector<Stage> stages = {Stage::Raw, Stage::Pca, Stage::Ga};
    double pca_threshold = 0.95;
    unsigned workers = 0; ///< 0 = hardware concurrency
    FeatureConfig features;
    GaConfig ga;
    FitnessMode fitness_mode = FitnessMode::Inner;
    MaskMode mask_mode = MaskMode::PerPermutation;
    bool verbose = false;

    ExperimentConfig();

    [[nodiscard]] bool has_stage(Stage s) const noexcept;
    /// Last requested stage in raw < pca < ga order.
    [[nodiscard]] Stage final_stage() const noexcept;
    [[nodiscard]] unsigned worker_count() const noexcept;
};

/// Throws ConfigError / ParameterError on inconsistent settings.
void validate(const ExperimentConfig& config);

/// Flat "key = value" lines; '#' starts a comment. Unknown keys are rejected.
/// Relative paths are resolved against `base_dir`.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& file);

/// Applies one key to an existing configuration (also used for CLI overrides).
void apply_config_key(ExperimentConfig& config, std::string_view key, std::string_view value,
                      const std::filesystem::path& base_dir = {});

/// Accepted configuration keys.
const std::vector<std::string_view>& config_keys() noexcept;

/// Parses "all", "7", "1,23,31" or "1-5,9".
std::vector<int> parse_case_list(std::string_view text);

} // namespace texcls
