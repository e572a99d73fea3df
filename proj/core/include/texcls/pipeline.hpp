#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <texcls/bayes.hpp>
#include <texcls/config.hpp>
#include <texcls/feature_table.hpp>
#include <texcls/filters.hpp>

namespace texcls {

struct StageStats {
    double mean = 0.0; ///< success ratio in [0, 1]
    double sd = 0.0;   ///< population standard deviation over permutations
};

struct CaseResult {
    int case_number = 1;
    std::optional<StageStats> raw, pca, ga;
    std::size_t nf0 = 0;
    std::optional<double> nf_ga; ///< mean number of GA-selected raw features
    Stage final_stage = Stage::Raw;
    ConfusionMatrix confusion;   ///< averaged absolute counts of the final stage
    std::vector<std::string> feature_names;
    std::vector<double> selection_frequency; ///< per feature, empty without the GA stage

    [[nodiscard]] SourceSelection selection() const { return SourceSelection::from_case(case_number); }
    [[nodiscard]] const std::optional<StageStats>& stage(Stage s) const noexcept;
};

/// Outcome of one seeded 60/40 permutation.
struct PermutationOutcome {
    std::uint64_t seed = 0;
    std::optional<double> raw, pca, ga;
    Mask ga_mask;                ///< over the case's columns
    ConfusionMatrix confusion;   ///< final stage
};

/// Seed of permutation `p` of case `c` under `base`.
std::uint64_t permutation_seed(std::uint64_t base, int case_number, int permutation);

/// Runs the requested stages on one permutation. `fixed_mask`, when given, replaces the GA search.
PermutationOutcome run_permutation(const FeatureTable& table, SourceSelection selection,
                                   const ExperimentConfig& config, int permutation,
                                   const Mask* fixed_mask = nullptr, unsigned ga_workers = 1);

/// All permutations of one case, aggregated.
CaseResult run_case(const FeatureTable& table, SourceSelection selection, const ExperimentConfig& config);

/// Loads the cache or extracts features (writing the cache), runs every case and
/// writes the result files into config.output.
std::vector<CaseResult> run_experiment(const ExperimentConfig& config);

/// Loads `config.cache` when it exists, otherwise extracts from `config.dataset` and
/// writes a keyed cache (to `config.cache` if set, else into the output directory).
FeatureTable obtain_features(const ExperimentConfig& config);

// Result files:
//   results.csv               percent, two decimals (table layout)
//   results_full.csv          same columns, full-precision ratios, plus final_stage
//   confusion_case<NN>.csv    averaged confusion matrix of the final stage
//   selection_frequency.csv   case,feature,frequency
void write_results(const std::filesystem::path& dir, const std::vector<CaseResult>& results);
std::vector<CaseResult> read_results(const std::filesystem::path& dir);

inline constexpr std::string_view kResultsHeader = "case,V,E,C,G,O,mu0,sd0,mu_pca,sd_pca,mu_ga,sd_ga,nf0,nf_ga";

} // namespace texcls
