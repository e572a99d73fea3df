#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <texcls/bayes.hpp>

namespace texcls {

using Mask = std::vector<std::uint8_t>;

struct Chromosome {
    Mask mask;
    std::optional<double> fitness;

    [[nodiscard]] std::size_t selected() const noexcept;
};

enum class FitnessMode { Inner, PaperFaithful };

struct GaConfig {
    int population = 50;
    double mutation_rate = 0.01;
    int elitism = 2;
    double plateau_tol = 1e-5;
    int max_generations = 200;
    int tournament = 3;
    std::uint64_t seed = 0;
    unsigned workers = 1;
};

/// Throws ParameterError unless the population is even and positive, elitism fits in
/// it, and mutation rate and tolerance are in range.
void validate(const GaConfig& config);

struct GenerationStats {
    int generation = 0;
    double best = 0.0;
    double mean = 0.0;
    double smoothed_mean = 0.0; ///< mean fitness averaged over the last three generations
    double best_ever = 0.0;
};

struct GaResult {
    Chromosome best;
    std::vector<GenerationStats> history;
};

/// Must be safe to call concurrently; should depend only on the mask.
using FitnessFn = std::function<double(std::span<const std::uint8_t>)>;

/// Generational GA over feature masks. The first population holds the all-ones mask and
/// random half-density masks; each later generation keeps the elites and fills the rest
/// with tournament selection, single-point crossover and per-gene mutation. Empty
/// children get one random bit. Stops when the smoothed mean fitness moves less than
/// plateau_tol or after max_generations. Randomness of every child is derived from
/// (seed, generation, pair index) so results do not depend on the worker count.
GaResult ga_select(std::size_t feature_count, const FitnessFn& fitness, const GaConfig& config);

/// Success ratio of PCA + naive Bayes restricted to the masked columns, trained on
/// (train_x, train_labels) and scored on (eval_x, eval_labels).
double ga_fitness(std::span<const std::uint8_t> mask, const FeatureMatrix& train_x,
                  std::span<const std::string> train_labels, const FeatureMatrix& eval_x,
                  std::span<const std::string> eval_labels, double pca_threshold);

/// Column indices selected by the mask.
std::vector<Eigen::Index> mask_columns(std::span<const std::uint8_t> mask);

} // namespace texcls
