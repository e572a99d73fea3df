#include <texcls/ga.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <texcls/error.hpp>
#include <texcls/parallel.hpp>
#include <texcls/pca.hpp>
#include <texcls/rng.hpp>

namespace texcls {

std::size_t Chromosome::selected() const noexcept {
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

void validate(const GaConfig& c) {
    if (c.population < 2 || c.population % 2 != 0) {
        throw ParameterError("ga.population must be even and >= 2");
    }
    if (c.elitism < 0 || c.elitism >= c.population) {
        throw ParameterError("ga.elitism must lie in [0, population)");
    }
    if (!(c.mutation_rate > 0.0 && c.mutation_rate < 1.0)) {
        throw ParameterError("ga.mutation_rate must lie in (0, 1)");
    }
    if (!(c.plateau_tol > 0.0)) {
        throw ParameterError("ga.plateau_tol must be positive");
    }
    if (c.max_generations < 1) {
        throw ParameterError("ga.max_generations must be >= 1");
    }
    if (c.tournament < 1) {
        throw ParameterError("tournament size must be >= 1");
    }
}

std::vector<Eigen::Index> mask_columns(std::span<const std::uint8_t> mask) {
    std::vector<Eigen::Index> cols;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) {
            cols.push_back(static_cast<Eigen::Index>(i));
        }
    }
    return cols;
}

double ga_fitness(std::span<const std::uint8_t> mask, const FeatureMatrix& train_x,
                  std::span<const std::string> train_labels, const FeatureMatrix& eval_x,
                  std::span<const std::string> eval_labels, double pca_threshold) {
    if (static_cast<Eigen::Index>(mask.size()) != train_x.cols() || train_x.cols() != eval_x.cols()) {
        throw ContractError("ga_fitness: mask length does not match the feature count");
    }
    const auto cols = mask_columns(mask);
    if (cols.empty()) {
        throw ContractError("ga_fitness: empty mask");
    }
    const FeatureMatrix tr = train_x(Eigen::all, cols);
    const FeatureMatrix ev = eval_x(Eigen::all, cols);
    const PcaModel pca = pca_fit(tr, pca_threshold);
    const NbModel nb = nb_fit(pca_project(pca, tr), train_labels);
    return nb_evaluate(nb, pca_project(pca, ev), eval_labels).success;
}

namespace {

void repair(Mask& mask, Rng& rng) {
    if (std::find(mask.begin(), mask.end(), std::uint8_t{1}) == mask.end()) {
        mask[static_cast<std::size_t>(uniform_below(rng, mask.size()))] = 1;
    }
}

class Evaluator {
public:
    Evaluator(const FitnessFn& fn, unsigned workers) : fn_(fn), workers_(workers) {}

    void evaluate(std::vector<Chromosome>& pop, int generation) {
        std::vector<const Mask*> pending;
        std::map<Mask, std::size_t> pending_index;
        for (const auto& c : pop) {
            if (!c.fitness && !cache_.contains(c.mask) && !pending_index.contains(c.mask)) {
                pending_index.emplace(c.mask, pending.size());
                pending.push_back(&c.mask);
            }
        }
        std::vector<double> results(pending.size());
        try {
            parallel_for(pending.size(), workers_, [&](std::size_t i) {
                const double f = fn_(*pending[i]);
                if (!std::isfinite(f)) {
                    throw NumericalError("fitness is not finite");
                }
                results[i] = f;
            });
        } catch (...) {
            rethrow_with_context("GA generation " + std::to_string(generation) + ": ");
        }
        for (std::size_t i = 0; i < pending.size(); ++i) {
            cache_.emplace(*pending[i], results[i]);
        }
        for (auto& c : pop) {
            if (!c.fitness) {
                c.fitness = cache_.at(c.mask);
            }
        }
    }

private:
    const FitnessFn& fn_;
    unsigned workers_;
    std::map<Mask, double> cache_;
};

std::size_t tournament_pick(const std::vector<Chromosome>& pop, int size, Rng& rng) {
    std::size_t best = static_cast<std::size_t>(uniform_below(rng, pop.size()));
    for (int t = 1; t < size; ++t) {
        const auto cand = static_cast<std::size_t>(uniform_below(rng, pop.size()));
        if (*pop[cand].fitness > *pop[best].fitness || (*pop[cand].fitness == *pop[best].fitness && cand < best)) {
            best = cand;
        }
    }
    return best;
}

} // namespace

GaResult ga_select(std::size_t feature_count, const FitnessFn& fitness, const GaConfig& config) {
    validate(config);
    if (feature_count < 2) {
        throw ParameterError("GA needs at least two features");
    }
    const auto pop_size = static_cast<std::size_t>(config.population);
    Evaluator evaluator(fitness, config.workers);

    std::vector<Chromosome> pop(pop_size);
    pop[0].mask.assign(feature_count, 1);
    for (std::size_t i = 1; i < pop_size; ++i) {
        Rng rng(derive_seed(config.seed, 0, i));
        Mask& m = pop[i].mask;
        m.resize(feature_count);
        for (auto& bit : m) {
            bit = uniform01(rng) < 0.5 ? 1 : 0;
        }
        repair(m, rng);
    }

    GaResult result;
    std::vector<double> means;
    for (int gen = 0;; ++gen) {
        evaluator.evaluate(pop, gen);

        GenerationStats stats;
        stats.generation = gen;
        double sum = 0.0;
        std::size_t best_idx = 0;
        for (std::size_t i = 0; i < pop_size; ++i) {
            sum += *pop[i].fitness;
            if (*pop[i].fitness > *pop[best_idx].fitness) {
                best_idx = i;
            }
        }
        stats.best = *pop[best_idx].fitness;
        stats.mean = sum / static_cast<double>(pop_size);
        if (!result.best.fitness || stats.best > *result.best.fitness) {
            result.best = pop[best_idx];
        }
        stats.best_ever = *result.best.fitness;
        means.push_back(stats.mean);
        const std::size_t window = std::min<std::size_t>(3, means.size());
        stats.smoothed_mean =
            std::accumulate(means.end() - static_cast<std::ptrdiff_t>(window), means.end(), 0.0) /
            static_cast<double>(window);
        result.history.push_back(stats);

        if (gen + 1 >= config.max_generations) {
            break;
        }
        if (gen >= 3) {
            const double prev = result.history[static_cast<std::size_t>(gen - 1)].smoothed_mean;
            if (std::abs(stats.smoothed_mean - prev) < config.plateau_tol) {
                break;
            }
        }

        // Breed the next generation.
        std::vector<std::size_t> rank(pop_size);
        std::iota(rank.begin(), rank.end(), std::size_t{0});
        std::stable_sort(rank.begin(), rank.end(),
                         [&](std::size_t a, std::size_t b) { return *pop[a].fitness > *pop[b].fitness; });
        std::vector<Chromosome> next;
        next.reserve(pop_size);
        for (int e = 0; e < config.elitism; ++e) {
            next.push_back(pop[rank[static_cast<std::size_t>(e)]]);
        }
        for (std::size_t pair = 0; next.size() < pop_size; ++pair) {
            Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(gen + 1), pair));
            const Mask& a = pop[tournament_pick(pop, config.tournament, rng)].mask;
            const Mask& b = pop[tournament_pick(pop, config.tournament, rng)].mask;
            const auto cut = static_cast<std::ptrdiff_t>(1 + uniform_below(rng, feature_count - 1));
            Chromosome c1;
            Chromosome c2;
            c1.mask.assign(a.begin(), a.begin() + cut);
            c1.mask.insert(c1.mask.end(), b.begin() + cut, b.end());
            c2.mask.assign(b.begin(), b.begin() + cut);
            c2.mask.insert(c2.mask.end(), a.begin() + cut, a.end());
            for (Chromosome* c : {&c1, &c2}) {
                for (auto& bit : c->mask) {
                    if (uniform01(rng) < config.mutation_rate) {
                        bit ^= 1;
                    }
                }
                repair(c->mask, rng);
            }
            next.push_back(std::move(c1));
            if (next.size() < pop_size) {
                next.push_back(std::move(c2));
            }
        }
        pop = std::move(next);
    }
    return result;
}

} // namespace texcls
