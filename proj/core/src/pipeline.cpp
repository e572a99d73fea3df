#include <texcls/pipeline.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <texcls/error.hpp>
#include <texcls/ga.hpp>
#include <texcls/parallel.hpp>
#include <texcls/pca.hpp>
#include <texcls/rng.hpp>

namespace fs = std::filesystem;

namespace texcls {

namespace {

constexpr std::uint64_t kInnerSplitTag = 0x696e6e6572ULL; // "inner"
constexpr std::uint64_t kGaSeedTag = 0x6761ULL;           // "ga"

struct Fold {
    FeatureMatrix x;
    std::vector<std::string> labels;
};

Fold take_rows(const FeatureMatrix& x, const std::vector<std::string>& labels, const std::vector<std::size_t>& rows) {
    Fold f;
    std::vector<Eigen::Index> idx(rows.begin(), rows.end());
    f.x = x(idx, Eigen::all);
    f.labels.reserve(rows.size());
    for (auto r : rows) {
        f.labels.push_back(labels[r]);
    }
    return f;
}

Mask ga_search(const Fold& train, const Fold& test, const ExperimentConfig& config, std::uint64_t seed,
               unsigned workers) {
    const Fold* fit = &train;
    const Fold* eval = &test;
    Fold inner_fit;
    Fold inner_eval;
    if (config.fitness_mode == FitnessMode::Inner) {
        const Split inner = permute_split(train.labels, {derive_seed(seed, kInnerSplitTag), config.inner_fraction});
        inner_fit = take_rows(train.x, train.labels, inner.train);
        inner_eval = take_rows(train.x, train.labels, inner.test);
        fit = &inner_fit;
        eval = &inner_eval;
    }
    const FitnessFn fitness = [&](std::span<const std::uint8_t> mask) {
        return ga_fitness(mask, fit->x, fit->labels, eval->x, eval->labels, config.pca_threshold);
    };
    GaConfig gc = config.ga;
    gc.seed = derive_seed(seed, kGaSeedTag);
    gc.workers = workers;
    return ga_select(static_cast<std::size_t>(train.x.cols()), fitness, gc).best.mask;
}

StageStats summarize(const std::vector<double>& values) {
    StageStats s;
    for (double v : values) {
        s.mean += v;
    }
    s.mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) {
        ss += (v - s.mean) * (v - s.mean);
    }
    s.sd = std::sqrt(ss / static_cast<double>(values.size()));
    return s;
}

} // namespace

const std::optional<StageStats>& CaseResult::stage(Stage s) const noexcept {
    switch (s) {
    case Stage::Raw: return raw;
    case Stage::Pca: return pca;
    case Stage::Ga: return ga;
    }
    return raw;
}

std::uint64_t permutation_seed(std::uint64_t base, int case_number, int permutation) {
    return derive_seed(base, static_cast<std::uint64_t>(case_number), static_cast<std::uint64_t>(permutation));
}

PermutationOutcome run_permutation(const FeatureTable& table, SourceSelection selection,
                                   const ExperimentConfig& config, int permutation, const Mask* fixed_mask,
                                   unsigned ga_workers) {
    PermutationOutcome out;
    out.seed = permutation_seed(config.seed, selection.case_number(), permutation);
    const auto cols = table.columns_for(selection);
    if (cols.size() != kBlockSize * static_cast<std::size_t>(selection.count())) {
        throw DataError("feature table lacks columns for case " + std::to_string(selection.case_number()));
    }
    const FeatureMatrix x = table.values(Eigen::all, cols);
    const Split split = permute_split(table.labels, {out.seed, config.train_fraction});
    const Fold train = take_rows(x, table.labels, split.train);
    const Fold test = take_rows(x, table.labels, split.test);
    const Stage final_stage = config.final_stage();

    if (config.has_stage(Stage::Raw)) {
        const NbModel nb = nb_fit(train.x, train.labels);
        Evaluation ev = nb_evaluate(nb, test.x, test.labels);
        out.raw = ev.success;
        if (final_stage == Stage::Raw) {
            out.confusion = std::move(ev.confusion);
        }
    }
    if (config.has_stage(Stage::Pca)) {
        const PcaModel pca = pca_fit(train.x, config.pca_threshold);
        const NbModel nb = nb_fit(pca_project(pca, train.x), train.labels);
        Evaluation ev = nb_evaluate(nb, pca_project(pca, test.x), test.labels);
        out.pca = ev.success;
        if (final_stage == Stage::Pca) {
            out.confusion = std::move(ev.confusion);
        }
    }
    if (config.has_stage(Stage::Ga)) {
        out.ga_mask = fixed_mask ? *fixed_mask : ga_search(train, test, config, out.seed, ga_workers);
        const auto keep = mask_columns(out.ga_mask);
        const FeatureMatrix tr = train.x(Eigen::all, keep);
        const FeatureMatrix te = test.x(Eigen::all, keep);
        const PcaModel pca = pca_fit(tr, config.pca_threshold);
        const NbModel nb = nb_fit(pca_project(pca, tr), train.labels);
        Evaluation ev = nb_evaluate(nb, pca_project(pca, te), test.labels);
        out.ga = ev.success;
        out.confusion = std::move(ev.confusion);
    }
    return out;
}

CaseResult run_case(const FeatureTable& table, SourceSelection selection, const ExperimentConfig& config) {
    validate(config);
    const int case_number = selection.case_number();
    const auto perms = static_cast<std::size_t>(config.permutations);
    const unsigned workers = config.worker_count();
    const auto outer = static_cast<unsigned>(std::min<std::size_t>(workers, perms));
    const unsigned inner = std::max(1U, workers / std::max(1U, outer));

    std::optional<Mask> fixed;
    if (config.has_stage(Stage::Ga) && config.mask_mode == MaskMode::Fixed) {
        try {
            fixed = run_permutation(table, selection, config, 0, nullptr, workers).ga_mask;
        } catch (...) {
            rethrow_with_context("case " + std::to_string(case_number) + " fixed-mask search (seed " +
                                 std::to_string(permutation_seed(config.seed, case_number, 0)) + "): ");
        }
    }

    std::vector<PermutationOutcome> outcomes(perms);
    parallel_for(perms, outer, [&](std::size_t p) {
        try {
            outcomes[p] = run_permutation(table, selection, config, static_cast<int>(p),
                                          fixed ? &*fixed : nullptr, inner);
        } catch (...) {
            rethrow_with_context("case " + std::to_string(case_number) + " permutation " + std::to_string(p) +
                                 " (seed " + std::to_string(permutation_seed(config.seed, case_number,
                                                                             static_cast<int>(p))) + "): ");
        }
    });

    CaseResult r;
    r.case_number = case_number;
    r.final_stage = config.final_stage();
    const auto cols = table.columns_for(selection);
    r.nf0 = cols.size();
    const auto collect = [&](auto member) {
        std::vector<double> v;
        v.reserve(perms);
        for (const auto& o : outcomes) {
            v.push_back(*(o.*member));
        }
        return summarize(v);
    };
    if (config.has_stage(Stage::Raw)) r.raw = collect(&PermutationOutcome::raw);
    if (config.has_stage(Stage::Pca)) r.pca = collect(&PermutationOutcome::pca);
    if (config.has_stage(Stage::Ga)) {
        r.ga = collect(&PermutationOutcome::ga);
        for (auto c : cols) {
            r.feature_names.push_back(table.names[static_cast<std::size_t>(c)]);
        }
        r.selection_frequency.assign(cols.size(), 0.0);
        double selected = 0.0;
        for (const auto& o : outcomes) {
            for (std::size_t i = 0; i < o.ga_mask.size(); ++i) {
                r.selection_frequency[i] += o.ga_mask[i];
            }
            selected += static_cast<double>(std::count(o.ga_mask.begin(), o.ga_mask.end(), std::uint8_t{1}));
        }
        for (double& f : r.selection_frequency) {
            f /= static_cast<double>(perms);
        }
        r.nf_ga = selected / static_cast<double>(perms);
    }
    r.confusion.classes = outcomes.front().confusion.classes;
    r.confusion.counts = Eigen::MatrixXd::Zero(outcomes.front().confusion.counts.rows(),
                                               outcomes.front().confusion.counts.cols());
    for (const auto& o : outcomes) {
        if (o.confusion.classes != r.confusion.classes) {
            throw DataError("case " + std::to_string(case_number) + ": class set changed between permutations");
        }
        r.confusion.counts += o.confusion.counts;
    }
    r.confusion.counts /= static_cast<double>(perms);
    return r;
}

FeatureTable obtain_features(const ExperimentConfig& config) {
    if (!config.cache.empty() && fs::exists(config.cache)) {
        if (config.verbose) {
            std::clog << "loading feature cache " << config.cache << '\n';
        }
        return read_feature_cache(config.cache);
    }
    if (config.dataset.empty()) {
        throw ConfigError("neither a dataset nor an existing feature cache was configured");
    }
    const auto samples = load_dataset(config.dataset);
    const std::uint64_t key = extraction_key(dataset_digest(samples), config.features);
    fs::path cache = config.cache;
    if (cache.empty()) {
        char name[64];
        std::snprintf(name, sizeof name, "features_%016llx.csv", static_cast<unsigned long long>(key));
        cache = config.output / name;
        if (fs::exists(cache)) {
            if (config.verbose) {
                std::clog << "loading feature cache " << cache << '\n';
            }
            return read_feature_cache(cache);
        }
    }
    if (config.verbose) {
        std::clog << "extracting features from " << samples.size() << " samples\n";
    }
    FeatureTable table = extract_features(samples, config.features, config.worker_count());
    write_feature_cache(cache, table);
    return table;
}

std::vector<CaseResult> run_experiment(const ExperimentConfig& config) {
    validate(config);
    fs::create_directories(config.output);
    const FeatureTable table = obtain_features(config);
    if (table.classes().size() < 2) {
        throw DataError("experiment needs at least two classes");
    }
    std::vector<CaseResult> results;
    for (int c : config.cases) {
        if (config.verbose) {
            std::clog << "case " << c << " (" << config.permutations << " permutations)\n";
        }
        results.push_back(run_case(table, SourceSelection::from_case(c), config));
    }
    write_results(config.output, results);
    return results;
}

namespace {

std::vector<std::string> csv_fields(const std::string& line) {
    std::vector<std::string> f;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        if (!cell.empty() && cell.back() == '\r') {
            cell.pop_back();
        }
        f.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        f.emplace_back();
    }
    return f;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write " + p.string());
    }
    return out;
}

std::string confusion_file_name(int case_number) {
    char name[32];
    std::snprintf(name, sizeof name, "confusion_case%02d.csv", case_number);
    return name;
}

} // namespace

void write_results(const fs::path& dir, const std::vector<CaseResult>& results) {
    fs::create_directories(dir);
    auto table = open_out(dir / "results.csv");
    auto full = open_out(dir / "results_full.csv");
    auto freq = open_out(dir / "selection_frequency.csv");
    table << kResultsHeader << '\n';
    full << kResultsHeader << ",final_stage\n";
    freq << "case,feature,frequency\n";
    for (const auto& r : results) {
        std::string flags;
        for (bool b : r.selection().table_flags()) {
            flags += b ? ",1" : ",0";
        }
        table << r.case_number << flags;
        full << r.case_number << flags;
        for (Stage s : {Stage::Raw, Stage::Pca, Stage::Ga}) {
            const auto& st = r.stage(s);
            if (st) {
                table << ',' << format_fixed(100.0 * st->mean, 2) << ',' << format_fixed(100.0 * st->sd, 2);
                full << ',' << format_exact(st->mean) << ',' << format_exact(st->sd);
            } else {
                table << ",,";
                full << ",,";
            }
        }
        table << ',' << r.nf0 << ',' << (r.nf_ga ? format_fixed(*r.nf_ga, 2) : std::string{}) << '\n';
        full << ',' << r.nf0 << ',' << (r.nf_ga ? format_exact(*r.nf_ga) : std::string{}) << ','
             << stage_name(r.final_stage) << '\n';

        auto conf = open_out(dir / confusion_file_name(r.case_number));
        conf << "true\\predicted";
        for (const auto& c : r.confusion.classes) {
            conf << ',' << c;
        }
        conf << '\n';
        for (std::size_t i = 0; i < r.confusion.classes.size(); ++i) {
            conf << r.confusion.classes[i];
            for (Eigen::Index j = 0; j < r.confusion.counts.cols(); ++j) {
                conf << ',' << format_exact(r.confusion.counts(static_cast<Eigen::Index>(i), j));
            }
            conf << '\n';
        }
        for (std::size_t i = 0; i < r.selection_frequency.size(); ++i) {
            freq << r.case_number << ',' << r.feature_names[i] << ',' << format_exact(r.selection_frequency[i])
                 << '\n';
        }
    }
}

std::vector<CaseResult> read_results(const fs::path& dir) {
    std::ifstream full(dir / "results_full.csv", std::ios::binary);
    if (!full) {
        throw ConfigError("no results_full.csv in " + dir.string());
    }
    std::string line;
    std::getline(full, line);
    if (line != std::string(kResultsHeader) + ",final_stage") {
        throw DataError("unexpected header in results_full.csv");
    }
    std::vector<CaseResult> results;
    std::map<int, std::size_t> by_case;
    while (std::getline(full, line)) {
        if (line.empty()) {
            continue;
        }
        const auto f = csv_fields(line);
        if (f.size() != 15) {
            throw DataError("results_full.csv: malformed row '" + line + "'");
        }
        CaseResult r;
        r.case_number = static_cast<int>(parse_double(f[0]));
        const auto flags = SourceSelection::from_case(r.case_number).table_flags();
        for (std::size_t i = 0; i < 5; ++i) {
            if ((f[1 + i] == "1") != flags[i]) {
                throw DataError("results_full.csv: flags disagree with case " + f[0]);
            }
        }
        const auto stage_at = [&](std::size_t col) -> std::optional<StageStats> {
            if (f[col].empty()) {
                return std::nullopt;
            }
            return StageStats{parse_double(f[col]), parse_double(f[col + 1])};
        };
        r.raw = stage_at(6);
        r.pca = stage_at(8);
        r.ga = stage_at(10);
        r.nf0 = static_cast<std::size_t>(parse_double(f[12]));
        if (!f[13].empty()) {
            r.nf_ga = parse_double(f[13]);
        }
        r.final_stage = parse_stage(f[14]);

        std::ifstream conf(dir / confusion_file_name(r.case_number), std::ios::binary);
        if (conf) {
            std::getline(conf, line);
            auto head = csv_fields(line);
            r.confusion.classes.assign(head.begin() + 1, head.end());
            const auto k = static_cast<Eigen::Index>(r.confusion.classes.size());
            r.confusion.counts = Eigen::MatrixXd::Zero(k, k);
            for (Eigen::Index i = 0; i < k && std::getline(conf, line); ++i) {
                const auto row = csv_fields(line);
                if (static_cast<Eigen::Index>(row.size()) != k + 1) {
                    throw DataError("malformed confusion matrix for case " + f[0]);
                }
                for (Eigen::Index j = 0; j < k; ++j) {
                    r.confusion.counts(i, j) = parse_double(row[static_cast<std::size_t>(j + 1)]);
                }
            }
        }
        by_case[r.case_number] = results.size();
        results.push_back(std::move(r));
    }

    std::ifstream freq(dir / "selection_frequency.csv", std::ios::binary);
    if (freq) {
        std::getline(freq, line);
        while (std::getline(freq, line)) {
            if (line.empty()) {
                continue;
            }
            const auto f = csv_fields(line);
            if (f.size() != 3) {
                throw DataError("selection_frequency.csv: malformed row '" + line + "'");
            }
            const auto it = by_case.find(static_cast<int>(parse_double(f[0])));
            if (it == by_case.end()) {
                throw DataError("selection_frequency.csv references unknown case " + f[0]);
            }
            auto& r = results[it->second];
            r.feature_names.push_back(f[1]);
            r.selection_frequency.push_back(parse_double(f[2]));
        }
    }
    return results;
}

} // namespace texcls
