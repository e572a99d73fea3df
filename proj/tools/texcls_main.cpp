// texcls: texture feature extraction, experiment sweeps and reports.

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>

#include <texcls/config.hpp>
#include <texcls/dataset.hpp>
#include <texcls/error.hpp>
#include <texcls/feature_table.hpp>
#include <texcls/pipeline.hpp>
#include <texcls/report.hpp>

namespace {

using namespace texcls;

int cmd_extract(const std::string& dataset, const std::string& out, int levels, const std::string& config_file,
                unsigned workers) {
    ExperimentConfig cfg = config_file.empty() ? ExperimentConfig{} : load_config(config_file);
    cfg.features.levels = levels;
    if (workers != 0) {
        cfg.workers = workers;
    }
    validate(cfg);
    const auto samples = load_dataset(dataset);
    std::clog << "extracting " << samples.size() << " samples\n";
    const FeatureTable table = extract_features(samples, cfg.features, cfg.worker_count());
    write_feature_cache(out, table);
    std::cout << "wrote " << table.ids.size() << " x " << table.names.size() << " features to " << out << '\n';
    return 0;
}

int cmd_experiment(const std::string& config_file, unsigned workers, bool quiet) {
    ExperimentConfig cfg = load_config(config_file);
    if (workers != 0) {
        cfg.workers = workers;
    }
    cfg.verbose = !quiet;
    const auto results = run_experiment(cfg);
    std::ifstream table(cfg.output / "results.csv");
    std::cout << table.rdbuf();
    std::clog << results.size() << " case(s) written to " << cfg.output << '\n';
    return 0;
}

int cmd_report(const std::string& kind, const std::string& dir, const std::string& stage, int case_number,
               std::size_t top) {
    const auto results = read_results(dir);
    if (results.empty()) {
        throw DataError("no cases in " + dir);
    }
    if (kind == "correlations") {
        std::cout << format_correlations(filter_correlations(results, parse_stage(stage)));
    } else if (kind == "relevance") {
        std::cout << format_relevance(relevance_report(results), top);
    } else {
        const CaseResult* chosen = nullptr;
        if (case_number > 0) {
            for (const auto& r : results) {
                if (r.case_number == case_number) {
                    chosen = &r;
                }
            }
            if (!chosen) {
                throw ConfigError("case " + std::to_string(case_number) + " not found in " + dir);
            }
        } else {
            // Best case by the final-stage mean.
            for (const auto& r : results) {
                const double m = r.stage(r.final_stage) ? r.stage(r.final_stage)->mean : -1.0;
                const double best = chosen && chosen->stage(chosen->final_stage)
                                        ? chosen->stage(chosen->final_stage)->mean
                                        : -1.0;
                if (!chosen || m > best) {
                    chosen = &r;
                }
            }
        }
        std::cout << format_confusion(*chosen);
    }
    return 0;
}

int cmd_classify(const std::string& cache, int case_number, std::uint64_t seed, const std::string& config_file,
                 const std::string& stages, unsigned workers) {
    ExperimentConfig cfg = config_file.empty() ? ExperimentConfig{} : load_config(config_file);
    cfg.seed = seed;
    if (!stages.empty()) {
        apply_config_key(cfg, "stages", stages);
    }
    if (workers != 0) {
        cfg.workers = workers;
    }
    validate(cfg);
    const FeatureTable table = read_feature_cache(cache);
    const auto out = run_permutation(table, SourceSelection::from_case(case_number), cfg, 0, nullptr,
                                     cfg.worker_count());
    std::cout << "case " << case_number << " seed " << seed << " (split seed " << out.seed << ")\n";
    if (out.raw) std::cout << "raw " << format_fixed(100.0 * *out.raw, 2) << "%\n";
    if (out.pca) std::cout << "pca " << format_fixed(100.0 * *out.pca, 2) << "%\n";
    if (out.ga) {
        std::cout << "ga  " << format_fixed(100.0 * *out.ga, 2) << "% ("
                  << std::count(out.ga_mask.begin(), out.ga_mask.end(), std::uint8_t{1}) << " of "
                  << out.ga_mask.size() << " features)\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Texture classification with GLCM features, naive Bayes, PCA and GA feature selection"};
    app.require_subcommand(1);

    std::string dataset, out, config_file, results_dir, cache, stages, stage = "raw", kind;
    int levels = 64;
    int case_number = 0;
    std::uint64_t seed = 0;
    unsigned workers = 0;
    std::size_t top = 20;
    bool quiet = false;

    auto* extract = app.add_subcommand("extract", "Extract the 520-feature table of a dataset into a cache file");
    extract->add_option("--dataset", dataset, "Dataset root (<root>/<class>/<image>) or manifest")->required();
    extract->add_option("--out", out, "Output feature cache (.csv)")->required();
    extract->add_option("--levels", levels, "Gray levels")->check(CLI::Range(2, 256));
    extract->add_option("--config", config_file, "Config file supplying filter/feature parameters");
    extract->add_option("--workers", workers, "Worker threads (0 = all cores)");

    auto* experiment = app.add_subcommand("experiment", "Run the case sweep described by a config file");
    experiment->add_option("--config", config_file, "key = value config file")->required();
    experiment->add_option("--workers", workers, "Override the worker count");
    experiment->add_flag("--quiet", quiet, "No progress output");

    auto* report = app.add_subcommand("report", "Summaries of an experiment's result directory");
    report->add_option("kind", kind, "correlations | relevance | confusion")
        ->required()
        ->check(CLI::IsMember({"correlations", "relevance", "confusion"}));
    report->add_option("--results", results_dir, "Experiment output directory")->required();
    report->add_option("--stage", stage, "Stage for correlations: raw | pca | ga");
    report->add_option("--case", case_number, "Case for the confusion matrix (default: best case)");
    report->add_option("--top", top, "Individual features listed by the relevance report");

    auto* classify = app.add_subcommand("classify", "Single seeded permutation of one case; prints success");
    classify->add_option("--cache", cache, "Feature cache written by extract")->required();
    classify->add_option("--case", case_number, "Case number 1..31")->required()->check(CLI::Range(1, 31));
    classify->add_option("--seed", seed, "Base seed")->required();
    classify->add_option("--config", config_file, "Optional config file (GA, PCA settings)");
    classify->add_option("--stages", stages, "Comma-separated subset of raw,pca,ga");
    classify->add_option("--workers", workers, "Worker threads (0 = all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*extract) return cmd_extract(dataset, out, levels, config_file, workers);
        if (*experiment) return cmd_experiment(config_file, workers, quiet);
        if (*report) return cmd_report(kind, results_dir, stage, case_number, top);
        if (*classify) return cmd_classify(cache, case_number, seed, config_file, stages, workers);
    } catch (const texcls::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
