// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any fails.
// Criterion 8 needs the KTH-TIPS images under $TEXCLS_KTH_ROOT and is skipped otherwise.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <texcls/bayes.hpp>
#include <texcls/ga.hpp>
#include <texcls/glcm.hpp>
#include <texcls/pca.hpp>
#include <texcls/pipeline.hpp>
#include <texcls/report.hpp>
#include <texcls/texture_features.hpp>

#include "oracles.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using namespace texcls;
using Clock = std::chrono::steady_clock;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
    Verdict verdict = Verdict::Pass;
    std::string detail;
};

Outcome verdict(bool ok, std::string detail) { return {ok ? Verdict::Pass : Verdict::Fail, std::move(detail)}; }

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

bool close_rel(double a, double b, double tol) {
    return a == b || std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c, d);
    return buf;
}

Outcome glcm_oracle() {
    const auto start = Clock::now();
    Rng rng(1001);
    int mismatches = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto rows = 8 + uniform_below(rng, 25);
        const auto cols = 8 + uniform_below(rng, 25);
        const int levels = std::array{4, 8, 64}[uniform_below(rng, 3)];
        const auto q = synth::random_quantized(rows, cols, levels, rng);
        for (Direction d : kDirections) {
            const auto counts = cooccurrence_counts(q, d);
            const auto g = compute_glcm(q, d);
            const auto ref = oracle::glcm_counts(q, displacement(d).dr, displacement(d).dc);
            std::uint64_t total = 0;
            for (const auto& row : ref)
                for (auto v : row) total += v;
            for (int i = 0; i < levels; ++i) {
                for (int j = 0; j < levels; ++j) {
                    const auto expected = ref[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                    if (counts(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) != expected ||
                        g(i, j) != static_cast<double>(expected) / static_cast<double>(total)) {
                        ++mismatches;
                    }
                }
            }
        }
    }
    const double elapsed = seconds_since(start);
    return verdict(mismatches == 0 && elapsed < 5.0,
                   fmt("200 images x 4 directions, %.0f mismatching cells, %.2f s (limit 5 s)", mismatches, elapsed));
}

Outcome feature_oracle() {
    Rng rng(1002);
    double worst = 0.0;
    int failures = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto g = synth::random_glcm(rng);
        const auto f = glcm_features(g, 1.5);
        const auto ref = oracle::glcm_features(oracle::to_matrix(g), 1.5);
        for (std::size_t k = 0; k < kGlcmFeatureCount; ++k) {
            const double scale = std::max(std::abs(f[k]), std::abs(ref[k]));
            if (scale > 0) worst = std::max(worst, std::abs(f[k] - ref[k]) / scale);
            failures += close_rel(f[k], ref[k], 1e-10) ? 0 : 1;
        }
    }
    return verdict(failures == 0, fmt("100 GLCMs x 17 features, %.0f outside 1e-10, worst relative error %.2e",
                                      failures, worst));
}

Outcome degenerate_images() {
    int failures = 0;
    std::size_t values = 0;
    for (int levels : {4, 64, 256}) {
        for (std::size_t size : {24, 64}) {
            const QuantizedImage q{levels, Grid<std::uint16_t>(size, size, static_cast<std::uint16_t>(levels / 3))};
            const auto b = feature_block(q, 1.5);
            const auto flat = b.flatten();
            values += flat.size();
            failures += flat.size() == kBlockSize ? 0 : 1;
            for (double v : flat) failures += std::isfinite(v) ? 0 : 1;
            for (std::size_t r = 0; r < 5; ++r) {
                const auto& f = b.records[r];
                failures += f[0] == 1.0 ? 0 : 1;  // f1
                failures += f[1] == 0.0 ? 0 : 1;  // f2
                failures += f[2] == 0.0 ? 0 : 1;  // f3
                failures += f[4] == 1.0 ? 0 : 1;  // f5
                failures += f[8] == 0.0 ? 0 : 1;  // f9
                failures += f[13] == 1.0 ? 0 : 1; // maxp
                failures += f[14] == 0.0 ? 0 : 1; // cshade
                failures += f[15] == 0.0 ? 0 : 1; // cprom
                failures += f[16] == 0.0 ? 0 : 1; // tsq
            }
            failures += b.fd == 2.0 ? 0 : 1;
            failures += b.mle == 0.0 ? 0 : 1;
        }
    }
    return verdict(failures == 0,
                   fmt("6 constant images, %.0f block values checked, %.0f violations", static_cast<double>(values),
                       failures));
}

Eigen::MatrixXd covariance(const FeatureMatrix& x) {
    const FeatureMatrix c = x.rowwise() - x.colwise().mean();
    return c.transpose() * c / static_cast<double>(x.rows() - 1);
}

Outcome pca_checks() {
    Rng rng(1004);
    double worst_offdiag = 0.0;
    double worst_eigen = 0.0;
    double min_retained = 1.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto d = static_cast<Eigen::Index>(3 + uniform_below(rng, 10));
        const auto n = static_cast<Eigen::Index>(d + 5 + static_cast<Eigen::Index>(uniform_below(rng, 60)));
        const auto x = synth::anisotropic(rng, n, d);
        const auto m = pca_fit(x, 0.95);
        min_retained = std::min(min_retained, m.retained_variance);
        const Eigen::MatrixXd cov = covariance(pca_project(m, x));
        for (Eigen::Index i = 0; i < cov.rows(); ++i) {
            worst_eigen = std::max(worst_eigen, std::abs(cov(i, i) - m.eigenvalues(i)) / m.eigenvalues(i));
            for (Eigen::Index j = 0; j < cov.cols(); ++j) {
                if (i != j) worst_offdiag = std::max(worst_offdiag, std::abs(cov(i, j)));
            }
        }
        const auto ref = oracle::power_eigenvalues(covariance(x), static_cast<int>(m.dimension()));
        for (Eigen::Index k = 0; k < m.dimension(); ++k) {
            const double r = ref[static_cast<std::size_t>(k)];
            worst_eigen = std::max(worst_eigen, std::abs(m.eigenvalues(k) - r) / r);
        }
    }
    return verdict(worst_offdiag <= 1e-8 && worst_eigen <= 1e-8 && min_retained >= 0.95,
                   fmt("20 fits: max off-diagonal %.2e, max eigenvalue rel. error %.2e, min retained %.4f",
                       worst_offdiag, worst_eigen, min_retained));
}

Outcome bayes_checks() {
    Rng rng(1005);
    int agree = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto classes = static_cast<Eigen::Index>(2 + uniform_below(rng, 3));
        const auto features = static_cast<Eigen::Index>(1 + uniform_below(rng, 5));
        const auto rows = synth::random_classes(rng, classes, features, 3 + static_cast<Eigen::Index>(uniform_below(rng, 6)));
        const auto model = nb_fit(rows.x, rows.labels);
        Eigen::VectorXd x(features);
        for (Eigen::Index f = 0; f < features; ++f) x(f) = 5.0 * synth::normal(rng);
        agree += nb_predict_index(model, x) == oracle::nb_argmax(model, x) ? 1 : 0;
    }
    return verdict(agree == 1000, fmt("%.0f of 1000 argmax agreements", agree));
}

std::string history_bytes(const GaResult& r) {
    std::string out(r.best.mask.begin(), r.best.mask.end());
    for (const auto& g : r.history) {
        for (double v : {g.best, g.mean, g.smoothed_mean, g.best_ever}) {
            char raw[sizeof v];
            std::memcpy(raw, &v, sizeof v);
            out.append(raw, sizeof v);
        }
    }
    return out;
}

Outcome ga_checks() {
    bool monotone = true;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto noisy = [](std::span<const std::uint8_t> m) {
            Rng rng(derive_seed(31, std::hash<std::string>{}(std::string(m.begin(), m.end()))));
            return uniform01(rng);
        };
        GaConfig c;
        c.seed = seed;
        c.max_generations = 60;
        const auto r = ga_select(40, noisy, c);
        for (std::size_t g = 1; g < r.history.size(); ++g) {
            monotone = monotone && r.history[g].best_ever >= r.history[g - 1].best_ever;
        }
    }
    int recovered = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        GaConfig c;
        c.seed = seed;
        c.max_generations = 200;
        recovered += ga_select(12, synth::planted_fitness, c).best.mask == synth::planted_target() ? 1 : 0;
    }
    GaConfig c;
    c.seed = 2024;
    const auto a = history_bytes(ga_select(12, synth::planted_fitness, c));
    const auto b = history_bytes(ga_select(12, synth::planted_fitness, c));
    c.workers = 3;
    const auto d = history_bytes(ga_select(12, synth::planted_fitness, c));
    const bool deterministic = a == b && a == d;
    return verdict(monotone && recovered >= 18 && deterministic,
                   fmt("best-ever monotone %.0f, planted target recovered %.0f/20 (need 18), same seed identical %.0f",
                       monotone, recovered, deterministic));
}

FeatureTable desk_table() {
    const auto samples = synth::texture_dataset(40, 64, 2024);
    return extract_features(samples, FeatureConfig{}, 0);
}

Outcome desk_experiment(const FeatureTable& table) {
    const auto start = Clock::now();
    ExperimentConfig c;
    c.permutations = 50;
    c.seed = 1;
    c.workers = 0;
    c.stages = {Stage::Raw};
    const auto base = run_case(table, SourceSelection::from_case(1), c);
    c.stages = {Stage::Raw, Stage::Pca, Stage::Ga};
    const auto all = run_case(table, SourceSelection::from_case(31), c);
    const double elapsed = seconds_since(start);
    const double raw1 = base.raw->mean;
    const double ga31 = all.ga->mean;
    std::cout << "  case 1 raw " << format_fixed(100 * raw1, 2) << "%, case 31 raw "
              << format_fixed(100 * all.raw->mean, 2) << "% pca " << format_fixed(100 * all.pca->mean, 2) << "% ga "
              << format_fixed(100 * ga31, 2) << "% (" << format_fixed(*all.nf_ga, 1) << " of 520 features)\n";
    // Diagnostic only: the same splits scored through PCA with the two cluster-moment
    // groups masked out, whose variance dominates the unstandardized covariance.
    Mask no_cluster;
    for (const auto& name : feature_names(SourceSelection::from_case(31))) {
        const auto key = feature_key(name);
        no_cluster.push_back(key == "cshade" || key == "cprom" ? 0 : 1);
    }
    ExperimentConfig probe = c;
    probe.stages = {Stage::Ga};
    double masked = 0.0;
    for (int p = 0; p < probe.permutations; ++p) {
        masked += *run_permutation(table, SourceSelection::from_case(31), probe, p, &no_cluster, 1).ga;
    }
    masked /= probe.permutations;
    std::cout << "  diagnostic: case 31 pca without cluster shade/prominence columns "
              << format_fixed(100 * masked, 2) << "%\n";
    return verdict(ga31 >= raw1 + 0.05 && elapsed < 600.0,
                   fmt("mu_ga(case 31) %.4f vs mu_raw(case 1) %.4f + 0.05, %.0f s (limit 600 s)", ga31, raw1,
                       elapsed));
}

Outcome kth_reproduction() {
    const char* root = std::getenv("TEXCLS_KTH_ROOT");
    if (!root || !*root) {
        return {Verdict::Skip, "set TEXCLS_KTH_ROOT to the KTH-TIPS image root to run"};
    }
    const auto samples = load_dataset(root);
    const auto table = extract_features(samples, FeatureConfig{}, 0);
    ExperimentConfig c;
    c.permutations = 200;
    c.seed = 1;
    c.stages = {Stage::Raw};
    const double raw1 = run_case(table, SourceSelection::from_case(1), c).raw->mean;
    c.stages = {Stage::Pca, Stage::Ga};
    const auto r23 = run_case(table, SourceSelection::from_case(23), c);
    const bool range = raw1 >= 0.65 && raw1 <= 0.79;
    const bool order = r23.ga->mean > r23.pca->mean && r23.pca->mean > raw1;
    return verdict(range && order, fmt("case 1 raw %.4f in [0.65, 0.79]; case 23 ga %.4f > pca %.4f > %.4f", raw1,
                                       r23.ga->mean, r23.pca->mean, raw1));
}

std::vector<CaseResult> linear_results(const std::array<double, 5>& weights) {
    std::vector<CaseResult> out;
    for (int k = 1; k <= 31; ++k) {
        CaseResult r;
        r.case_number = k;
        double s = 0;
        for (std::size_t j = 0; j < 5; ++j)
            if (r.selection().has(kCorrelationOrder[j])) s += weights[j];
        r.raw = StageStats{s, 0.0};
        out.push_back(r);
    }
    return out;
}

Outcome correlation_fixture() {
    // Success linear in the five indicators over all 31 cases. Each indicator has
    // variance 240/961 and pairwise covariance -8/961, which fixes every coefficient.
    const std::array<double, 5> w = {0.30, 0.05, -0.12, 0.08, 0.15};
    const double v = 240.0 / 961.0;
    const double cv = -8.0 / 961.0;
    double sum = 0, sq = 0;
    for (double x : w) {
        sum += x;
        sq += x * x;
    }
    const double var_s = v * sq + cv * (sum * sum - sq);
    const auto got = filter_correlations(linear_results(w), Stage::Raw);
    double worst = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
        const double expected = (v * w[k] + cv * (sum - w[k])) / std::sqrt(v * var_s);
        worst = std::max(worst, std::abs(got.coefficients[k] - expected));
    }
    const auto equal = filter_correlations(linear_results({0.2, 0.2, 0.2, 0.2, 0.2}), Stage::Raw);
    for (double c : equal.coefficients) worst = std::max(worst, std::abs(c - std::sqrt(13.0 / 75.0)));
    return verdict(worst <= 1e-12, fmt("max deviation from closed form %.2e (limit 1e-12); KTH entropy sign not run",
                                       worst));
}

Outcome determinism(const FeatureTable& table) {
    const fs::path dir = fs::temp_directory_path() / "texcls_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    write_feature_cache(dir / "features.csv", table);
    std::vector<std::string> files;
    for (unsigned workers : {1U, 4U}) {
        ExperimentConfig c;
        c.cache = dir / "features.csv";
        c.output = dir / ("out" + std::to_string(workers));
        c.cases = {1, 6, 31};
        c.permutations = 6;
        c.seed = 77;
        c.ga.population = 16;
        c.ga.max_generations = 15;
        c.workers = workers;
        run_experiment(c);
        files.push_back(slurp(c.output / "results.csv") + slurp(c.output / "results_full.csv"));
    }
    const bool same = files[0] == files[1] && !files[0].empty();
    return verdict(same, fmt("workers 1 vs 4: result files %.0f bytes, identical %.0f",
                             static_cast<double>(files[0].size()), same));
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    std::optional<FeatureTable> table;
    const auto desk = [&]() -> const FeatureTable& {
        if (!table) table = desk_table();
        return *table;
    };
    const std::vector<Criterion> criteria = {
        {1, "GLCM oracle equivalence", glcm_oracle},
        {2, "feature oracle equivalence", feature_oracle},
        {3, "degenerate-image suite", degenerate_images},
        {4, "PCA checks", pca_checks},
        {5, "naive Bayes checks", bayes_checks},
        {6, "GA checks", ga_checks},
        {7, "desk-scale experiment", [&] { return desk_experiment(desk()); }},
        {8, "full-scale reproduction", kth_reproduction},
        {9, "filter-correlation fixture", correlation_fixture},
        {10, "determinism across worker counts", [&] { return determinism(desk()); }},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        const auto start = Clock::now();
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {Verdict::Fail, std::string("exception: ") + e.what()};
        }
        const char* tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Fail ? "FAIL" : "SKIP";
        failed += o.verdict == Verdict::Fail ? 1 : 0;
        std::cout << tag << " " << c.id << " " << c.name << ": " << o.detail << " [" << format_fixed(seconds_since(start), 1)
                  << " s]" << std::endl;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criterion/criteria failed") << '\n';
    return failed == 0 ? 0 : 1;
}
