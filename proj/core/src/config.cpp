#include <texcls/config.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <texcls/error.hpp>
#include <texcls/parallel.hpp>

namespace texcls {

namespace {

std::string_view trim(std::string_view s) noexcept {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(delim, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) {
            return out;
        }
        start = pos + 1;
    }
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
    T out{};
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("config key '" + std::string(key) + "': cannot parse '" + std::string(value) + "'");
    }
    return out;
}

std::filesystem::path resolve(std::string_view value, const std::filesystem::path& base) {
    std::filesystem::path p{std::string(value)};
    if (p.is_relative() && !base.empty()) {
        p = base / p;
    }
    return p;
}

const std::vector<std::string_view> kKeys = {
    "dataset",          "cache",           "output",          "cases",
    "permutations",     "train_fraction",  "inner_fraction",  "seed",
    "stages",           "pca.threshold",   "workers",         "levels",
    "tsallis.q",        "lyapunov.dimension", "lyapunov.delay", "lyapunov.horizon",
    "gaussian.sigma",   "canny.sigma",     "canny.low_ratio", "canny.high_percentile",
    "ga.population",    "ga.mutation_rate", "ga.elitism",     "ga.plateau_tol",
    "ga.max_generations", "ga.tournament", "ga.fitness_mode", "ga.mask_mode",
};

} // namespace

std::string_view stage_name(Stage s) noexcept {
    switch (s) {
    case Stage::Raw: return "raw";
    case Stage::Pca: return "pca";
    case Stage::Ga: return "ga";
    }
    return "?";
}

Stage parse_stage(std::string_view text) {
    if (text == "raw") return Stage::Raw;
    if (text == "pca") return Stage::Pca;
    if (text == "ga") return Stage::Ga;
    throw ConfigError("unknown stage '" + std::string(text) + "' (expected raw, pca or ga)");
}

ExperimentConfig::ExperimentConfig() {
    cases.resize(31);
    for (int i = 0; i < 31; ++i) {
        cases[static_cast<std::size_t>(i)] = i + 1;
    }
}

bool ExperimentConfig::has_stage(Stage s) const noexcept {
    return std::find(stages.begin(), stages.end(), s) != stages.end();
}

Stage ExperimentConfig::final_stage() const noexcept {
    if (has_stage(Stage::Ga)) return Stage::Ga;
    if (has_stage(Stage::Pca)) return Stage::Pca;
    return Stage::Raw;
}

unsigned ExperimentConfig::worker_count() const noexcept { return workers == 0 ? default_workers() : workers; }

const std::vector<std::string_view>& config_keys() noexcept { return kKeys; }

std::vector<int> parse_case_list(std::string_view text) {
    text = trim(text);
    if (text == "all") {
        return ExperimentConfig{}.cases;
    }
    std::set<int> seen;
    std::vector<int> out;
    for (auto part : split(text, ',')) {
        if (part.empty()) {
            throw ConfigError("empty entry in case list");
        }
        int lo = 0;
        int hi = 0;
        if (const auto dash = part.find('-'); dash != std::string_view::npos) {
            lo = parse_number<int>("cases", trim(part.substr(0, dash)));
            hi = parse_number<int>("cases", trim(part.substr(dash + 1)));
        } else {
            lo = hi = parse_number<int>("cases", part);
        }
        if (lo < 1 || hi > 31 || lo > hi) {
            throw ConfigError("case range '" + std::string(part) + "' outside 1..31");
        }
        for (int c = lo; c <= hi; ++c) {
            if (seen.insert(c).second) {
                out.push_back(c);
            }
        }
    }
    return out;
}

void apply_config_key(ExperimentConfig& c, std::string_view key, std::string_view value,
                      const std::filesystem::path& base) {
    if (key == "dataset") c.dataset = resolve(value, base);
    else if (key == "cache") c.cache = resolve(value, base);
    else if (key == "output") c.output = resolve(value, base);
    else if (key == "cases") c.cases = parse_case_list(value);
    else if (key == "permutations") c.permutations = parse_number<int>(key, value);
    else if (key == "train_fraction") c.train_fraction = parse_number<double>(key, value);
    else if (key == "inner_fraction") c.inner_fraction = parse_number<double>(key, value);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "stages") {
        c.stages.clear();
        for (auto s : split(value, ',')) {
            const Stage st = parse_stage(s);
            if (!c.has_stage(st)) {
                c.stages.push_back(st);
            }
        }
        std::sort(c.stages.begin(), c.stages.end());
    }
    else if (key == "pca.threshold") c.pca_threshold = parse_number<double>(key, value);
    else if (key == "workers") c.workers = parse_number<unsigned>(key, value);
    else if (key == "levels") c.features.levels = parse_number<int>(key, value);
    else if (key == "tsallis.q") c.features.tsallis_q = parse_number<double>(key, value);
    else if (key == "lyapunov.dimension") c.features.lyapunov.embedding_dimension = parse_number<int>(key, value);
    else if (key == "lyapunov.delay") c.features.lyapunov.delay = parse_number<int>(key, value);
    else if (key == "lyapunov.horizon") c.features.lyapunov.horizon = parse_number<int>(key, value);
    else if (key == "gaussian.sigma") c.features.filters.gaussian.sigma = parse_number<double>(key, value);
    else if (key == "canny.sigma") c.features.filters.canny.sigma = parse_number<double>(key, value);
    else if (key == "canny.low_ratio") c.features.filters.canny.low_ratio = parse_number<double>(key, value);
    else if (key == "canny.high_percentile") c.features.filters.canny.high_percentile = parse_number<double>(key, value);
    else if (key == "ga.population") c.ga.population = parse_number<int>(key, value);
    else if (key == "ga.mutation_rate") c.ga.mutation_rate = parse_number<double>(key, value);
    else if (key == "ga.elitism") c.ga.elitism = parse_number<int>(key, value);
    else if (key == "ga.plateau_tol") c.ga.plateau_tol = parse_number<double>(key, value);
    else if (key == "ga.max_generations") c.ga.max_generations = parse_number<int>(key, value);
    else if (key == "ga.tournament") c.ga.tournament = parse_number<int>(key, value);
    else if (key == "ga.fitness_mode") {
        if (value == "inner") c.fitness_mode = FitnessMode::Inner;
        else if (value == "paper-faithful") c.fitness_mode = FitnessMode::PaperFaithful;
        else throw ConfigError("ga.fitness_mode must be 'inner' or 'paper-faithful'");
    }
    else if (key == "ga.mask_mode") {
        if (value == "per-permutation") c.mask_mode = MaskMode::PerPermutation;
        else if (value == "fixed-mask") c.mask_mode = MaskMode::Fixed;
        else throw ConfigError("ga.mask_mode must be 'per-permutation' or 'fixed-mask'");
    }
    else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base) {
    ExperimentConfig c;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    std::set<std::string, std::less<>> seen;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (!seen.emplace(key).second) {
            throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'");
        }
        try {
            apply_config_key(c, key, value, base);
        } catch (...) {
            rethrow_with_context("config line " + std::to_string(line_no) + ": ");
        }
    }
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw ConfigError("cannot open config file " + file.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), file.parent_path());
}

void validate(const ExperimentConfig& c) {
    if (c.permutations < 1) throw ConfigError("permutations must be >= 1");
    if (c.cases.empty()) throw ConfigError("no cases selected");
    for (int k : c.cases) {
        if (k < 1 || k > 31) throw ConfigError("case numbers must lie in 1..31");
    }
    if (c.stages.empty()) throw ConfigError("stages must not be empty");
    if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0)) throw ConfigError("train_fraction must lie in (0, 1)");
    if (!(c.inner_fraction > 0.0 && c.inner_fraction < 1.0)) throw ConfigError("inner_fraction must lie in (0, 1)");
    if (!(c.pca_threshold > 0.0 && c.pca_threshold <= 1.0)) throw ConfigError("pca.threshold must lie in (0, 1]");
    if (c.features.levels < 2 || c.features.levels > 256) throw ConfigError("levels must lie in [2, 256]");
    if (c.features.tsallis_q == 1.0) throw ConfigError("tsallis.q must differ from 1");
    validate(c.ga);
}

} // namespace texcls
