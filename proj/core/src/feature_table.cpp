#include <texcls/feature_table.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <texcls/error.hpp>
#include <texcls/parallel.hpp>
#include <texcls/rng.hpp>

namespace texcls {

std::vector<Eigen::Index> FeatureTable::columns_for(SourceSelection selection) const {
    std::vector<std::string> prefixes;
    for (Source s : selection.sources()) {
        prefixes.push_back(std::string(source_prefix(s)) + ".");
    }
    std::vector<Eigen::Index> cols;
    for (std::size_t i = 0; i < names.size(); ++i) {
        for (const auto& p : prefixes) {
            if (names[i].starts_with(p)) {
                cols.push_back(static_cast<Eigen::Index>(i));
                break;
            }
        }
    }
    return cols;
}

std::vector<std::string> FeatureTable::classes() const {
    const std::set<std::string> s(labels.begin(), labels.end());
    return {s.begin(), s.end()};
}

FeatureTable extract_features(std::span<const ImageSample> samples, const FeatureConfig& config, unsigned workers) {
    FeatureTable table;
    table.names = feature_names(SourceSelection::all());
    table.values.resize(static_cast<Eigen::Index>(samples.size()), static_cast<Eigen::Index>(table.names.size()));
    for (const auto& s : samples) {
        table.ids.push_back(s.id);
        table.labels.push_back(s.label);
    }
    parallel_for(samples.size(), workers, [&](std::size_t i) {
        try {
            const FeatureVector fv = feature_vector(samples[i], SourceSelection::all(), config);
            for (std::size_t j = 0; j < fv.values.size(); ++j) {
                table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = fv.values[j];
            }
        } catch (...) {
            rethrow_with_context("sample " + samples[i].id + ": ");
        }
    });
    return table;
}

std::uint64_t extraction_key(std::uint64_t dataset_digest, const FeatureConfig& c) {
    Fnv1a h;
    h.update("texcls-features-v1");
    h.update_u64(dataset_digest);
    h.update_u64(static_cast<std::uint64_t>(c.levels));
    h.update_double(c.tsallis_q);
    h.update_u64(static_cast<std::uint64_t>(c.lyapunov.embedding_dimension));
    h.update_u64(static_cast<std::uint64_t>(c.lyapunov.delay));
    h.update_u64(static_cast<std::uint64_t>(c.lyapunov.horizon));
    h.update_double(c.filters.gaussian.sigma);
    h.update_double(c.filters.canny.sigma);
    h.update_double(c.filters.canny.high_percentile);
    h.update_double(c.filters.canny.low_ratio);
    return h.digest();
}

std::string format_exact(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string format_fixed(double v, int decimals) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
    std::string s(buf, ptr);
    if (s.starts_with('-') && s.find_first_not_of("-0.") == std::string::npos) {
        s.erase(0, 1); // no "-0.00"
    }
    return s;
}

double parse_double(std::string_view text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw DataError("cannot parse number '" + std::string(text) + "'");
    }
    return v;
}

void write_feature_cache(const std::filesystem::path& file, const FeatureTable& t) {
    if (file.has_parent_path()) {
        std::filesystem::create_directories(file.parent_path());
    }
    std::ofstream out(file, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write feature cache " + file.string());
    }
    out << "id,label";
    for (const auto& n : t.names) {
        out << ',' << n;
    }
    out << '\n';
    for (std::size_t r = 0; r < t.ids.size(); ++r) {
        out << t.ids[r] << ',' << t.labels[r];
        for (Eigen::Index c = 0; c < t.values.cols(); ++c) {
            out << ',' << format_exact(t.values(static_cast<Eigen::Index>(r), c));
        }
        out << '\n';
    }
    if (!out) {
        throw ConfigError("failed writing feature cache " + file.string());
    }
}

FeatureTable read_feature_cache(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open feature cache " + file.string());
    }
    const auto fields = [](const std::string& line) {
        std::vector<std::string> f;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) {
            if (!cell.empty() && cell.back() == '\r') {
                cell.pop_back();
            }
            f.push_back(cell);
        }
        return f;
    };
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("feature cache " + file.string() + " is empty");
    }
    auto header = fields(line);
    if (header.size() < 3 || header[0] != "id" || header[1] != "label") {
        throw DataError("feature cache " + file.string() + ": header must start with id,label");
    }
    FeatureTable t;
    t.names.assign(header.begin() + 2, header.end());
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        auto f = fields(line);
        if (f.size() != header.size()) {
            throw DataError("feature cache " + file.string() + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
        }
        t.ids.push_back(f[0]);
        t.labels.push_back(f[1]);
        std::vector<double> row(t.names.size());
        for (std::size_t j = 0; j < row.size(); ++j) {
            row[j] = parse_double(f[j + 2]);
            if (!std::isfinite(row[j])) {
                throw DataError("feature cache: non-finite " + t.names[j] + " for " + f[0]);
            }
        }
        rows.push_back(std::move(row));
    }
    t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.names.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            t.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return t;
}

} // namespace texcls
