#include <texcls/report.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <texcls/error.hpp>

namespace texcls {

namespace {

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

} // namespace

FilterCorrelations filter_correlations(const std::vector<CaseResult>& results, Stage stage) {
    if (results.size() < 3) {
        throw NumericalError("filter correlations need at least three cases");
    }
    std::vector<double> success;
    for (const auto& r : results) {
        const auto& st = r.stage(stage);
        if (!st) {
            throw NumericalError("case " + std::to_string(r.case_number) + " has no " +
                                 std::string(stage_name(stage)) + " stage");
        }
        success.push_back(st->mean);
    }
    const auto [lo, hi] = std::minmax_element(success.begin(), success.end());
    if (*lo == *hi) {
        throw NumericalError("success column is constant; correlation undefined");
    }
    FilterCorrelations out;
    out.stage = stage;
    for (std::size_t k = 0; k < kCorrelationOrder.size(); ++k) {
        std::vector<double> indicator;
        for (const auto& r : results) {
            indicator.push_back(r.selection().has(kCorrelationOrder[k]) ? 1.0 : 0.0);
        }
        if (std::all_of(indicator.begin(), indicator.end(), [&](double v) { return v == indicator.front(); })) {
            throw NumericalError("source '" + std::string(source_prefix(kCorrelationOrder[k])) +
                                 "' is included in every case or in none; correlation undefined");
        }
        out.coefficients[k] = pearson(indicator, success);
    }
    return out;
}

RelevanceReport relevance_report(const std::vector<CaseResult>& results) {
    std::map<std::string, std::pair<double, std::size_t>> per_feature;
    std::size_t ga_cases = 0;
    for (const auto& r : results) {
        if (r.selection_frequency.empty()) {
            continue;
        }
        ++ga_cases;
        for (std::size_t i = 0; i < r.selection_frequency.size(); ++i) {
            auto& [sum, n] = per_feature[r.feature_names[i]];
            sum += r.selection_frequency[i];
            ++n;
        }
    }
    if (ga_cases == 0) {
        throw ContractError("relevance report needs at least one case with the ga stage");
    }
    RelevanceReport rep;
    std::map<std::string, std::pair<double, std::size_t>> per_group;
    for (const auto& [name, acc] : per_feature) {
        rep.features.push_back({name, acc.first / static_cast<double>(acc.second)});
        auto& [gsum, gn] = per_group[std::string(feature_key(name))];
        gsum += acc.first;
        gn += acc.second;
    }
    for (const auto& [key, acc] : per_group) {
        rep.groups.push_back({key, std::string(feature_display_name(key)), acc.first / static_cast<double>(acc.second),
                              acc.second});
    }
    std::stable_sort(rep.features.begin(), rep.features.end(),
                     [](const auto& a, const auto& b) { return a.frequency > b.frequency; });
    std::stable_sort(rep.groups.begin(), rep.groups.end(),
                     [](const auto& a, const auto& b) { return a.frequency > b.frequency; });
    return rep;
}

std::string format_correlations(const FilterCorrelations& c) {
    static constexpr const char* kNames[] = {"Original", "Variance", "Entropy", "Canny", "Gaussian"};
    std::ostringstream out;
    out << "source,correlation_percent (stage " << stage_name(c.stage) << ")\n";
    for (std::size_t k = 0; k < c.coefficients.size(); ++k) {
        out << kNames[k] << ',' << format_fixed(100.0 * c.coefficients[k], 2) << '\n';
    }
    return out.str();
}

std::string format_relevance(const RelevanceReport& r, std::size_t top_features) {
    std::ostringstream out;
    out << "rank,group,name,mean_selection_frequency\n";
    for (std::size_t i = 0; i < r.groups.size(); ++i) {
        const auto& g = r.groups[i];
        out << i + 1 << ',' << g.key << ',' << g.display_name << ',' << format_fixed(g.frequency, 4) << '\n';
    }
    out << "\nrank,feature,selection_frequency\n";
    for (std::size_t i = 0; i < std::min(top_features, r.features.size()); ++i) {
        out << i + 1 << ',' << r.features[i].name << ',' << format_fixed(r.features[i].frequency, 4) << '\n';
    }
    return out.str();
}

std::string format_confusion(const CaseResult& r) {
    std::ostringstream out;
    out << "case " << r.case_number << ", stage " << stage_name(r.final_stage)
        << " (rows: true class, columns: predicted; averaged absolute counts)\n";
    out << "true\\predicted";
    for (const auto& c : r.confusion.classes) {
        out << ',' << c;
    }
    out << '\n';
    for (std::size_t i = 0; i < r.confusion.classes.size(); ++i) {
        out << r.confusion.classes[i];
        for (Eigen::Index j = 0; j < r.confusion.counts.cols(); ++j) {
            out << ',' << format_fixed(r.confusion.counts(static_cast<Eigen::Index>(i), j), 2);
        }
        out << '\n';
    }
    return out.str();
}

} // namespace texcls
