#pragma once

#include <array>
#include <string>
#include <vector>

#include <texcls/pipeline.hpp>

namespace texcls {

/// Pearson coefficients between each source's inclusion indicator and the stage mean
/// success, ordered (Original, Variance, Entropy, Canny, Gaussian).
struct FilterCorrelations {
    Stage stage = Stage::Raw;
    std::array<double, 5> coefficients{};
};

inline constexpr std::array<Source, 5> kCorrelationOrder = {Source::Original, Source::Variance, Source::Entropy,
                                                            Source::Canny, Source::Gaussian};

/// Throws NumericalError with fewer than three cases, when any indicator or the
/// success column is constant, or when a case lacks the stage.
FilterCorrelations filter_correlations(const std::vector<CaseResult>& results, Stage stage);

struct RankedFeature {
    std::string name;
    double frequency = 0.0;
};

struct FeatureGroup {
    std::string key;          ///< f1..f13, maxp, cshade, cprom, tsq, fd, mle
    std::string display_name;
    double frequency = 0.0;   ///< mean selection frequency over all members
    std::size_t members = 0;
};

struct RelevanceReport {
    std::vector<RankedFeature> features; ///< descending frequency, ties by name
    std::vector<FeatureGroup> groups;    ///< descending frequency, ties by key
};

/// Ranks features by GA selection frequency averaged over the cases that ran the GA.
/// Throws ContractError if no case did.
RelevanceReport relevance_report(const std::vector<CaseResult>& results);

std::string format_correlations(const FilterCorrelations& c);
std::string format_relevance(const RelevanceReport& r, std::size_t top_features = 20);
std::string format_confusion(const CaseResult& r);

} // namespace texcls
