#include <texcls/filters.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include <texcls/error.hpp>

namespace texcls {

std::string_view source_prefix(Source s) noexcept {
    switch (s) {
    case Source::Original: return "orig";
    case Source::Gaussian: return "gauss";
    case Source::Canny: return "canny";
    case Source::Entropy: return "entropy";
    case Source::Variance: return "var";
    }
    return "?";
}

namespace {

// Bit position of each source in the case number.
constexpr int source_bit(Source s) noexcept {
    switch (s) {
    case Source::Original: return 0;
    case Source::Gaussian: return 1;
    case Source::Canny: return 2;
    case Source::Entropy: return 3;
    case Source::Variance: return 4;
    }
    return 0;
}

} // namespace

SourceSelection SourceSelection::from_case(int case_number) {
    if (case_number < 1 || case_number > 31) {
        throw ParameterError("case number must be in 1..31, got " + std::to_string(case_number));
    }
    return SourceSelection(case_number);
}

bool SourceSelection::has(Source s) const noexcept { return (bits_ >> source_bit(s)) & 1; }

int SourceSelection::count() const noexcept { return std::popcount(static_cast<unsigned>(bits_)); }

std::vector<Source> SourceSelection::sources() const {
    std::vector<Source> out;
    for (Source s : kAllSources) {
        if (has(s)) {
            out.push_back(s);
        }
    }
    return out;
}

std::array<bool, 5> SourceSelection::table_flags() const noexcept {
    return {has(Source::Variance), has(Source::Entropy), has(Source::Canny), has(Source::Gaussian),
            has(Source::Original)};
}

std::vector<double> gaussian_kernel(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw ParameterError("gaussian sigma must be positive");
    }
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
        k[static_cast<std::size_t>(i + radius)] = v;
        sum += v;
    }
    for (double& v : k) {
        v /= sum;
    }
    return k;
}

namespace {

IntensityGrid separable_blur(const IntensityGrid& img, const std::vector<double>& k) {
    const auto radius = static_cast<std::ptrdiff_t>(k.size() / 2);
    const auto rows = static_cast<std::ptrdiff_t>(img.rows());
    const auto cols = static_cast<std::ptrdiff_t>(img.cols());
    IntensityGrid tmp(img.rows(), img.cols());
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
        for (std::ptrdiff_t c = 0; c < cols; ++c) {
            double acc = 0.0;
            for (std::ptrdiff_t d = -radius; d <= radius; ++d) {
                acc += k[static_cast<std::size_t>(d + radius)] * img.clamped(r, c + d);
            }
            tmp(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = acc;
        }
    }
    IntensityGrid out(img.rows(), img.cols());
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
        for (std::ptrdiff_t c = 0; c < cols; ++c) {
            double acc = 0.0;
            for (std::ptrdiff_t d = -radius; d <= radius; ++d) {
                acc += k[static_cast<std::size_t>(d + radius)] * tmp.clamped(r + d, c);
            }
            out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = acc;
        }
    }
    return out;
}

void require_image(const IntensityGrid& img, const char* op) {
    if (img.empty()) {
        throw DataError(std::string(op) + ": empty image");
    }
}

} // namespace

IntensityGrid gaussian_filter(const IntensityGrid& img, const GaussianParams& params) {
    require_image(img, "gaussian_filter");
    IntensityGrid out = separable_blur(img, gaussian_kernel(params.sigma));
    for (double& v : out.values()) {
        v = std::clamp(v, 0.0, 1.0);
    }
    return out;
}

Gradient sobel_gradient(const IntensityGrid& img) {
    require_image(img, "sobel_gradient");
    Gradient g{IntensityGrid(img.rows(), img.cols()), Grid<std::uint8_t>(img.rows(), img.cols())};
    const auto rows = static_cast<std::ptrdiff_t>(img.rows());
    const auto cols = static_cast<std::ptrdiff_t>(img.cols());
    constexpr double kPi8 = std::numbers::pi / 8.0;
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
        for (std::ptrdiff_t c = 0; c < cols; ++c) {
            const auto p = [&](std::ptrdiff_t dr, std::ptrdiff_t dc) { return img.clamped(r + dr, c + dc); };
            const double gx = (p(-1, 1) + 2 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2 * p(0, -1) + p(1, -1));
            const double gy = (p(1, -1) + 2 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2 * p(-1, 0) + p(-1, 1));
            const auto ur = static_cast<std::size_t>(r);
            const auto uc = static_cast<std::size_t>(c);
            g.magnitude(ur, uc) = std::hypot(gx, gy);
            // Fold the angle into [0, pi) and bin into four 45-degree sectors.
            double theta = std::atan2(gy, gx);
            if (theta < 0) {
                theta += std::numbers::pi;
            }
            std::uint8_t sector = 0;
            if (theta >= kPi8 && theta < 3 * kPi8) {
                sector = 1;
            } else if (theta >= 3 * kPi8 && theta < 5 * kPi8) {
                sector = 2;
            } else if (theta >= 5 * kPi8 && theta < 7 * kPi8) {
                sector = 3;
            }
            g.sector(ur, uc) = sector;
        }
    }
    return g;
}

IntensityGrid non_maximum_suppression(const Gradient& g) {
    const auto rows = static_cast<std::ptrdiff_t>(g.magnitude.rows());
    const auto cols = static_cast<std::ptrdiff_t>(g.magnitude.cols());
    IntensityGrid out(g.magnitude.rows(), g.magnitude.cols(), 0.0);
    // Step along the gradient for each sector (row axis points down).
    constexpr std::ptrdiff_t step[4][2] = {{0, 1}, {1, 1}, {1, 0}, {1, -1}};
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
        for (std::ptrdiff_t c = 0; c < cols; ++c) {
            const auto ur = static_cast<std::size_t>(r);
            const auto uc = static_cast<std::size_t>(c);
            const double m = g.magnitude(ur, uc);
            if (m <= 0.0) {
                continue;
            }
            const auto* s = step[g.sector(ur, uc)];
            const double behind = g.magnitude.clamped(r - s[0], c - s[1]);
            const double ahead = g.magnitude.clamped(r + s[0], c + s[1]);
            // Strict on one side so plateaus of equal magnitude keep a single pixel.
            if (m > behind && m >= ahead) {
                out(ur, uc) = m;
            }
        }
    }
    return out;
}

Grid<std::uint8_t> hysteresis(const IntensityGrid& thinned, double low, double high) {
    const auto rows = static_cast<std::ptrdiff_t>(thinned.rows());
    const auto cols = static_cast<std::ptrdiff_t>(thinned.cols());
    Grid<std::uint8_t> edges(thinned.rows(), thinned.cols(), 0);
    std::vector<std::pair<std::ptrdiff_t, std::ptrdiff_t>> stack;
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
        for (std::ptrdiff_t c = 0; c < cols; ++c) {
            const double m = thinned(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
            if (m > 0.0 && m >= high && !edges(static_cast<std::size_t>(r), static_cast<std::size_t>(c))) {
                edges(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = 1;
                stack.emplace_back(r, c);
                while (!stack.empty()) {
                    const auto [pr, pc] = stack.back();
                    stack.pop_back();
                    for (std::ptrdiff_t dr = -1; dr <= 1; ++dr) {
                        for (std::ptrdiff_t dc = -1; dc <= 1; ++dc) {
                            const std::ptrdiff_t nr = pr + dr;
                            const std::ptrdiff_t nc = pc + dc;
                            if (nr < 0 || nc < 0 || nr >= rows || nc >= cols) {
                                continue;
                            }
                            const auto ur = static_cast<std::size_t>(nr);
                            const auto uc = static_cast<std::size_t>(nc);
                            const double nm = thinned(ur, uc);
                            if (!edges(ur, uc) && nm > 0.0 && nm >= low) {
                                edges(ur, uc) = 1;
                                stack.emplace_back(nr, nc);
                            }
                        }
                    }
                }
            }
        }
    }
    return edges;
}

Grid<std::uint8_t> canny_filter(const IntensityGrid& img, const CannyParams& params) {
    require_image(img, "canny_filter");
    if (!(params.high_percentile > 0.0 && params.high_percentile <= 1.0)) {
        throw ParameterError("canny.high_percentile must lie in (0, 1]");
    }
    if (!(params.low_ratio > 0.0 && params.low_ratio <= 1.0)) {
        throw ParameterError("canny.low_ratio must lie in (0, 1]");
    }
    const IntensityGrid smooth = separable_blur(img, gaussian_kernel(params.sigma));
    const Gradient grad = sobel_gradient(smooth);

    std::vector<double> mags(grad.magnitude.values().begin(), grad.magnitude.values().end());
    const auto rank = static_cast<std::size_t>(
        std::clamp(std::ceil(params.high_percentile * static_cast<double>(mags.size())) - 1.0, 0.0,
                   static_cast<double>(mags.size() - 1)));
    std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(rank), mags.end());
    const double high = mags[rank];
    const double low = params.low_ratio * high;
    return hysteresis(non_maximum_suppression(grad), low, high);
}

IntensityGrid entropy_filter(const QuantizedImage& q) {
    if (q.data.empty()) {
        throw DataError("entropy_filter: empty image");
    }
    if (q.levels < 2) {
        throw ParameterError("entropy_filter: levels must be >= 2");
    }
    constexpr std::ptrdiff_t kRadius = 4;
    constexpr int kWindow = 81;
    std::array<double, kWindow + 1> term{};
    for (int n = 1; n <= kWindow; ++n) {
        const double p = static_cast<double>(n) / kWindow;
        term[static_cast<std::size_t>(n)] = -p * std::log2(p);
    }
    const double scale = 1.0 / std::log2(static_cast<double>(q.levels));
    const auto rows = static_cast<std::ptrdiff_t>(q.data.rows());
    const auto cols = static_cast<std::ptrdiff_t>(q.data.cols());
    IntensityGrid out(q.data.rows(), q.data.cols());
    std::vector<int> hist(static_cast<std::size_t>(q.levels));
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
        std::fill(hist.begin(), hist.end(), 0);
        for (std::ptrdiff_t dr = -kRadius; dr <= kRadius; ++dr) {
            for (std::ptrdiff_t dc = -kRadius; dc <= kRadius; ++dc) {
                ++hist[q.data.clamped(r + dr, dc)];
            }
        }
        for (std::ptrdiff_t c = 0; c < cols; ++c) {
            if (c > 0) {
                for (std::ptrdiff_t dr = -kRadius; dr <= kRadius; ++dr) {
                    --hist[q.data.clamped(r + dr, c - kRadius - 1)];
                    ++hist[q.data.clamped(r + dr, c + kRadius)];
                }
            }
            double h = 0.0;
            for (int n : hist) {
                h += term[static_cast<std::size_t>(n)];
            }
            out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = std::clamp(h * scale, 0.0, 1.0);
        }
    }
    return out;
}

IntensityGrid variance_filter(const IntensityGrid& img) {
    require_image(img, "variance_filter");
    const auto rows = static_cast<std::ptrdiff_t>(img.rows());
    const auto cols = static_cast<std::ptrdiff_t>(img.cols());
    IntensityGrid out(img.rows(), img.cols());
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
        for (std::ptrdiff_t c = 0; c < cols; ++c) {
            // Offsets from the centre value keep flat windows at exactly zero.
            const double centre = img.clamped(r, c);
            double window[9];
            double mean = 0.0;
            int n = 0;
            for (std::ptrdiff_t dr = -1; dr <= 1; ++dr) {
                for (std::ptrdiff_t dc = -1; dc <= 1; ++dc) {
                    window[n] = img.clamped(r + dr, c + dc) - centre;
                    mean += window[n++];
                }
            }
            mean /= 9.0;
            double var = 0.0;
            for (double v : window) {
                var += (v - mean) * (v - mean);
            }
            var /= 9.0;
            out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = std::clamp(var / 0.25, 0.0, 1.0);
        }
    }
    return out;
}

std::vector<FilteredSource> apply_filter_bank(const ImageSample& sample, SourceSelection selection, int levels,
                                              const FilterParams& params) {
    validate_sample(sample);
    const QuantizedImage original = quantize(sample.pixels, levels);
    std::vector<FilteredSource> out;
    for (Source s : selection.sources()) {
        switch (s) {
        case Source::Original:
            out.push_back({s, original});
            break;
        case Source::Gaussian:
            out.push_back({s, quantize(gaussian_filter(sample.pixels, params.gaussian), levels)});
            break;
        case Source::Canny: {
            const auto edges = canny_filter(sample.pixels, params.canny);
            QuantizedImage q{levels, Grid<std::uint16_t>(edges.rows(), edges.cols())};
            for (std::size_t i = 0; i < edges.size(); ++i) {
                q.data.values()[i] = edges.values()[i] ? static_cast<std::uint16_t>(levels - 1) : 0;
            }
            out.push_back({s, std::move(q)});
            break;
        }
        case Source::Entropy:
            out.push_back({s, quantize(entropy_filter(original), levels)});
            break;
        case Source::Variance:
            out.push_back({s, quantize(variance_filter(sample.pixels), levels)});
            break;
        }
    }
    return out;
}

} // namespace texcls
