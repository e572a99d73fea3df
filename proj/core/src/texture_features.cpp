#include <texcls/texture_features.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <texcls/error.hpp>

namespace texcls {

namespace {

constexpr std::array<std::string_view, kGlcmFeatureCount> kKeys = {
    "f1", "f2", "f3", "f4", "f5", "f6", "f7", "f8", "f9", "f10", "f11", "f12", "f13",
    "maxp", "cshade", "cprom", "tsq"};

constexpr std::array<std::string_view, 6> kVariants = {"d0", "d45", "d90", "d135", "avg", "rng"};

constexpr double kTinyDenominator = 1e-15;

double plogp(double p) noexcept { return p > 0.0 ? p * std::log(p) : 0.0; }

} // namespace

const std::array<std::string_view, kGlcmFeatureCount>& glcm_feature_keys() noexcept { return kKeys; }

std::string_view feature_display_name(std::string_view key) noexcept {
    struct Entry {
        std::string_view key, name;
    };
    static constexpr Entry kNames[] = {
        {"f1", "angular second moment"},
        {"f2", "contrast"},
        {"f3", "correlation"},
        {"f4", "sum of squares variance"},
        {"f5", "local homogeneity (inverse difference moment)"},
        {"f6", "sum average"},
        {"f7", "sum variance"},
        {"f8", "sum entropy"},
        {"f9", "entropy"},
        {"f10", "difference variance"},
        {"f11", "difference entropy"},
        {"f12", "information measure of correlation I"},
        {"f13", "information measure of correlation II"},
        {"maxp", "maximum probability"},
        {"cshade", "cluster shade"},
        {"cprom", "cluster prominence"},
        {"tsq", "Tsallis entropy"},
        {"fd", "fractal dimension"},
        {"mle", "maximum Lyapunov exponent"},
    };
    for (const auto& e : kNames) {
        if (e.key == key) {
            return e.name;
        }
    }
    return key;
}

void haralick_features(const Glcm& g, const GlcmMarginals& m, GlcmFeatures& out) {
    const int L = g.levels;
    double asm_ = 0, sum_ij = 0, sum_sq = 0, idm = 0;
    for (int i = 0; i < L; ++i) {
        for (int j = 0; j < L; ++j) {
            const double p = g(i, j);
            if (p == 0.0) {
                continue;
            }
            asm_ += p * p;
            sum_ij += static_cast<double>(i) * j * p;
            sum_sq += (i - m.mean_x) * (i - m.mean_x) * p;
            idm += p / (1.0 + static_cast<double>((i - j) * (i - j)));
        }
    }
    double contrast = 0, diff_mean = 0, diff_entropy = 0;
    for (std::size_t k = 0; k < m.p_diff.size(); ++k) {
        const double kd = static_cast<double>(k);
        contrast += kd * kd * m.p_diff[k];
        diff_mean += kd * m.p_diff[k];
        diff_entropy -= plogp(m.p_diff[k]);
    }
    double diff_var = 0;
    for (std::size_t k = 0; k < m.p_diff.size(); ++k) {
        const double d = static_cast<double>(k) - diff_mean;
        diff_var += d * d * m.p_diff[k];
    }
    double sum_avg = 0, sum_entropy = 0;
    for (std::size_t k = 0; k < m.p_sum.size(); ++k) {
        sum_avg += static_cast<double>(k) * m.p_sum[k];
        sum_entropy -= plogp(m.p_sum[k]);
    }
    double sum_var = 0;
    for (std::size_t k = 0; k < m.p_sum.size(); ++k) {
        const double d = static_cast<double>(k) - sum_avg;
        sum_var += d * d * m.p_sum[k];
    }

    double correlation = 0.0;
    const double sxy = m.std_x * m.std_y;
    if (sxy > kTinyDenominator) {
        correlation = (sum_ij - m.mean_x * m.mean_y) / sxy;
    } else {
        out.singular = true;
    }
    double imc1 = 0.0;
    const double hmax = std::max(m.hx, m.hy);
    if (hmax > kTinyDenominator) {
        imc1 = (m.hxy - m.hxy1) / hmax;
    } else {
        out.singular = true;
    }
    const double imc2 = std::sqrt(std::max(0.0, 1.0 - std::exp(-2.0 * std::max(0.0, m.hxy2 - m.hxy))));

    out[0] = asm_;
    out[1] = contrast;
    out[2] = correlation;
    out[3] = sum_sq;
    out[4] = idm;
    out[5] = sum_avg;
    out[6] = sum_var;
    out[7] = sum_entropy;
    out[8] = m.hxy;
    out[9] = diff_var;
    out[10] = diff_entropy;
    out[11] = imc1;
    out[12] = imc2;
}

ExtraFeatures extra_glcm_features(const Glcm& g, const GlcmMarginals& m, double tsallis_q) {
    if (!std::isfinite(tsallis_q) || tsallis_q == 1.0) {
        throw ParameterError("Tsallis order q must be finite and different from 1");
    }
    ExtraFeatures e;
    double sum_pq = 0.0;
    const double centre = m.mean_x + m.mean_y;
    for (int i = 0; i < g.levels; ++i) {
        for (int j = 0; j < g.levels; ++j) {
            const double p = g(i, j);
            if (p == 0.0) {
                continue;
            }
            e.maxp = std::max(e.maxp, p);
            const double d = i + j - centre;
            const double d3 = d * d * d;
            e.cshade += d3 * p;
            e.cprom += d3 * d * p;
            sum_pq += std::pow(p, tsallis_q);
        }
    }
    e.tsq = (1.0 - sum_pq) / (tsallis_q - 1.0);
    return e;
}

GlcmFeatures glcm_features(const Glcm& g, double tsallis_q) {
    const GlcmMarginals m = marginals(g);
    GlcmFeatures f;
    haralick_features(g, m, f);
    const ExtraFeatures e = extra_glcm_features(g, m, tsallis_q);
    f[13] = e.maxp;
    f[14] = e.cshade;
    f[15] = e.cprom;
    f[16] = e.tsq;
    return f;
}

FractalEstimate fractal_dimension(const QuantizedImage& q) {
    const std::size_t H = q.data.rows();
    const std::size_t W = q.data.cols();
    const std::size_t M = std::min(H, W);
    const auto L = static_cast<std::uint64_t>(q.levels);
    FractalEstimate est;
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t s = 2; s <= M / 2; s *= 2) {
        const std::size_t gr = H / s;
        const std::size_t gc = W / s;
        std::uint64_t boxes = 0;
        for (std::size_t br = 0; br < gr; ++br) {
            for (std::size_t bc = 0; bc < gc; ++bc) {
                std::uint16_t lo = std::numeric_limits<std::uint16_t>::max();
                std::uint16_t hi = 0;
                for (std::size_t r = br * s; r < (br + 1) * s; ++r) {
                    for (std::size_t c = bc * s; c < (bc + 1) * s; ++c) {
                        lo = std::min(lo, q.data(r, c));
                        hi = std::max(hi, q.data(r, c));
                    }
                }
                // ceil((hi - lo) / h) + 1 with box height h = s * L / M, in integers.
                const std::uint64_t num = static_cast<std::uint64_t>(hi - lo) * M;
                const std::uint64_t den = static_cast<std::uint64_t>(s) * L;
                boxes += (num + den - 1) / den + 1;
            }
        }
        // Box count scaled from the covered grid to the full image area.
        const double area_scale =
            static_cast<double>(H * W) / static_cast<double>(gr * gc * s * s);
        const double n = static_cast<double>(boxes) * area_scale;
        est.box_sizes.push_back(static_cast<int>(s));
        est.box_counts.push_back(n);
        // log n = log(boxes per column) + 2 (-log s) + log(H W): regress the first term
        // and add 2 back, so a flat surface gives exactly zero excess slope.
        xs.push_back(-std::log(static_cast<double>(s)));
        ys.push_back(std::log(static_cast<double>(boxes) / static_cast<double>(gr * gc)));
    }
    if (xs.size() < 3) {
        throw NumericalError("fractal dimension needs at least three box sizes; image too small");
    }
    const double k = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / k;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / k;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double excess = sxy / sxx;
    const double intercept = my - excess * mx;
    est.raw_slope = 2.0 + excess;
    double rss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (intercept + excess * xs[i]);
        rss += r * r;
    }
    est.residual = std::sqrt(rss / k);
    est.dimension = std::clamp(est.raw_slope, 2.0, 3.0);
    return est;
}

namespace {

struct Embedding {
    std::size_t dim;
    std::size_t count;
    std::vector<double> coords; // count x dim

    [[nodiscard]] const double* point(std::size_t i) const noexcept { return coords.data() + i * dim; }
    [[nodiscard]] double dist(std::size_t a, std::size_t b) const noexcept {
        double acc = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            const double diff = point(a)[d] - point(b)[d];
            acc += diff * diff;
        }
        return std::sqrt(acc);
    }
};

} // namespace

LyapunovEstimate sato_mle(std::span<const double> series, const LyapunovParams& params) {
    if (params.embedding_dimension < 1 || params.delay < 1 || params.horizon < 1) {
        throw ParameterError("Lyapunov embedding dimension, delay and horizon must be >= 1");
    }
    const auto m = static_cast<std::size_t>(params.embedding_dimension);
    const auto tau = static_cast<std::size_t>(params.delay);
    const auto k = static_cast<std::size_t>(params.horizon);
    const std::size_t span = (m - 1) * tau;
    if (series.size() <= span + k + 1) {
        throw NumericalError("series too short for the delay embedding");
    }
    Embedding emb{m, series.size() - span, {}};
    emb.coords.resize(emb.count * m);
    for (std::size_t i = 0; i < emb.count; ++i) {
        for (std::size_t d = 0; d < m; ++d) {
            emb.coords[i * m + d] = series[i + d * tau];
        }
    }
    const std::size_t usable = emb.count - k; // points whose k-step future exists
    const std::size_t theiler = tau * m;

    // Group identical points; the nearest neighbour is searched among distinct points.
    std::vector<std::size_t> order(usable);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto less = [&](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(emb.point(a), emb.point(a) + m, emb.point(b), emb.point(b) + m) ||
               (std::equal(emb.point(a), emb.point(a) + m, emb.point(b)) && a < b);
    };
    std::sort(order.begin(), order.end(), less);
    std::vector<std::size_t> group_start; // offsets into order
    for (std::size_t i = 0; i < usable; ++i) {
        if (i == 0 || !std::equal(emb.point(order[i]), emb.point(order[i]) + m, emb.point(order[i - 1]))) {
            group_start.push_back(i);
        }
    }
    const std::size_t groups = group_start.size();
    group_start.push_back(usable);
    const auto rep = [&](std::size_t g) { return order[group_start[g]]; };
    const auto members = [&](std::size_t g) {
        return std::span<const std::size_t>(order).subspan(group_start[g], group_start[g + 1] - group_start[g]);
    };
    const auto valid_partner = [&](std::size_t i, std::size_t g) -> std::ptrdiff_t {
        for (std::size_t j : members(g)) {
            const std::size_t gap = i > j ? i - j : j - i;
            if (gap > theiler) {
                return static_cast<std::ptrdiff_t>(j);
            }
        }
        return -1;
    };

    LyapunovEstimate est;
    double log_sum = 0.0;
    for (std::size_t g = 0; g < groups; ++g) {
        // Nearest distinct group; points are sorted by their first coordinate, so
        // the outward scan stops once that coordinate alone exceeds the best distance.
        const double x0 = emb.point(rep(g))[0];
        std::ptrdiff_t best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        const auto consider = [&](std::size_t h) {
            const double d = emb.dist(rep(g), rep(h));
            if (d < best_d || (d == best_d && static_cast<std::ptrdiff_t>(h) < best)) {
                best_d = d;
                best = static_cast<std::ptrdiff_t>(h);
            }
        };
        for (std::size_t h = g + 1; h < groups; ++h) {
            if (emb.point(rep(h))[0] - x0 > best_d) {
                break;
            }
            consider(h);
        }
        for (std::size_t h = g; h-- > 0;) {
            if (x0 - emb.point(rep(h))[0] > best_d) {
                break;
            }
            consider(h);
        }
        if (best < 0) {
            continue; // a single distinct point
        }
        std::vector<std::size_t> fallback; // other groups by distance, built lazily
        for (std::size_t i : members(g)) {
            std::ptrdiff_t j = valid_partner(i, static_cast<std::size_t>(best));
            double d0 = best_d;
            if (j < 0) {
                if (fallback.empty()) {
                    fallback.reserve(groups - 1);
                    for (std::size_t h = 0; h < groups; ++h) {
                        if (h != g) {
                            fallback.push_back(h);
                        }
                    }
                    std::stable_sort(fallback.begin(), fallback.end(), [&](std::size_t a, std::size_t b) {
                        return emb.dist(rep(g), rep(a)) < emb.dist(rep(g), rep(b));
                    });
                }
                for (std::size_t h : fallback) {
                    j = valid_partner(i, h);
                    if (j >= 0) {
                        d0 = emb.dist(rep(g), rep(h));
                        break;
                    }
                }
                if (j < 0) {
                    continue;
                }
            }
            const double dk = emb.dist(i + k, static_cast<std::size_t>(j) + k);
            if (dk > 0.0) {
                log_sum += std::log(dk / d0);
                ++est.pairs;
            }
        }
    }
    if (est.pairs == 0) {
        est.degenerate = true;
        est.exponent = 0.0;
        return est;
    }
    est.exponent = log_sum / static_cast<double>(est.pairs) / static_cast<double>(k);
    return est;
}

LyapunovEstimate sato_mle(const QuantizedImage& q, const LyapunovParams& params) {
    if (q.data.size() < 512) {
        throw NumericalError("Lyapunov estimate needs at least 512 pixels");
    }
    std::vector<double> series(q.data.size());
    std::transform(q.data.values().begin(), q.data.values().end(), series.begin(),
                   [](std::uint16_t v) { return static_cast<double>(v); });
    return sato_mle(series, params);
}

std::vector<double> ImageFeatureBlock::flatten() const {
    std::vector<double> out;
    out.reserve(kBlockSize);
    for (const auto& rec : records) {
        out.insert(out.end(), rec.values.begin(), rec.values.end());
    }
    out.push_back(fd);
    out.push_back(mle);
    return out;
}

const std::vector<std::string>& block_feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        n.reserve(kBlockSize);
        for (auto variant : kVariants) {
            for (auto key : kKeys) {
                n.push_back(std::string(variant) + "." + std::string(key));
            }
        }
        n.emplace_back("global.fd");
        n.emplace_back("global.mle");
        return n;
    }();
    return names;
}

ImageFeatureBlock feature_block(const QuantizedImage& q, double tsallis_q, const LyapunovParams& lyapunov) {
    ImageFeatureBlock block;
    for (std::size_t d = 0; d < kDirections.size(); ++d) {
        block.records[d] = glcm_features(compute_glcm(q, kDirections[d], 1), tsallis_q);
    }
    auto& avg = block.records[4];
    auto& rng = block.records[5];
    for (std::size_t f = 0; f < kGlcmFeatureCount; ++f) {
        double lo = block.records[0][f];
        double hi = lo;
        double sum = 0.0;
        for (std::size_t d = 0; d < 4; ++d) {
            lo = std::min(lo, block.records[d][f]);
            hi = std::max(hi, block.records[d][f]);
            sum += block.records[d][f];
        }
        avg[f] = sum / 4.0;
        rng[f] = hi - lo;
    }
    for (std::size_t d = 0; d < 4; ++d) {
        avg.singular = avg.singular || block.records[d].singular;
    }
    rng.singular = avg.singular;
    block.fd = fractal_dimension(q).dimension;
    block.mle = sato_mle(q, lyapunov).exponent;
    return block;
}

std::vector<std::string> feature_names(SourceSelection selection) {
    std::vector<std::string> names;
    names.reserve(kBlockSize * static_cast<std::size_t>(selection.count()));
    for (Source s : selection.sources()) {
        for (const auto& n : block_feature_names()) {
            names.push_back(std::string(source_prefix(s)) + "." + n);
        }
    }
    return names;
}

FeatureVector feature_vector(const ImageSample& sample, SourceSelection selection, const FeatureConfig& config) {
    FeatureVector fv;
    fv.names = feature_names(selection);
    fv.values.reserve(fv.names.size());
    for (const auto& src : apply_filter_bank(sample, selection, config.levels, config.filters)) {
        const auto flat = feature_block(src.image, config.tsallis_q, config.lyapunov).flatten();
        fv.values.insert(fv.values.end(), flat.begin(), flat.end());
    }
    for (std::size_t i = 0; i < fv.values.size(); ++i) {
        if (!std::isfinite(fv.values[i])) {
            throw NumericalError("sample " + sample.id + ": feature " + fv.names[i] + " is not finite");
        }
    }
    return fv;
}

std::string_view feature_key(std::string_view full_name) noexcept {
    const auto dot = full_name.rfind('.');
    return dot == std::string_view::npos ? full_name : full_name.substr(dot + 1);
}

} // namespace texcls
