#include <texcls/glcm.hpp>

#include <algorithm>
#include <cmath>

#include <texcls/error.hpp>

namespace texcls {

Displacement displacement(Direction d) noexcept {
    switch (d) {
    case Direction::D0: return {0, 1};
    case Direction::D45: return {-1, 1};
    case Direction::D90: return {-1, 0};
    case Direction::D135: return {-1, -1};
    }
    return {0, 1};
}

std::string_view direction_name(Direction d) noexcept {
    switch (d) {
    case Direction::D0: return "d0";
    case Direction::D45: return "d45";
    case Direction::D90: return "d90";
    case Direction::D135: return "d135";
    }
    return "?";
}

Grid<std::uint64_t> cooccurrence_counts(const QuantizedImage& q, Direction dir, int offset) {
    if (offset < 1) {
        throw ParameterError("GLCM offset must be >= 1");
    }
    if (q.levels < 2) {
        throw ParameterError("GLCM needs at least two gray levels");
    }
    const auto L = static_cast<std::size_t>(q.levels);
    Grid<std::uint64_t> counts(L, L, 0);
    const auto [dr0, dc0] = displacement(dir);
    const std::ptrdiff_t dr = static_cast<std::ptrdiff_t>(dr0) * offset;
    const std::ptrdiff_t dc = static_cast<std::ptrdiff_t>(dc0) * offset;
    const auto rows = static_cast<std::ptrdiff_t>(q.data.rows());
    const auto cols = static_cast<std::ptrdiff_t>(q.data.cols());

    // Restrict the scan to positions whose partner is in bounds.
    const std::ptrdiff_t r_begin = std::max<std::ptrdiff_t>(0, -dr);
    const std::ptrdiff_t r_end = std::min(rows, rows - dr);
    const std::ptrdiff_t c_begin = std::max<std::ptrdiff_t>(0, -dc);
    const std::ptrdiff_t c_end = std::min(cols, cols - dc);
    for (std::ptrdiff_t r = r_begin; r < r_end; ++r) {
        const auto row = q.data.row(static_cast<std::size_t>(r));
        const auto partner = q.data.row(static_cast<std::size_t>(r + dr));
        for (std::ptrdiff_t c = c_begin; c < c_end; ++c) {
            const std::size_t a = row[static_cast<std::size_t>(c)];
            const std::size_t b = partner[static_cast<std::size_t>(c + dc)];
            if (a >= L || b >= L) {
                throw DataError("gray level exceeds the declared number of levels");
            }
            ++counts(a, b);
            ++counts(b, a);
        }
    }
    return counts;
}

Glcm compute_glcm(const QuantizedImage& q, Direction dir, int offset) {
    const Grid<std::uint64_t> counts = cooccurrence_counts(q, dir, offset);
    std::uint64_t total = 0;
    for (auto v : counts.values()) {
        total += v;
    }
    if (total == 0) {
        throw DataError("image too small for any co-occurring pair at offset " + std::to_string(offset));
    }
    Glcm g{q.levels, Grid<double>(counts.rows(), counts.cols())};
    const auto denom = static_cast<double>(total);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        g.p.values()[i] = static_cast<double>(counts.values()[i]) / denom;
    }
    return g;
}

GlcmSet glcm_set(const QuantizedImage& q, int offset) {
    GlcmSet set;
    for (std::size_t k = 0; k < kDirections.size(); ++k) {
        set.directional[k] = compute_glcm(q, kDirections[k], offset);
    }
    const auto L = static_cast<std::size_t>(q.levels);
    set.avg = Glcm{q.levels, Grid<double>(L, L, 0.0)};
    set.rng = Grid<double>(L, L, 0.0);
    for (std::size_t i = 0; i < L * L; ++i) {
        double lo = set.directional[0].p.values()[i];
        double hi = lo;
        double sum = 0.0;
        for (const auto& g : set.directional) {
            const double v = g.p.values()[i];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
        }
        set.avg.p.values()[i] = sum / 4.0;
        set.rng.values()[i] = hi - lo;
    }
    return set;
}

namespace {

double plogp(double p) noexcept { return p > 0.0 ? p * std::log(p) : 0.0; }

} // namespace

GlcmMarginals marginals(const Glcm& g) {
    const int L = g.levels;
    const auto uL = static_cast<std::size_t>(L);
    GlcmMarginals m;
    m.px.assign(uL, 0.0);
    m.py.assign(uL, 0.0);
    m.p_sum.assign(2 * uL - 1, 0.0);
    m.p_diff.assign(uL, 0.0);
    for (int i = 0; i < L; ++i) {
        for (int j = 0; j < L; ++j) {
            const double p = g(i, j);
            m.px[static_cast<std::size_t>(i)] += p;
            m.py[static_cast<std::size_t>(j)] += p;
            m.p_sum[static_cast<std::size_t>(i + j)] += p;
            m.p_diff[static_cast<std::size_t>(std::abs(i - j))] += p;
            m.hxy -= plogp(p);
        }
    }
    for (int i = 0; i < L; ++i) {
        m.mean_x += i * m.px[static_cast<std::size_t>(i)];
        m.mean_y += i * m.py[static_cast<std::size_t>(i)];
        m.hx -= plogp(m.px[static_cast<std::size_t>(i)]);
        m.hy -= plogp(m.py[static_cast<std::size_t>(i)]);
    }
    double var_x = 0.0;
    double var_y = 0.0;
    for (int i = 0; i < L; ++i) {
        var_x += (i - m.mean_x) * (i - m.mean_x) * m.px[static_cast<std::size_t>(i)];
        var_y += (i - m.mean_y) * (i - m.mean_y) * m.py[static_cast<std::size_t>(i)];
    }
    m.std_x = std::sqrt(var_x);
    m.std_y = std::sqrt(var_y);
    for (int i = 0; i < L; ++i) {
        const double pxi = m.px[static_cast<std::size_t>(i)];
        if (pxi <= 0.0) {
            continue;
        }
        for (int j = 0; j < L; ++j) {
            const double pyj = m.py[static_cast<std::size_t>(j)];
            if (pyj <= 0.0) {
                continue;
            }
            const double prod = pxi * pyj;
            const double lp = std::log(prod);
            m.hxy1 -= g(i, j) * lp;
            m.hxy2 -= prod * lp;
        }
    }
    return m;
}

} // namespace texcls
