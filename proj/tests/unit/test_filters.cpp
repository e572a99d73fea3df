#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <texcls/filters.hpp>

#include "oracles.hpp"
#include "synthetic.hpp"

using namespace texcls;

namespace {

double sample_variance(const IntensityGrid& g) {
    const double n = static_cast<double>(g.size());
    const double mean = std::accumulate(g.values().begin(), g.values().end(), 0.0) / n;
    double s = 0;
    for (double v : g.values()) s += (v - mean) * (v - mean);
    return s / n;
}

double grid_mean(const IntensityGrid& g) {
    return std::accumulate(g.values().begin(), g.values().end(), 0.0) / static_cast<double>(g.size());
}

IntensityGrid shifted(const IntensityGrid& g) {
    IntensityGrid out(g.rows(), g.cols());
    for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t c = 0; c < g.cols(); ++c)
            out(r, c) = g.clamped(static_cast<std::ptrdiff_t>(r) - 1, static_cast<std::ptrdiff_t>(c) - 1);
    return out;
}

template <typename G>
void check_shift_equivariance(const G& a, const G& b, std::size_t margin, double tol) {
    for (std::size_t r = margin + 1; r + margin < a.rows(); ++r)
        for (std::size_t c = margin + 1; c + margin < a.cols(); ++c)
            REQUIRE(std::abs(static_cast<double>(b(r, c)) - static_cast<double>(a(r - 1, c - 1))) <= tol);
}

} // namespace

TEST_CASE("source selection encodes case numbers as (V,E,C,G,O) bits") {
    const auto s1 = SourceSelection::from_case(1);
    CHECK(s1.count() == 1);
    CHECK(s1.has(Source::Original));
    const auto s23 = SourceSelection::from_case(23);
    CHECK(s23.table_flags() == std::array<bool, 5>{true, false, true, true, true});
    CHECK_FALSE(s23.has(Source::Entropy));
    CHECK(s23.count() == 4);
    CHECK(SourceSelection::from_case(16).sources() == std::vector<Source>{Source::Variance});
    CHECK(SourceSelection::all().sources().size() == 5);
    for (int k = 1; k <= 31; ++k) {
        const auto f = SourceSelection::from_case(k).table_flags();
        int v = 0;
        for (bool b : f) v = v * 2 + (b ? 1 : 0);
        REQUIRE(v == k);
    }
    CHECK_THROWS_AS(SourceSelection::from_case(0), ParameterError);
    CHECK_THROWS_AS(SourceSelection::from_case(32), ParameterError);
}

TEST_CASE("gaussian kernel is normalized with radius ceil(3 sigma)") {
    const auto k = gaussian_kernel(2.0);
    CHECK(k.size() == 13);
    CHECK(std::accumulate(k.begin(), k.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::max_element(k.begin(), k.end()) - k.begin() == 6);
    CHECK_THROWS_AS(gaussian_kernel(0.0), ParameterError);
}

TEST_CASE("gaussian filter matches a direct 2-D convolution") {
    IntensityGrid impulse(9, 9, 0.0);
    impulse(4, 4) = 1.0;
    const auto out = gaussian_filter(impulse, {2.0});
    const auto ref = oracle::gaussian_2d(impulse, 2.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        REQUIRE(std::abs(out.values()[i] - ref.values()[i]) < 1e-12);
    }
    const auto k = gaussian_kernel(2.0);
    CHECK(out(4, 4) == *std::max_element(out.values().begin(), out.values().end()));
    CHECK(out(4, 4) == doctest::Approx(k[6] * k[6]).epsilon(1e-12));

    texcls::Rng rng(4);
    const auto noise = synth::random_intensity(20, 23, rng);
    const auto a = gaussian_filter(noise, {1.3});
    const auto b = oracle::gaussian_2d(noise, 1.3);
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(std::abs(a.values()[i] - b.values()[i]) < 1e-12);
    }
}

TEST_CASE("gaussian filter basics") {
    const auto c = synth::constant(20, 20, 0.37);
    const auto out = gaussian_filter(c);
    for (double v : out.values()) REQUIRE(v == doctest::Approx(0.37).epsilon(1e-14));

    texcls::Rng rng(8);
    const auto noise = synth::random_intensity(32, 32, rng);
    CHECK(sample_variance(gaussian_filter(noise)) < sample_variance(noise));

    IntensityGrid patch(40, 40, 0.5);
    for (std::size_t r = 12; r < 28; ++r)
        for (std::size_t col = 12; col < 28; ++col) patch(r, col) = 0.2 + 0.6 * texcls::uniform01(rng);
    CHECK(std::abs(grid_mean(gaussian_filter(patch)) - grid_mean(patch)) < 1e-6);
}

TEST_CASE("canny on constant and step images") {
    const auto flat = canny_filter(synth::constant(24, 24, 0.6));
    CHECK(std::count(flat.values().begin(), flat.values().end(), 1) == 0);

    IntensityGrid step(32, 32, 0.0);
    for (std::size_t r = 0; r < 32; ++r)
        for (std::size_t c = 16; c < 32; ++c) step(r, c) = 1.0;
    const auto edges = canny_filter(step);
    std::size_t total = 0;
    for (std::size_t r = 0; r < 32; ++r) {
        std::size_t in_row = 0;
        for (std::size_t c = 0; c < 32; ++c) {
            if (edges(r, c)) {
                ++in_row;
                CHECK((c == 15 || c == 16));
            }
        }
        CHECK(in_row == 1);
        total += in_row;
    }
    CHECK(total == 32);
}

TEST_CASE("canny output is binary on random input") {
    texcls::Rng rng(12);
    const auto edges = canny_filter(synth::random_intensity(30, 26, rng));
    for (auto v : edges.values()) REQUIRE((v == 0 || v == 1));
    CHECK(std::count(edges.values().begin(), edges.values().end(), 1) > 0);
}

TEST_CASE("hysteresis keeps weak ridges only when connected to a strong pixel") {
    IntensityGrid thinned(20, 20, 0.0);
    thinned(5, 5) = 1.0;
    for (std::size_t c = 6; c <= 12; ++c) thinned(5, c) = 0.5;
    for (std::size_t c = 3; c <= 10; ++c) thinned(15, c) = 0.5;
    const auto e = hysteresis(thinned, 0.3, 0.8);
    for (std::size_t c = 5; c <= 12; ++c) CHECK(e(5, c) == 1);
    for (std::size_t c = 3; c <= 10; ++c) CHECK(e(15, c) == 0);
    CHECK(std::count(e.values().begin(), e.values().end(), 1) == 8);
}

TEST_CASE("entropy filter") {
    QuantizedImage flat{64, Grid<std::uint16_t>(20, 20, 17)};
    const auto zero = entropy_filter(flat);
    for (double v : zero.values()) REQUIRE(v == 0.0);

    QuantizedImage board{64, Grid<std::uint16_t>(24, 24)};
    for (std::size_t r = 0; r < 24; ++r)
        for (std::size_t c = 0; c < 24; ++c) board.data(r, c) = ((r + c) % 2) ? 63 : 0;
    const auto h = entropy_filter(board);
    const double two_bin = -(41.0 / 81 * std::log2(41.0 / 81) + 40.0 / 81 * std::log2(40.0 / 81));
    for (std::size_t r = 4; r < 20; ++r)
        for (std::size_t c = 4; c < 20; ++c) REQUIRE(h(r, c) * 6.0 == doctest::Approx(two_bin).epsilon(1e-12));
    CHECK(two_bin == doctest::Approx(1.0).epsilon(1e-3));

    QuantizedImage spread{64, Grid<std::uint16_t>(9, 9)};
    for (std::size_t i = 0; i < 81; ++i) spread.data.values()[i] = static_cast<std::uint16_t>(i % 64);
    const auto hs = entropy_filter(spread);
    const double bits = hs(4, 4) * 6.0;
    CHECK(bits == doctest::Approx(oracle::window_entropy_bits(spread, 4, 4)).epsilon(1e-12));
    CHECK(bits > 5.9);
    CHECK(bits < 6.0);
}

TEST_CASE("entropy filter agrees with the direct histogram everywhere") {
    texcls::Rng rng(21);
    const auto q = synth::random_quantized(19, 25, 8, rng);
    const auto h = entropy_filter(q);
    for (std::size_t r = 0; r < q.data.rows(); ++r)
        for (std::size_t c = 0; c < q.data.cols(); ++c)
            REQUIRE(h(r, c) * 3.0 ==
                    doctest::Approx(oracle::window_entropy_bits(q, static_cast<std::ptrdiff_t>(r),
                                                                static_cast<std::ptrdiff_t>(c)))
                        .epsilon(1e-12));
}

TEST_CASE("entropy is invariant under relabeling, variance is not") {
    texcls::Rng rng(5);
    const auto q = synth::random_quantized(20, 20, 16, rng);
    std::vector<std::uint16_t> perm(16);
    std::iota(perm.begin(), perm.end(), 0);
    portable_shuffle(std::span<std::uint16_t>(perm), rng);
    QuantizedImage relabeled = q;
    for (auto& v : relabeled.data.values()) v = perm[v];
    const auto h1 = entropy_filter(q);
    const auto h2 = entropy_filter(relabeled);
    for (std::size_t i = 0; i < h1.size(); ++i) REQUIRE(std::abs(h1.values()[i] - h2.values()[i]) < 1e-14);

    IntensityGrid a(20, 20), b(20, 20);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a.values()[i] = q.data.values()[i] / 15.0;
        b.values()[i] = relabeled.data.values()[i] / 15.0;
    }
    CHECK_FALSE(variance_filter(a) == variance_filter(b));
}

TEST_CASE("variance filter") {
    const auto zero = variance_filter(synth::constant(16, 16, 0.8));
    for (double v : zero.values()) REQUIRE(v == 0.0);

    IntensityGrid w(3, 3, std::vector<double>{0, 1, 0, 1, 1, 1, 0, 1, 0});
    const auto out = variance_filter(w);
    CHECK(out(1, 1) * 0.25 == doctest::Approx(20.0 / 81.0).epsilon(1e-14));

    texcls::Rng rng(2);
    IntensityGrid binary(30, 30);
    for (auto& v : binary.values()) v = texcls::uniform_below(rng, 2) ? 1.0 : 0.0;
    for (double v : variance_filter(binary).values()) REQUIRE((v >= 0.0 && v <= 1.0));
}

TEST_CASE("filters are translation equivariant away from borders") {
    texcls::Rng rng(31);
    const auto img = synth::random_intensity(30, 30, rng);
    const auto moved = shifted(img);
    check_shift_equivariance(gaussian_filter(img), gaussian_filter(moved), 6, 1e-12);
    check_shift_equivariance(variance_filter(img), variance_filter(moved), 1, 1e-12);
    check_shift_equivariance(entropy_filter(quantize(img, 16)), entropy_filter(quantize(moved, 16)), 4, 0.0);
}

TEST_CASE("filter bank order, counts and canny levels") {
    texcls::Rng rng(17);
    ImageSample s{"x", "A", synth::random_intensity(24, 24, rng)};
    const auto one = apply_filter_bank(s, SourceSelection::from_case(1), 64);
    REQUIRE(one.size() == 1);
    CHECK(one[0].image.data == quantize(s, 64).data);

    const auto all = apply_filter_bank(s, SourceSelection::all(), 64);
    REQUIRE(all.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(all[i].source == kAllSources[i]);
        CHECK(all[i].image.levels == 64);
    }
    for (auto v : all[2].image.data.values()) REQUIRE((v == 0 || v == 63));

    const auto no_entropy = apply_filter_bank(s, SourceSelection::from_case(23), 64);
    REQUIRE(no_entropy.size() == 4);
    for (const auto& f : no_entropy) CHECK(f.source != Source::Entropy);
}
