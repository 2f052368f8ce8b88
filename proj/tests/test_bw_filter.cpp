#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "xnbf/bw_filter.hpp"
#include "xnbf/error.hpp"
#include "xnbf/estimation.hpp"
#include "xnbf/phantom.hpp"
#include "xnbf/shift.hpp"

using namespace xnbf;
using testing::matrix_a;

TEST_CASE("filter config validation") {
    CHECK_THROWS_AS((FilterConfig{4, 0.1}.validate()), InvalidArgument);
    CHECK_THROWS_AS((FilterConfig{3, NAN}.validate()), InvalidArgument);
    CHECK_NOTHROW((FilterConfig{3, -1.0}.validate()));
}

TEST_CASE("binary map on the 5x5 matrix") {
    const BinaryMap b = binary_map(matrix_a(), {Quadrant::axis_right, 0, 1}, 0.5);
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 5; ++c) CHECK(b(r, c) == (c == 4 ? 1 : 0));
}

TEST_CASE("binary map of a constant image marks the vacated band") {
    const Image img(7, 6, 0.4);
    for (const Direction& d : enumerate_directions(Lattice(7))) {
        const BinaryMap b = binary_map(img, d, 0.1);
        const Offset o = d.offset();
        for (int r = 0; r < img.height(); ++r) {
            for (int c = 0; c < img.width(); ++c) {
                const bool vacated = !img.contains(r + o.drow, c + o.dcol);
                CHECK(b(r, c) == (vacated ? 1 : 0));
            }
        }
    }
}

TEST_CASE("comparison is strict") {
    const Image img = testing::from_rows({{1, 2}, {3, 4}});
    // 2 - 1 = 1 is not > 1
    const BinaryMap b = binary_map(img, {Quadrant::axis_left, 0, 1}, 1.0);
    CHECK(b(0, 1) == 0);
    CHECK(b(0, 0) == 0); // 1 - 0 = 1
    CHECK(b(1, 0) == 1); // 3 - 0
}

TEST_CASE("threshold above the dynamic range gives no weights") {
    const Image img = testing::random_image(20, 16, 4);
    for (int w : {3, 7, 11}) {
        const WeightImage bwi = weight_image(img, {w, img.max() + 1e-9});
        CHECK(bwi.max() == 0);
        CHECK(apply_filter(img, {w, img.max() + 1e-9}) == img);
    }
}

TEST_CASE("apply_weights arithmetic") {
    const Image img(1, 1, 0.5);
    WeightImage bwi(1, 1);
    bwi(0, 0) = 3;
    CHECK(apply_weights(img, bwi)(0, 0) == 2.0);
    CHECK(apply_weights(img, WeightImage(1, 1)) == img);
    CHECK_THROWS_AS(apply_weights(Image(2, 2), WeightImage(1, 1)), InvalidArgument);
}

TEST_CASE("weight image equals the sum of binary maps and is bounded") {
    const Image img = testing::random_image(17, 13, 9);
    const FilterConfig cfg{7, 0.1};
    const auto dirs = enumerate_directions(Lattice(7));
    WeightImage sum(img.width(), img.height());
    for (const Direction& d : dirs) sum.accumulate(binary_map(img, d, cfg.eta));
    const WeightImage bwi = weight_image(img, cfg);
    CHECK(bwi == sum);
    CHECK(bwi.max() <= dirs.size());
}

TEST_CASE("scale equivariance") {
    const Image img = testing::random_image(24, 20, 21);
    for (double c : {0.25, 0.5, 2.0, 8.0, 1024.0}) {
        CAPTURE(c);
        Image scaled = img;
        for (double& v : scaled.pixels()) v *= c;
        for (int w : {3, 5, 9}) {
            Image expected = apply_filter(img, {w, 0.05});
            for (double& v : expected.pixels()) v *= c;
            CHECK(apply_filter(scaled, {w, 0.05 * c}) == expected);
        }
    }
    // any c > 0 on integer data, where every product is exact
    const Image ints = testing::random_int_image(16, 16, 5, 0, 200);
    for (double c : {3.0, 7.0, 0.75}) {
        Image scaled = ints;
        for (double& v : scaled.pixels()) v *= c;
        Image expected = apply_filter(ints, {5, 10.5});
        for (double& v : expected.pixels()) v *= c;
        CHECK(apply_filter(scaled, {5, 10.5 * c}) == expected);
    }
}

TEST_CASE("weights are monotone in the threshold") {
    const Image img = testing::random_image(30, 30, 77);
    for (int w : {3, 7}) {
        std::vector<double> etas{-0.5, -0.01, 0.0, 0.01, 0.05, 0.2, 0.5, 1.0};
        WeightImage prev = weight_image(img, {w, etas[0]});
        for (std::size_t i = 1; i < etas.size(); ++i) {
            const WeightImage cur = weight_image(img, {w, etas[i]});
            for (std::size_t k = 0; k < cur.cells().size(); ++k) CHECK(cur.cells()[k] <= prev.cells()[k]);
            prev = cur;
        }
    }
}

TEST_CASE("output dominance and upper bound for non-negative input") {
    const Image img = testing::random_image(25, 21, 31);
    const FilterConfig cfg{9, 0.02};
    const Image out = apply_filter(img, cfg);
    const int nd = direction_count(Lattice(9));
    for (std::size_t k = 0; k < img.size(); ++k) {
        CHECK(out.pixels()[k] >= img.pixels()[k]);
        CHECK(out.pixels()[k] <= img.pixels()[k] + img.pixels()[k] * nd);
    }
}

TEST_CASE("weight image ignores direction order") {
    const Image img = testing::random_image(32, 28, 12);
    std::mt19937_64 rng(5);
    for (int w : {5, 11}) {
        auto dirs = enumerate_directions(Lattice(w));
        const WeightImage ref = weight_image(img, dirs, 0.03);
        CHECK(ref == weight_image(img, {w, 0.03}));
        for (int trial = 0; trial < 5; ++trial) {
            std::shuffle(dirs.begin(), dirs.end(), rng);
            CHECK(weight_image(img, dirs, 0.03) == ref);
        }
    }
}

TEST_CASE("interior weights do not see the border padding") {
    const int w = 7;
    const int n = Lattice(w).reach();
    const Image img = testing::random_image(20, 18, 44);
    // enlarged copy with replicated edges
    Image big(img.width() + 2 * n, img.height() + 2 * n);
    for (int r = 0; r < big.height(); ++r)
        for (int c = 0; c < big.width(); ++c)
            big(r, c) = img(std::clamp(r - n, 0, img.height() - 1), std::clamp(c - n, 0, img.width() - 1));
    const WeightImage a = weight_image(img, {w, 0.05});
    const WeightImage b = weight_image(big, {w, 0.05});
    for (int r = n; r < img.height() - n; ++r)
        for (int c = n; c < img.width() - n; ++c) CHECK(a(r, c) == b(r + n, c + n));
}

TEST_CASE("mask_border zeroes only the band") {
    const Image img(10, 8, 1.0);
    const WeightImage bwi = weight_image(img, {5, 0.5});
    const WeightImage masked = mask_border(bwi, 2);
    for (int r = 0; r < 8; ++r) {
        for (int c = 0; c < 10; ++c) {
            const bool band = r < 2 || c < 2 || r >= 6 || c >= 8;
            CHECK(masked(r, c) == (band ? 0u : bwi(r, c)));
        }
    }
    CHECK_THROWS_AS(mask_border(bwi, -1), InvalidArgument);
}

TEST_CASE("weight image to_image and stats") {
    WeightImage bwi(2, 1);
    bwi(0, 1) = 4;
    CHECK(bwi.mean() == 2.0);
    CHECK(bwi.max() == 4);
    CHECK(bwi.to_image() == testing::from_rows({{0, 4}}));
}

TEST_CASE("kspace of zero and of an impulse") {
    CHECK(kspace_magnitude(Image(8, 6)) == Image(8, 6));
    Image impulse(8, 6);
    impulse(2, 5) = 3.0;
    const Image k = kspace_magnitude(impulse);
    for (double v : k.pixels()) CHECK(v == doctest::Approx(std::log1p(3.0)).epsilon(1e-12));

    const Direction d{Quadrant::axis_right, 0, 1};
    CHECK(direction_kspace(Image(8, 8), d, {3, 0.1}) == Image(8, 8));
}

TEST_CASE("kspace views are oriented along their direction") {
    // Top decile of magnitude (DC excluded), fraction inside the 90 degree arc centred on
    // the direction's axis. Energy spread uniformly over angles would give one half.
    const PhantomSpec spec{};
    const Image img = make_phantom(spec);
    const Roi roi = phantom_roi(spec);
    const double eta = select_threshold(estimate_noise_variance(img, roi), estimate_croi(img, roi));
    for (const Direction& d : enumerate_directions(Lattice(3))) {
        CAPTURE(to_string(d.quadrant));
        const Image k = direction_kspace(img, d, {3, eta});
        const Offset o = d.offset();
        const double axis = std::atan2(-o.drow, o.dcol);
        std::vector<std::pair<double, double>> samples;
        for (int r = 0; r < k.height(); ++r) {
            for (int c = 0; c < k.width(); ++c) {
                const int ky = r - k.height() / 2;
                const int kx = c - k.width() / 2;
                if (ky == 0 && kx == 0) continue;
                double delta = std::fmod(std::abs(std::atan2(-ky, kx) - axis), std::numbers::pi);
                delta = std::min(delta, std::numbers::pi - delta);
                samples.emplace_back(k(r, c), delta);
            }
        }
        std::sort(samples.begin(), samples.end(), [](auto a, auto b) { return a.first > b.first; });
        samples.resize(samples.size() / 10);
        const auto inside = std::count_if(samples.begin(), samples.end(),
                                          [](auto s) { return s.second <= std::numbers::pi / 4; });
        CHECK(double(inside) / samples.size() >= 0.75);
    }
}

TEST_CASE("binary-only kspace source") {
    const Image img = testing::random_image(16, 16, 3);
    const Direction d{Quadrant::II, 1, 1};
    const BinaryMap b = binary_map(img, d, 0.2);
    Image comp(16, 16);
    for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 16; ++c) comp(r, c) = b(r, c);
    CHECK(direction_kspace(img, d, {3, 0.2}, KspaceSource::binary_only) == kspace_magnitude(comp));
}
