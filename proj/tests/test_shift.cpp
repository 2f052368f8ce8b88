#include "doctest.h"
#include "support.hpp"
#include "xnbf/error.hpp"
#include "xnbf/neighborhood.hpp"
#include "xnbf/shift.hpp"

using namespace xnbf;
using testing::from_rows;
using testing::matrix_a;

namespace {

struct Printed {
    const char* name;
    Direction dir;
    Image expected;
};

std::vector<Printed> printed_products() {
    return {
        {"AL", {Quadrant::axis_right, 0, 1},
         from_rows({{2, 3, 4, 5, 0}, {7, 8, 9, 10, 0}, {12, 13, 14, 15, 0}, {17, 18, 19, 20, 0}, {22, 23, 24, 25, 0}})},
        {"LAL", {Quadrant::I, 1, 1},
         from_rows({{0, 0, 0, 0, 0}, {2, 3, 4, 5, 0}, {7, 8, 9, 10, 0}, {12, 13, 14, 15, 0}, {17, 18, 19, 20, 0}})},
        {"LA", {Quadrant::axis_up, 1, 0},
         from_rows({{0, 0, 0, 0, 0}, {1, 2, 3, 4, 5}, {6, 7, 8, 9, 10}, {11, 12, 13, 14, 15}, {16, 17, 18, 19, 20}})},
        {"LAU", {Quadrant::II, 1, 1},
         from_rows({{0, 0, 0, 0, 0}, {0, 1, 2, 3, 4}, {0, 6, 7, 8, 9}, {0, 11, 12, 13, 14}, {0, 16, 17, 18, 19}})},
        {"AU", {Quadrant::axis_left, 0, 1},
         from_rows({{0, 1, 2, 3, 4}, {0, 6, 7, 8, 9}, {0, 11, 12, 13, 14}, {0, 16, 17, 18, 19}, {0, 21, 22, 23, 24}})},
        {"UAU", {Quadrant::III, 1, 1},
         from_rows({{0, 6, 7, 8, 9}, {0, 11, 12, 13, 14}, {0, 16, 17, 18, 19}, {0, 21, 22, 23, 24}, {0, 0, 0, 0, 0}})},
        {"UA", {Quadrant::axis_down, 1, 0},
         from_rows({{6, 7, 8, 9, 10}, {11, 12, 13, 14, 15}, {16, 17, 18, 19, 20}, {21, 22, 23, 24, 25}, {0, 0, 0, 0, 0}})},
        {"UAL", {Quadrant::IV, 1, 1},
         from_rows({{7, 8, 9, 10, 0}, {12, 13, 14, 15, 0}, {17, 18, 19, 20, 0}, {22, 23, 24, 25, 0}, {0, 0, 0, 0, 0}})},
    };
}

} // namespace

TEST_CASE("eight printed shift products of the 5x5 matrix") {
    const Image a = matrix_a();
    for (const Printed& p : printed_products()) {
        CAPTURE(p.name);
        CHECK(shift_image(a, p.dir) == p.expected);
        CHECK(shift_oracle(a, p.dir) == p.expected);
    }
}

TEST_CASE("oracle with zero exponents is the identity") {
    const Image img = testing::random_image(6, 4, 1);
    for (Quadrant q : {Quadrant::I, Quadrant::II, Quadrant::III, Quadrant::IV}) CHECK(shift_oracle(img, q, 0, 0) == img);
}

TEST_CASE("fast shift matches the matrix oracle") {
    set_shift_warnings(false); // the small shapes are shifted out entirely by the wider lattices
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        // signed values and non-square shapes as well
        const Image sq = testing::random_image(8, 8, seed, -1.0, 1.0);
        const Image wide = testing::random_image(11, 6, seed + 100, -1.0, 1.0);
        const Image tall = testing::random_image(5, 9, seed + 200, 0.0, 1.0);
        for (int w = 3; w <= 11; w += 2) {
            for (const Direction& d : enumerate_directions(Lattice(w))) {
                CHECK(shift_image(sq, d) == shift_oracle(sq, d));
                CHECK(shift_image(wide, d) == shift_oracle(wide, d));
                CHECK(shift_image(tall, d) == shift_oracle(tall, d));
            }
        }
    }
    set_shift_warnings(true);
}

TEST_CASE("shift composition") {
    const Image img = testing::random_image(9, 7, 3);
    for (Quadrant q : {Quadrant::I, Quadrant::II, Quadrant::III, Quadrant::IV}) {
        const Offset unit = Direction{q, 1, 1}.offset();
        const Quadrant rowAxis = unit.drow < 0 ? Quadrant::axis_up : Quadrant::axis_down;
        const Quadrant colAxis = unit.dcol < 0 ? Quadrant::axis_left : Quadrant::axis_right;
        for (auto [l, m] : {std::pair{2, 3}, std::pair{3, 1}, std::pair{1, 4}}) {
            Image stepwise = img;
            for (int i = 0; i < l; ++i) stepwise = shift_image(stepwise, rowAxis, 1, 0);
            for (int i = 0; i < m; ++i) stepwise = shift_image(stepwise, colAxis, 0, 1);
            CHECK(shift_image(img, q, l, m) == stepwise);
        }
    }
}

TEST_CASE("opposite quadrant round trip away from the border") {
    const Image img = testing::random_image(12, 10, 8);
    for (auto [l, m] : {std::pair{1, 1}, std::pair{2, 3}, std::pair{3, 2}}) {
        const Image back = shift_image(shift_image(img, Quadrant::I, l, m), Quadrant::III, l, m);
        const Image back2 = shift_image(shift_image(img, Quadrant::II, l, m), Quadrant::IV, l, m);
        const int d = std::max(l, m);
        for (int r = d; r < img.height() - d; ++r) {
            for (int c = d; c < img.width() - d; ++c) {
                CHECK(back(r, c) == img(r, c));
                CHECK(back2(r, c) == img(r, c));
            }
        }
    }
}

TEST_CASE("vacated cells are zero; zero image is fixed") {
    const Image zero(7, 5);
    for (const Direction& d : enumerate_directions(Lattice(7))) CHECK(shift_image(zero, d) == zero);

    const Image ones(6, 6, 1.0);
    const Image s = shift_image(ones, Quadrant::IV, 2, 1);
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) CHECK(s(r, c) == ((r < 4 && c < 5) ? 1.0 : 0.0));
}

TEST_CASE("shifting everything out gives zeros") {
    const Image img = testing::random_image(4, 3, 2, 0.5, 1.0);
    CHECK(shift_image(img, Quadrant::IV, 3, 1) == Image(4, 3));
    CHECK(shift_oracle(img, Quadrant::IV, 3, 1) == Image(4, 3));
}

TEST_CASE("invalid shift arguments") {
    const Image img(4, 4);
    CHECK_THROWS_AS(shift_image(img, Quadrant::axis_right, 1, 1), InvalidArgument);
    CHECK_THROWS_AS(shift_image(img, Quadrant::I, -1, 1), InvalidArgument);
}
