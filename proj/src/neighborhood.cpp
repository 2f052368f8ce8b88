#include "xnbf/neighborhood.hpp"

#include <numeric>
#include <string>

#include "xnbf/error.hpp"

namespace xnbf {

Lattice::Lattice(int w) : w_(w) {
    if (w < 3 || w % 2 == 0) {
        throw InvalidArgument("lattice side must be odd and >= 3, got " + std::to_string(w));
    }
}

NeighborMask::NeighborMask(int n) : n_(n) {
    if (n < 1) throw InvalidArgument("neighborhood mask needs n >= 1, got " + std::to_string(n));
    cells_.resize(static_cast<std::size_t>(n) * n);
    for (int l = 1; l <= n; ++l) {
        for (int m = 1; m <= n; ++m) {
            cells_[(l - 1) * n + (m - 1)] = std::gcd(l, m) == 1 ? 1 : 0;
        }
    }
}

std::string_view to_string(Quadrant q) {
    switch (q) {
    case Quadrant::I: return "I";
    case Quadrant::II: return "II";
    case Quadrant::III: return "III";
    case Quadrant::IV: return "IV";
    case Quadrant::axis_right: return "right";
    case Quadrant::axis_left: return "left";
    case Quadrant::axis_up: return "up";
    case Quadrant::axis_down: return "down";
    }
    return "?";
}

void Direction::validate() const {
    switch (quadrant) {
    case Quadrant::I:
    case Quadrant::II:
    case Quadrant::III:
    case Quadrant::IV:
        if (l < 1 || m < 1 || std::gcd(l, m) != 1) {
            throw InvalidArgument("quadrant direction needs coprime l, m >= 1");
        }
        return;
    case Quadrant::axis_right:
    case Quadrant::axis_left:
        if (l != 0 || m != 1) throw InvalidArgument("horizontal axis direction needs (l, m) = (0, 1)");
        return;
    case Quadrant::axis_up:
    case Quadrant::axis_down:
        if (l != 1 || m != 0) throw InvalidArgument("vertical axis direction needs (l, m) = (1, 0)");
        return;
    }
}

// Pre-multiplication by L^l pulls row i-l into row i, U^l pulls row i+l; post-multiplication
// by L^m pulls column j+m into column j, U^m pulls column j-m.
Offset Direction::offset() const noexcept {
    switch (quadrant) {
    case Quadrant::I: return {-l, m};
    case Quadrant::II: return {-l, -m};
    case Quadrant::III: return {l, -m};
    case Quadrant::IV: return {l, m};
    case Quadrant::axis_right: return {0, m};
    case Quadrant::axis_left: return {0, -m};
    case Quadrant::axis_up: return {-l, 0};
    case Quadrant::axis_down: return {l, 0};
    }
    return {};
}

NeighborMask neighborhood_mask(int n) { return NeighborMask(n); }

int quadrant_count(const NeighborMask& mask) {
    int count = 0;
    for (int l = 1; l <= mask.n(); ++l) {
        for (int m = 1; m <= mask.n(); ++m) count += mask(l, m) ? 1 : 0;
    }
    return count;
}

int direction_count(const Lattice& lattice) {
    return 4 * (quadrant_count(neighborhood_mask(lattice.reach())) + 1);
}

std::vector<Direction> enumerate_directions(const Lattice& lattice) {
    const NeighborMask mask = neighborhood_mask(lattice.reach());
    std::vector<Direction> dirs = {
        {Quadrant::axis_right, 0, 1},
        {Quadrant::axis_left, 0, 1},
        {Quadrant::axis_up, 1, 0},
        {Quadrant::axis_down, 1, 0},
    };
    for (Quadrant q : {Quadrant::I, Quadrant::II, Quadrant::III, Quadrant::IV}) {
        for (int l = 1; l <= mask.n(); ++l) {
            for (int m = 1; m <= mask.n(); ++m) {
                if (mask(l, m)) dirs.push_back({q, l, m});
            }
        }
    }
    return dirs;
}

} // namespace xnbf
