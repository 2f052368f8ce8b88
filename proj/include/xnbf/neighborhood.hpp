#pragma once

#include <string_view>
#include <vector>

namespace xnbf {

/// Odd square lattice of side w >= 3 centred on the reference pixel; reach n = (w-1)/2.
class Lattice {
public:
    explicit Lattice(int w);

    int side() const noexcept { return w_; }
    int reach() const noexcept { return (w_ - 1) / 2; }

private:
    int w_;
};

/// First-quadrant coprime mask E(l, m) = [gcd(l, m) == 1] for 1 <= l, m <= n.
class NeighborMask {
public:
    explicit NeighborMask(int n);

    int n() const noexcept { return n_; }
    /// 1-based, as in E(l, m).
    bool operator()(int l, int m) const noexcept { return cells_[(l - 1) * n_ + (m - 1)] != 0; }

private:
    int n_;
    std::vector<char> cells_;
};

enum class Quadrant { I, II, III, IV, axis_right, axis_left, axis_up, axis_down };

std::string_view to_string(Quadrant q);

/// Pixel offset of a direction's neighbour: J(i, j) = I(i + drow, j + dcol).
struct Offset {
    int drow = 0;
    int dcol = 0;
    bool operator==(const Offset&) const = default;
};

/// One radial direction. `l` is the row (pre-multiplication) exponent, `m` the column
/// (post-multiplication) exponent.
struct Direction {
    Quadrant quadrant = Quadrant::axis_right;
    int l = 0;
    int m = 1;

    /// Throws InvalidArgument when the (quadrant, l, m) triple is not a valid direction.
    void validate() const;
    Offset offset() const noexcept;

    bool operator==(const Direction&) const = default;
};

NeighborMask neighborhood_mask(int n);

/// N_q: number of unit cells in the mask.
int quadrant_count(const NeighborMask& mask);

/// N_d = 4 (N_q + 1)
int direction_count(const Lattice& lattice);

/// Axis directions (right, left, up, down) first, then quadrants I..IV each in (l, m)
/// ascending order.
std::vector<Direction> enumerate_directions(const Lattice& lattice);

} // namespace xnbf
