#pragma once

// Uniform 1D node grid shared by the solver and the convolution operators.

#include <stdexcept>
#include <vector>

namespace hjlb {

struct Grid1D {
    double xmin = 0.0;
    double xmax = 1.0;
    int cells = 1;  // node count is cells + 1

    double dx() const { return (xmax - xmin) / cells; }
    int points() const { return cells + 1; }
    double x(int i) const { return xmin + i * dx(); }

    /// Index of the node nearest to x (clamped to the grid).
    int nearest(double xq) const {
        const double s = (xq - xmin) / dx();
        int i = static_cast<int>(s + 0.5);
        if (i < 0) i = 0;
        if (i > cells) i = cells;
        return i;
    }
};

inline Grid1D make_grid(double xmin, double xmax, int cells) {
    if (!(xmin < xmax)) throw std::invalid_argument("grid needs xmin < xmax");
    if (cells < 1) throw std::invalid_argument("grid needs at least one cell");
    return {xmin, xmax, cells};
}

}  // namespace hjlb
