#pragma once

#include <cstddef>
#include <vector>

#include "rwave/errors.hpp"

namespace rwave {

// Uniform radial grid r_j = j*dr, j = 0..J, with r_0 = 0 and r_J = r_max.
struct RadialGrid {
    double dr = 0.0;
    std::size_t J = 0;

    double r(std::size_t j) const { return static_cast<double>(j) * dr; }
    double r_max() const { return r(J); }
    std::size_t points() const { return J + 1; }
};

inline RadialGrid build_grid(double r_max, std::size_t J) {
    if (!(r_max > 0.0)) throw InvalidArgument("build_grid: r_max must be positive");
    if (J < 8) throw InvalidArgument("build_grid: J must be at least 8");
    return RadialGrid{r_max / static_cast<double>(J), J};
}

// Composite trapezoid over the grid nodes of a sampled integrand.
inline double trapz(const std::vector<double>& f, double h) {
    if (f.size() < 2) return 0.0;
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
    return s * h;
}

} // namespace rwave
