#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "nlsym/errors.hpp"

namespace nlsym {

/// Uniform periodic grid on the box [-L/2, L/2)^d with N samples per axis.
/// N is a power of two and x = 0 is the sample with index N/2 on every axis,
/// so sign flips and axis permutations map the lattice onto itself.
struct Grid {
    int dim = 1;
    int n = 0;         // points per axis
    double length = 0; // box edge L

    Grid() = default;
    Grid(int d, int points_per_axis, double box_length);

    double spacing() const { return length / n; }
    std::size_t size() const {
        std::size_t s = 1;
        for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(n);
        return s;
    }
    double cell_volume() const {
        double v = 1;
        for (int a = 0; a < dim; ++a) v *= spacing();
        return v;
    }

    /// Coordinate of index j along one axis, in [-L/2, L/2).
    double coord(int j) const { return (j - n / 2) * spacing(); }

    /// Angular frequency 2*pi*kappa/L of FFT bin j, kappa in [-N/2, N/2).
    double freq(int j) const;

    /// Row-major flattening helpers.
    std::size_t flatten(const std::array<int, 3>& idx) const;
    std::array<int, 3> unflatten(std::size_t flat) const;

    bool operator==(const Grid& o) const {
        return dim == o.dim && n == o.n && length == o.length;
    }
};

}  // namespace nlsym
