#include "nlsym/grid.hpp"

#include <cmath>

namespace nlsym {

namespace {
bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}

Grid::Grid(int d, int points_per_axis, double box_length)
    : dim(d), n(points_per_axis), length(box_length) {
    if (dim < 1 || dim > 3) throw InvalidGrid("grid dimension must be 1, 2 or 3");
    if (!is_power_of_two(n)) throw InvalidGrid("points per axis must be a power of two");
    if (!(length > 0) || !std::isfinite(length)) throw InvalidGrid("box length must be positive");
}

double Grid::freq(int j) const {
    const int kappa = (j < n / 2) ? j : j - n;
    return 2.0 * M_PI * kappa / length;
}

std::size_t Grid::flatten(const std::array<int, 3>& idx) const {
    std::size_t flat = 0;
    for (int a = 0; a < dim; ++a) flat = flat * n + static_cast<std::size_t>(idx[a]);
    return flat;
}

std::array<int, 3> Grid::unflatten(std::size_t flat) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = dim - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(flat % n);
        flat /= n;
    }
    return idx;
}

}  // namespace nlsym
