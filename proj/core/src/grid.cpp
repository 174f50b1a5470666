#include "ksfluid/grid.hpp"

#include <stdexcept>
#include <string>

namespace ksfluid {

bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.half_width == b.half_width && a.n == b.n;
}

GridSpec make_grid(double half_width, int n) {
    if (!(half_width > 0.0))
        throw std::invalid_argument("make_grid: half_width must be positive, got " +
                                    std::to_string(half_width));
    if (n < 8 || n % 2 != 0)
        throw std::invalid_argument("make_grid: n must be even and >= 8, got " +
                                    std::to_string(n));
    GridSpec g;
    g.half_width = half_width;
    g.n = n;
    g.dx = 2.0 * half_width / n;
    return g;
}

double ScalarField::integral() const {
    KahanSum s;
    for (double v : values) s.add(v);
    return s.value() * grid.cell_area();
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double ScalarField::max_value() const {
    double m = -HUGE_VAL;
    for (double v : values) m = std::max(m, v);
    return m;
}

bool ScalarField::all_finite() const {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

bool VectorField::all_finite() const {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    for (double v : y)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace ksfluid
