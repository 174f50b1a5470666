// Uniform cell-centered grid on the square [-L, L]^2 and the field
// containers everything else operates on. Cell (i, j) is centered at
// (-L + (i+0.5) dx, -L + (j+0.5) dx) with dx = 2L/n; storage is row-major
// with i (the x index) fastest.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace ksfluid {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm2(Vec2 v) { return v.x * v.x + v.y * v.y; }

// Compensated (Neumaier) accumulator. All grid reductions go through this so
// that sums are deterministic and accurate enough for 1e-12 mass checks.
class KahanSum {
  public:
    void add(double v) {
        double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct GridSpec {
    double half_width = 1.0;  // L
    int n = 8;                // cells per axis, even, >= 8
    double dx = 0.25;         // 2L/n

    std::size_t cells() const { return static_cast<std::size_t>(n) * n; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * n + i; }
    double cell_x(int i) const { return -half_width + (i + 0.5) * dx; }
    double cell_y(int j) const { return -half_width + (j + 0.5) * dx; }
    double cell_area() const { return dx * dx; }
};

bool operator==(const GridSpec& a, const GridSpec& b);

// Throws std::invalid_argument unless L > 0, n >= 8 and n even.
GridSpec make_grid(double half_width, int n);

struct ScalarField {
    GridSpec grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const GridSpec& g, double fill = 0.0)
        : grid(g), values(g.cells(), fill) {}

    double& operator()(int i, int j) { return values[grid.index(i, j)]; }
    double operator()(int i, int j) const { return values[grid.index(i, j)]; }

    // sum(values) * dx^2, compensated
    double integral() const;
    double max_abs() const;
    double max_value() const;
    bool all_finite() const;
};

struct VectorField {
    GridSpec grid;
    std::vector<double> x, y;

    VectorField() = default;
    explicit VectorField(const GridSpec& g)
        : grid(g), x(g.cells(), 0.0), y(g.cells(), 0.0) {}

    Vec2 at(int i, int j) const {
        std::size_t k = grid.index(i, j);
        return {x[k], y[k]};
    }
    bool all_finite() const;
};

}  // namespace ksfluid
