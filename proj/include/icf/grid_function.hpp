#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "icf/errors.hpp"
#include "icf/expression.hpp"

namespace icf {

/// A function on [0,1] sampled at the uniform grid points z_j = j/N.
/// Samples are immutable after construction and must be finite.
class GridFunction {
public:
    GridFunction(int n_cells, std::vector<double> values)
        : cells_(n_cells), values_(std::move(values)) {
        if (cells_ < 8)
            throw ValidationError("grid must have at least 8 cells");
        if (values_.size() != static_cast<std::size_t>(cells_) + 1)
            throw ValidationError("grid expects n_cells + 1 samples");
        for (double v : values_)
            if (!std::isfinite(v))
                throw ValidationError("grid samples must be finite");
    }

    static GridFunction constant(int n_cells, double value) {
        return GridFunction(n_cells,
                            std::vector<double>(n_cells + 1, value));
    }

    int cells() const noexcept { return cells_; }
    double z(int j) const { return static_cast<double>(j) / cells_; }
    double operator[](int j) const { return values_[static_cast<std::size_t>(j)]; }
    std::span<const double> values() const noexcept { return values_; }

private:
    int cells_;
    std::vector<double> values_;
};

namespace detail {

inline void require_same_grid(const GridFunction& a, const GridFunction& b) {
    if (a.cells() != b.cells())
        throw ValidationError("grid functions must share the cell count");
}

}  // namespace detail

inline GridFunction sample_expression(const expr::Ast& ast, int n_cells) {
    std::vector<double> vals(static_cast<std::size_t>(n_cells) + 1);
    for (int j = 0; j <= n_cells; ++j) {
        const double zj = static_cast<double>(j) / n_cells;
        try {
            vals[static_cast<std::size_t>(j)] = ast.eval(zj);
        } catch (const EvalError& e) {
            throw EvalError(std::string(e.what()) + " (grid index " +
                            std::to_string(j) + ", z = " +
                            expr::format_number(zj) + ")");
        }
    }
    return GridFunction(n_cells, std::move(vals));
}

inline GridFunction product(const GridFunction& a, const GridFunction& b) {
    detail::require_same_grid(a, b);
    std::vector<double> vals(a.values().begin(), a.values().end());
    for (int j = 0; j <= a.cells(); ++j) vals[static_cast<std::size_t>(j)] *= b[j];
    return GridFunction(a.cells(), std::move(vals));
}

inline GridFunction difference(const GridFunction& a, const GridFunction& b) {
    detail::require_same_grid(a, b);
    std::vector<double> vals(a.values().begin(), a.values().end());
    for (int j = 0; j <= a.cells(); ++j) vals[static_cast<std::size_t>(j)] -= b[j];
    return GridFunction(a.cells(), std::move(vals));
}

/// Integrates across every cell spanned by `samples` (spacing h): composite
/// Simpson, with the 3/8 rule covering an odd trailing cell count. A single
/// cell falls back to the trapezoid rule; richer single-cell treatment lives
/// in integrate_range, which can reach neighbouring samples.
inline double composite_integral(std::span<const double> samples, double h) {
    if (samples.empty())
        throw ValidationError("composite_integral needs at least one sample");
    const std::size_t m = samples.size() - 1;
    if (m == 0) return 0.0;
    if (m == 1) return 0.5 * h * (samples[0] + samples[1]);
    const std::size_t simpson_end = (m % 2 == 0) ? m : m - 3;
    double sum = 0.0;
    for (std::size_t i = 0; i + 2 <= simpson_end; i += 2)
        sum += samples[i] + 4.0 * samples[i + 1] + samples[i + 2];
    double result = sum * h / 3.0;
    if (m % 2 != 0) {
        result += 3.0 * h / 8.0 *
                  (samples[m - 3] + 3.0 * samples[m - 2] +
                   3.0 * samples[m - 1] + samples[m]);
    }
    return result;
}

/// Integral over [z_lo, z_hi], endpoints restricted to grid points. Exact
/// for polynomials of degree <= 3 sampled on the grid: a one-cell range is
/// closed with the cubic through the four nearest samples, everything wider
/// goes through composite_integral.
inline double integrate_range(const GridFunction& g, int j_lo, int j_hi) {
    if (j_lo < 0 || j_hi > g.cells() || j_lo > j_hi)
        throw ValidationError("integration endpoints out of range");
    const int m = j_hi - j_lo;
    if (m == 0) return 0.0;
    const double h = 1.0 / g.cells();
    if (m == 1) {
        if (j_lo >= 1 && j_hi + 1 <= g.cells())
            return h *
                   (-g[j_lo - 1] + 13.0 * g[j_lo] + 13.0 * g[j_hi] -
                    g[j_hi + 1]) /
                   24.0;
        if (j_lo == 0)
            return h * (9.0 * g[0] + 19.0 * g[1] - 5.0 * g[2] + g[3]) / 24.0;
        return h *
               (g[j_hi - 3] - 5.0 * g[j_hi - 2] + 19.0 * g[j_hi - 1] +
                9.0 * g[j_hi]) /
               24.0;
    }
    return composite_integral(
        g.values().subspan(static_cast<std::size_t>(j_lo),
                           static_cast<std::size_t>(m) + 1),
        h);
}

/// Integral over [z_j, 1] using only the samples j..N. One cell short of
/// integrate_range's accuracy at j = N-1 (trapezoid instead of the window
/// rule), but never reads a sample left of z_j, so two integrands that agree
/// on [z_j, 1] integrate to bitwise-identical values.
inline double integrate_tail(const GridFunction& g, int j) {
    if (j < 0 || j > g.cells())
        throw ValidationError("integration endpoint out of range");
    return composite_integral(
        g.values().subspan(static_cast<std::size_t>(j)), 1.0 / g.cells());
}

/// Table of right tails T(j) = integral over [z_j, 1]; T(N) is exactly 0.
inline GridFunction tail_integral_table(const GridFunction& g) {
    std::vector<double> vals(static_cast<std::size_t>(g.cells()) + 1);
    for (int j = 0; j <= g.cells(); ++j)
        vals[static_cast<std::size_t>(j)] = integrate_range(g, j, g.cells());
    return GridFunction(g.cells(), std::move(vals));
}

/// Quadratic extrapolation of a uniform sequence one step past its last
/// sample: given values at t-3h, t-2h, t-h, estimates the value at t.
inline double extrapolate_step(double v3, double v2, double v1) {
    return v3 - 3.0 * v2 + 3.0 * v1;
}

/// Integral over [0, z_j] where the sample at z_j is owned by the data to
/// the right (the convention for step functions switching at z_j): the left
/// piece is closed by extrapolating the integrand from below instead of
/// using g[j]. For g continuous at z_j this agrees with the plain rule to
/// fourth order; for g stepping at z_j it integrates the left limit.
inline double integrate_left_closed(const GridFunction& g, int j) {
    if (j < 0 || j > g.cells())
        throw ValidationError("integration endpoint out of range");
    if (j == 0) return 0.0;
    const double h = 1.0 / g.cells();
    auto v = g.values();
    if (j == 1) return h * v[0];
    if (j == 2) return 2.0 * h * v[1];
    std::vector<double> s(v.begin(), v.begin() + j + 1);
    s[static_cast<std::size_t>(j)] = extrapolate_step(
        s[static_cast<std::size_t>(j) - 3], s[static_cast<std::size_t>(j) - 2],
        s[static_cast<std::size_t>(j) - 1]);
    return composite_integral(s, h);
}

/// Integral over [0,1] split at grid index j, treating g's sample at z_j as
/// the right-hand limit of a possible jump there. Both pieces stay strictly
/// on their own side of the split.
inline double integrate_split(const GridFunction& g, int j) {
    return integrate_left_closed(g, j) + integrate_tail(g, j);
}

/// CSV emission: header `z,value`, one row per grid point, full precision.
inline void write_csv(const GridFunction& g, std::ostream& os) {
    os << "z,value\n";
    for (int j = 0; j <= g.cells(); ++j)
        os << expr::format_number(g.z(j)) << ','
           << expr::format_number(g[j]) << '\n';
}

}  // namespace icf
