#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "icf/errors.hpp"
#include "icf/expression.hpp"
#include "icf/grid_function.hpp"

namespace icf {

/// Scalar function f together with its symbolic derivatives up to a fixed
/// order, evaluated pointwise. Immutable after construction.
class Functional {
public:
    Functional(expr::Ast f, int max_order) {
        derivs_.reserve(static_cast<std::size_t>(max_order) + 1);
        derivs_.push_back(std::move(f));
        for (int k = 1; k <= max_order; ++k)
            derivs_.push_back(derivs_.back().derivative());
    }

    double value(double s) const { return derivs_.front().eval(s); }

    double derivative(int order, double s) const {
        if (order < 0 || order >= static_cast<int>(derivs_.size()))
            throw ValidationError("derivative order out of range");
        return derivs_[static_cast<std::size_t>(order)].eval(s);
    }

    int max_order() const noexcept {
        return static_cast<int>(derivs_.size()) - 1;
    }

    const expr::Ast& ast(int order = 0) const {
        return derivs_.at(static_cast<std::size_t>(order));
    }

private:
    std::vector<expr::Ast> derivs_;
};

/// Evaluates the integral functional F(x) = f(integral of x over [0,1]).
inline double apply_functional(const Functional& f, const GridFunction& x) {
    return f.value(integrate_range(x, 0, x.cells()));
}

/// Node functions x_0..x_n on a shared grid plus the scalar f defining the
/// functional. The node functions must be pointwise separated.
struct NodeSystem {
    std::vector<GridFunction> nodes;
    Functional f;

    int floor_count() const noexcept {
        return static_cast<int>(nodes.size()) - 1;
    }
    int cells() const { return nodes.front().cells(); }
};

inline NodeSystem make_node_system(expr::Ast f,
                                   std::vector<GridFunction> nodes) {
    if (nodes.size() < 2)
        throw ValidationError("a node system needs at least two node functions");
    const int cells = nodes.front().cells();
    for (const GridFunction& g : nodes)
        if (g.cells() != cells)
            throw ValidationError("node functions must share the grid");
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j)
            for (int m = 0; m <= cells; ++m)
                if (std::fabs(nodes[i][m] - nodes[j][m]) <= 1e-9)
                    throw ValidationError(
                        "node functions " + std::to_string(i) + " and " +
                        std::to_string(j) + " are not separated at z = " +
                        expr::format_number(nodes[i].z(m)));
    const int order = std::max(1, static_cast<int>(nodes.size()) - 2);
    return NodeSystem{std::move(nodes), Functional(std::move(f), order)};
}

inline NodeSystem make_node_system(std::string_view f_text,
                                   std::span<const std::string> node_texts,
                                   int n_cells) {
    std::vector<GridFunction> nodes;
    nodes.reserve(node_texts.size());
    for (const std::string& text : node_texts)
        nodes.push_back(sample_expression(expr::parse(text, "z"), n_cells));
    return make_node_system(expr::parse(f_text, "s"), std::move(nodes));
}

/// The step node x^i(., xi): x_0 below the switch point, x_i from the switch
/// point on (the sample at z = xi belongs to x_i). i = 0 returns x_0
/// regardless of xi.
inline GridFunction continual_node(const NodeSystem& sys, int i,
                                   int xi_index) {
    if (i < 0 || i > sys.floor_count())
        throw ValidationError("node index out of range");
    if (xi_index < 0 || xi_index > sys.cells())
        throw ValidationError("switch index out of range");
    if (i == 0) return sys.nodes[0];
    const GridFunction& lo = sys.nodes[0];
    const GridFunction& hi = sys.nodes[static_cast<std::size_t>(i)];
    std::vector<double> vals(static_cast<std::size_t>(sys.cells()) + 1);
    for (int j = 0; j <= sys.cells(); ++j)
        vals[static_cast<std::size_t>(j)] = (j < xi_index) ? lo[j] : hi[j];
    return GridFunction(sys.cells(), std::move(vals));
}

/// Moment of the step node and the closed-form derivative of the functional
/// along the switch point:
///
///   s_k(xi)  = integral of x_0 over [0, xi] + integral of x_k over [xi, 1]
///   rate     = d/dxi F(x^k(., xi)) = f'(s_k(xi)) (x_0(xi) - x_k(xi))
///
/// The split at the (grid-resident) switch point keeps the quadrature
/// fourth-order even though the step node itself is discontinuous.
struct MomentInfo {
    double moment = 0.0;
    double rate = 0.0;
};

inline MomentInfo moment_and_derivative(const NodeSystem& sys, int k,
                                        int xi_index) {
    if (k < 1 || k > sys.floor_count())
        throw ValidationError("node index out of range");
    if (xi_index < 0 || xi_index > sys.cells())
        throw ValidationError("switch index out of range");
    const GridFunction& x0 = sys.nodes[0];
    const GridFunction& xk = sys.nodes[static_cast<std::size_t>(k)];
    const double moment = integrate_range(x0, 0, xi_index) +
                          integrate_range(xk, xi_index, sys.cells());
    const double rate =
        sys.f.derivative(1, moment) * (x0[xi_index] - xk[xi_index]);
    return {moment, rate};
}

}  // namespace icf
