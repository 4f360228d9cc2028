#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "icf/continued_fraction.hpp"
#include "icf/errors.hpp"

namespace icf {

/// Interpolating continued C-fraction for a scalar function:
///
///   value(x) = c0 + c1 (x - x0) / (1 + c2 (x - x1) / (1 + ... cn (x - x_{n-1}) / 1))
///
/// with coefficients chosen so the fraction matches prescribed values at the
/// nodes x_0..x_n.
struct InterpCFraction {
    std::vector<double> nodes;
    std::vector<double> coefficients;
};

namespace detail {

inline void check_model(const InterpCFraction& m) {
    if (m.nodes.empty() || m.nodes.size() != m.coefficients.size())
        throw ValidationError(
            "model needs matching, non-empty node and coefficient lists");
}

}  // namespace detail

/// Near-breakdown threshold for fractions whose denominators are 1 + tail:
/// rounded coefficients put evaluation points at a pole a few ulps off the
/// exact zero, and those must still surface as breakdown, not huge values.
inline constexpr double kUnitDenominatorTol = 1e-12;

inline double evaluate(const InterpCFraction& m, double x) {
    detail::check_model(m);
    FiniteFraction cf;
    cf.b0 = m.coefficients[0];
    for (std::size_t i = 1; i < m.coefficients.size(); ++i)
        cf.floors.push_back({m.coefficients[i] * (x - m.nodes[i - 1]), 1.0});
    return eval_backward(cf, kUnitDenominatorTol);
}

/// Fits the fraction to (nodes, values) by the inverted-chain recurrence:
/// c_0 = y_0, c_1 = (y_1 - y_0)/(x_1 - x_0), and each further c_k comes from
/// evaluating the chain
///
///   -1 + c_{k-1}(x_k - x_{k-2}) / (-1 + ... c_1(x_k - x_0) / (y_k - y_0))
///
/// divided by (x_k - x_{k-1}). Not every value set admits this form: a
/// vanishing chain denominator (most visibly y_k = y_0) raises
/// BreakdownError naming the coefficient index.
inline InterpCFraction fit_interp_cfraction(std::span<const double> nodes,
                                            std::span<const double> values) {
    if (nodes.empty() || nodes.size() != values.size())
        throw ValidationError(
            "fit needs matching, non-empty node and value lists");
    const auto [lo, hi] = std::minmax_element(nodes.begin(), nodes.end());
    const double span = *hi - *lo;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j)
            if (std::fabs(nodes[i] - nodes[j]) <= 1e-12 * span)
                throw ValidationError("interpolation nodes must be distinct");

    double y_scale = 0.0;
    for (double y : values) y_scale = std::max(y_scale, std::fabs(y));
    const double denom_tol = 1e-12 * (1.0 + y_scale);

    InterpCFraction m;
    m.nodes.assign(nodes.begin(), nodes.end());
    m.coefficients.resize(nodes.size());
    m.coefficients[0] = values[0];
    if (nodes.size() == 1) return m;
    m.coefficients[1] = (values[1] - values[0]) / (nodes[1] - nodes[0]);

    for (std::size_t k = 2; k < nodes.size(); ++k) {
        FiniteFraction chain;
        chain.b0 = -1.0;
        for (std::size_t i = k - 1; i >= 2; --i)
            chain.floors.push_back(
                {m.coefficients[i] * (nodes[k] - nodes[i - 1]), -1.0});
        chain.floors.push_back(
            {m.coefficients[1] * (nodes[k] - nodes[0]), values[k] - values[0]});
        double chain_value = 0.0;
        try {
            chain_value = eval_backward(chain, denom_tol);
        } catch (const BreakdownError& e) {
            throw BreakdownError(
                "no continued-fraction interpolant for these values: " +
                    std::string(e.what()) + " while fitting coefficient " +
                    std::to_string(k),
                static_cast<int>(k));
        }
        m.coefficients[k] = chain_value / (nodes[k] - nodes[k - 1]);
    }
    return m;
}

}  // namespace icf
