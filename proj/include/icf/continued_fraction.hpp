#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "icf/errors.hpp"

namespace icf {

/// One floor a_i / b_i of a finite continued fraction.
struct Floor {
    double a = 0.0;
    double b = 0.0;
};

//
// A finite continued fraction
//
//   b0 +       a1
//        ---------------
//        b1 +     a2
//             ----------
//             b2 +   a3
//                  -----
//                  ... + an/bn
//
// stored as the leading term plus the ordered floors.
//
struct FiniteFraction {
    double b0 = 0.0;
    std::vector<Floor> floors;

    int order() const noexcept { return static_cast<int>(floors.size()); }
};

/// Elementwise rates of change of a fraction's entries along a parameter.
/// Shape mirrors the fraction it differentiates; floors hold (da_i, db_i).
struct FractionRates {
    double b0 = 0.0;
    std::vector<Floor> floors;
};

/// Numerator/denominator pair of the final convergent, plus their ratio.
struct ForwardEval {
    double numerator = 0.0;
    double denominator = 0.0;
    double value = 0.0;
};

struct ValueRate {
    double value = 0.0;
    double rate = 0.0;
};

/// Denominators smaller than this raise BreakdownError instead of silently
/// overflowing to infinity. The fitting layers pass stricter, scale-relative
/// tolerances of their own.
inline constexpr double kDenominatorFloor = 1e-300;

namespace detail {

inline void check_entries(const FiniteFraction& cf) {
    if (!std::isfinite(cf.b0))
        throw ValidationError("fraction leading term must be finite");
    for (const Floor& fl : cf.floors)
        if (!std::isfinite(fl.a) || !std::isfinite(fl.b))
            throw ValidationError("fraction floor entries must be finite");
}

}  // namespace detail

/// Innermost-first evaluation. Throws BreakdownError naming the floor whose
/// denominator (b_i plus the already-evaluated tail) is below tolerance.
inline double eval_backward(const FiniteFraction& cf,
                            double denom_tol = kDenominatorFloor) {
    detail::check_entries(cf);
    double tail = 0.0;
    for (int i = cf.order(); i >= 1; --i) {
        const Floor& fl = cf.floors[static_cast<std::size_t>(i) - 1];
        const double denom = fl.b + tail;
        if (std::fabs(denom) < denom_tol)
            throw BreakdownError(
                "vanishing denominator at floor " + std::to_string(i), i);
        tail = fl.a / denom;
    }
    return cf.b0 + tail;
}

/// Three-term recurrence A_i = b_i A_{i-1} + a_i A_{i-2} (B_i likewise) with
/// A_{-1} = 1, B_{-1} = 0, A_0 = b0, B_0 = 1. Agrees with eval_backward
/// whenever the latter does not break down.
inline ForwardEval eval_forward(const FiniteFraction& cf,
                                double denom_tol = kDenominatorFloor) {
    detail::check_entries(cf);
    double a_prev2 = 1.0, b_prev2 = 0.0;
    double a_prev = cf.b0, b_prev = 1.0;
    for (const Floor& fl : cf.floors) {
        const double a_cur = fl.b * a_prev + fl.a * a_prev2;
        const double b_cur = fl.b * b_prev + fl.a * b_prev2;
        a_prev2 = a_prev;
        b_prev2 = b_prev;
        a_prev = a_cur;
        b_prev = b_cur;
    }
    if (std::fabs(b_prev) < denom_tol)
        throw BreakdownError("vanishing convergent denominator", cf.order());
    return {a_prev, b_prev, a_prev / b_prev};
}

/// Forward evaluation with first-derivative co-propagation: the rates give
/// d/dt of each entry along some parameter t, and the returned rate is
/// d/dt of the fraction value, (A'B - AB')/B^2.
inline ValueRate eval_with_derivative(const FiniteFraction& cf,
                                      const FractionRates& rates,
                                      double denom_tol = kDenominatorFloor) {
    detail::check_entries(cf);
    if (rates.floors.size() != cf.floors.size())
        throw ValidationError("rates must match the fraction's floor count");
    double A2 = 1.0, B2 = 0.0, dA2 = 0.0, dB2 = 0.0;
    double A1 = cf.b0, B1 = 1.0, dA1 = rates.b0, dB1 = 0.0;
    for (std::size_t i = 0; i < cf.floors.size(); ++i) {
        const double a = cf.floors[i].a, b = cf.floors[i].b;
        const double da = rates.floors[i].a, db = rates.floors[i].b;
        const double A = b * A1 + a * A2;
        const double dA = db * A1 + b * dA1 + da * A2 + a * dA2;
        const double B = b * B1 + a * B2;
        const double dB = db * B1 + b * dB1 + da * B2 + a * dB2;
        A2 = A1;
        B2 = B1;
        dA2 = dA1;
        dB2 = dB1;
        A1 = A;
        B1 = B;
        dA1 = dA;
        dB1 = dB;
    }
    if (std::fabs(B1) < denom_tol)
        throw BreakdownError("vanishing convergent denominator", cf.order());
    return {A1 / B1, (dA1 * B1 - A1 * dB1) / (B1 * B1)};
}

}  // namespace icf
