#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "icf/cfraction_fit.hpp"
#include "icf/continued_fraction.hpp"
#include "icf/node_system.hpp"

// Integral interpolation continued C-fraction. The fraction
//
//   Q(x, xi) = a0 + N_1/(1 + N_2/(1 + ... + N_n/1)),
//   N_i = integral over [0,1] of a_i(z) [x(z) - x^{i-1}(z, xi)] dz,
//
// interpolates the functional F(x) = f(integral of x) on every step node
// x^k(., xi) simultaneously in xi. Its kernels a_k are constructed level by
// level: a_1 from the derivative of xi -> F(x^1(., xi)), and each higher
// a_k from the derivative of the inverted tail chain
//
//   G_k(xi) = I_{k-1}/(-1 + I_{k-2}/(-1 + ... + I_1/Delta_k)),
//   I_j(xi) = integral over [xi,1] of a_j (x_k - x_{j-1}),
//   Delta_k(xi) = F(x^k(., xi)) - F(x_0),
//
// via a_k(xi) = -G_k'(xi) / (x_k(xi) - x_{k-1}(xi)). All chain elements have
// closed-form xi-derivatives, so G_k' comes from exact derivative
// propagation through the fraction rather than differencing. Both I_j and
// Delta_k vanish at xi = 1, making the chain a removable 0/0 there; the
// xi = 1 kernel sample is filled by quadratic extrapolation.
//
// Delta_k is computed in the same tail-integral form as the I_j, via
// Delta_k(xi) = integral over [xi,1] of f'(s_k(t)) (x_k(t) - x_0(t)) dt
// (integrate d/dt F(x^k(., t)) back from t = 1).
//
// The innermost denominator is rewritten before evaluation: with
// W = I_1 - Delta_k, the chain is algebraically
//
//   G_2 = 1 + W/Delta,    G_k = I_{k-1}/(-1 + ... + I_3/(-1 + I_2 Delta/W)).
//
// W has a double zero at xi = 1, and forming it as the difference of two
// separately integrated tables would divide quadrature noise by that zero
// squared. Instead W is its own tail table, of the difference integrand
// (x_k - x_0)(a_1 - f'(s_k)), which vanishes at t = 1; its quadrature error
// then scales with the integrand and the ratios stay accurate up to the
// last interior grid point.
//
// The chain tables also get a degree-6 end rule on the final six cells: the
// chain divides by table values that vanish at xi = 1, so a composite-rule
// endpoint error of order h^5 surfaces in the kernels amplified by up to
// 1/h^2, and that noise cascades from each kernel level into the next. The
// sharper end rule keeps the construction fourth-order overall.

namespace icf {

struct KernelSet {
    NodeSystem system;
    double a0 = 0.0;
    std::vector<GridFunction> kernels;   // a_1..a_n sampled on the xi grid
    std::vector<std::string> warnings;   // near-degenerate configurations

    int floor_count() const noexcept {
        return static_cast<int>(kernels.size());
    }
    int cells() const { return system.cells(); }
};

/// The inverted tail of the fraction for switch level `target`, with the
/// closed-form elementwise derivatives needed to differentiate it. The
/// integrands double as the (negated) derivatives of their own tails:
/// d/dxi I_j(xi) = -a_j(xi) (x_k(xi) - x_{j-1}(xi)).
struct TailChain {
    int target;
    std::vector<GridFunction> integrands;  // a_j (x_k - x_{j-1}), j = 1..k-1
    std::vector<GridFunction> tails;       // I_j(xi)
    GridFunction delta_integrand;          // f'(s_k(t)) (x_k(t) - x_0(t))
    GridFunction delta;                    // F(x^k(., xi)) - F(x_0)
    GridFunction w_integrand;              // integrand of I_1 minus delta's
    GridFunction w;                        // W(xi) = I_1(xi) - Delta(xi)
    double scale = 1.0;                    // magnitude floor for breakdown
};

namespace detail {

// Integral over [z_{N-m}, 1], m <= 6, from the last seven samples; exact
// for polynomials of degree <= 6.
inline double end_zone_integral(const GridFunction& g, int m) {
    static constexpr double kWeights[6][7] = {
        {-863.0 / 60480, 263.0 / 2520, -6737.0 / 20160, 586.0 / 945,
         -15487.0 / 20160, 2713.0 / 2520, 19087.0 / 60480},
        {-37.0 / 3780, 22.0 / 315, -269.0 / 1260, 332.0 / 945, 11.0 / 1260,
         94.0 / 63, 1139.0 / 3780},
        {-29.0 / 2240, 27.0 / 280, -729.0 / 2240, 34.0 / 35, 1161.0 / 2240,
         81.0 / 56, 137.0 / 448},
        {-8.0 / 945, 16.0 / 315, 58.0 / 315, 1504.0 / 945, 128.0 / 315,
         464.0 / 315, 286.0 / 945},
        {-275.0 / 12096, 235.0 / 504, 3875.0 / 4032, 250.0 / 189,
         2125.0 / 4032, 725.0 / 504, 3715.0 / 12096},
        {41.0 / 140, 54.0 / 35, 27.0 / 140, 68.0 / 35, 27.0 / 140, 54.0 / 35,
         41.0 / 140},
    };
    const double* w = kWeights[m - 1];
    const int base = g.cells() - 6;
    double sum = 0.0;
    for (int i = 0; i < 7; ++i) sum += w[i] * g[base + i];
    return sum / g.cells();
}

// Tail table with a degree-6 end rule over the last six cells.
inline GridFunction refined_tail_table(const GridFunction& g) {
    const int N = g.cells();
    std::vector<double> vals(static_cast<std::size_t>(N) + 1);
    const double full_end = end_zone_integral(g, 6);
    for (int j = 0; j <= N; ++j) {
        const int m = N - j;
        if (m == 0)
            vals[static_cast<std::size_t>(j)] = 0.0;
        else if (m <= 6)
            vals[static_cast<std::size_t>(j)] = end_zone_integral(g, m);
        else
            vals[static_cast<std::size_t>(j)] =
                integrate_range(g, j, N - 6) + full_end;
    }
    return GridFunction(N, std::move(vals));
}

inline double table_magnitude(const GridFunction& g) {
    double m = 0.0;
    for (int j = 0; j <= g.cells(); ++j) m = std::max(m, std::fabs(g[j]));
    return m;
}

// One step of degree-4 extrapolation past the last computed sample. The
// kernel's endpoint sample re-enters the next level's chain tables, where
// endpoint errors are amplified; quadratic extrapolation's O(h^3) error is
// what a fourth-order construction cannot afford there.
inline double extrapolate_endpoint(const std::vector<double>& v,
                                   std::size_t n) {
    return 5.0 * v[n - 1] - 10.0 * v[n - 2] + 10.0 * v[n - 3] -
           5.0 * v[n - 4] + v[n - 5];
}

}  // namespace detail

inline TailChain make_tail_chain(const NodeSystem& sys,
                                 std::span<const GridFunction> kernels,
                                 int target) {
    if (target < 2 || target > sys.floor_count())
        throw ValidationError("tail chain target must be in [2, n]");
    if (static_cast<int>(kernels.size()) < target - 1)
        throw ValidationError("tail chain needs the kernels below its target");
    const int N = sys.cells();
    const GridFunction& xk = sys.nodes[static_cast<std::size_t>(target)];

    std::vector<GridFunction> integrands;
    std::vector<GridFunction> tails;
    integrands.reserve(static_cast<std::size_t>(target) - 1);
    tails.reserve(static_cast<std::size_t>(target) - 1);
    for (int j = 1; j <= target - 1; ++j) {
        GridFunction integrand =
            product(kernels[static_cast<std::size_t>(j) - 1],
                    difference(xk, sys.nodes[static_cast<std::size_t>(j) - 1]));
        tails.push_back(detail::refined_tail_table(integrand));
        integrands.push_back(std::move(integrand));
    }

    std::vector<double> delta_integrand(static_cast<std::size_t>(N) + 1);
    for (int j = 0; j <= N; ++j) {
        // -rate = f'(s_k(t)) (x_k(t) - x_0(t))
        delta_integrand[static_cast<std::size_t>(j)] =
            -moment_and_derivative(sys, target, j).rate;
    }
    GridFunction delta_g(N, std::move(delta_integrand));
    GridFunction delta = detail::refined_tail_table(delta_g);
    GridFunction w_g = difference(integrands.front(), delta_g);
    GridFunction w = detail::refined_tail_table(w_g);
    double scale = std::max(detail::table_magnitude(delta),
                            detail::table_magnitude(w));
    for (const GridFunction& t : tails)
        scale = std::max(scale, detail::table_magnitude(t));
    return TailChain{target,          std::move(integrands), std::move(tails),
                     std::move(delta_g), std::move(delta),
                     std::move(w_g),  std::move(w),          scale};
}

/// Value and xi-derivative of the tail chain at an interior grid point.
/// xi_index = N is excluded: the chain is 0/0 there.
inline ValueRate tail_fraction(const TailChain& chain, int xi_index) {
    const int N = chain.delta.cells();
    if (xi_index < 0 || xi_index >= N)
        throw ValidationError(
            "tail chain is only defined left of the final grid point");
    const int k = chain.target;
    const double delta = chain.delta[xi_index];
    const double d_delta = -chain.delta_integrand[xi_index];
    const double w = chain.w[xi_index];
    const double d_w = -chain.w_integrand[xi_index];
    FiniteFraction cf;
    FractionRates rates;
    if (k == 2) {
        cf.b0 = 1.0;
        cf.floors.push_back({w, delta});
        rates.floors.push_back({d_w, d_delta});
    } else {
        cf.b0 = 0.0;
        for (int j = k - 1; j >= 3; --j) {
            const auto idx = static_cast<std::size_t>(j) - 1;
            cf.floors.push_back({chain.tails[idx][xi_index], -1.0});
            rates.floors.push_back({-chain.integrands[idx][xi_index], 0.0});
        }
        const double i2 = chain.tails[1][xi_index];
        const double d_i2 = -chain.integrands[1][xi_index];
        cf.floors.push_back({i2 * delta, w});
        rates.floors.push_back({d_i2 * delta + i2 * d_delta, d_w});
    }
    try {
        // relative near-zero test: rounding keeps an unsolvable
        // configuration's vanishing denominator at ~1e-16 of the chain
        // scale, and that must not pass as a huge finite kernel
        return eval_with_derivative(cf, rates,
                                    1e-12 * (1.0 + chain.scale));
    } catch (const BreakdownError& e) {
        throw BreakdownError(
            "tail chain for level " + std::to_string(k) +
                " breaks down at xi = " +
                expr::format_number(chain.delta.z(xi_index)) + ": " + e.what(),
            e.floor_index());
    }
}

/// Builds the full kernel set for a node system. Kernels are computed level
/// by level since the chain at level k integrates all lower kernels.
inline KernelSet compute_kernels(const NodeSystem& sys) {
    const int n = sys.floor_count();
    const int N = sys.cells();
    KernelSet ks{sys, 0.0, {}, {}};
    const double s0 = integrate_range(sys.nodes[0], 0, N);
    ks.a0 = sys.f.value(s0);

    // The chain limits at xi = 1 implicitly divide by f', f'', ...; a
    // vanishing low-order derivative of f at the base moment degrades the
    // construction without making it break down outright.
    for (int order = 1; order <= n - 1; ++order)
        if (std::fabs(sys.f.derivative(order, s0)) < 1e-9)
            ks.warnings.push_back(
                "derivative of order " + std::to_string(order) +
                " of f nearly vanishes at the base moment s0 = " +
                expr::format_number(s0) +
                "; kernel construction may degrade");

    {
        std::vector<double> vals(static_cast<std::size_t>(N) + 1);
        for (int j = 0; j <= N; ++j) {
            const MomentInfo mi = moment_and_derivative(sys, 1, j);
            vals[static_cast<std::size_t>(j)] =
                -mi.rate / (sys.nodes[1][j] - sys.nodes[0][j]);
        }
        ks.kernels.emplace_back(N, std::move(vals));
    }

    for (int k = 2; k <= n; ++k) {
        const TailChain chain = make_tail_chain(sys, ks.kernels, k);
        std::vector<double> vals(static_cast<std::size_t>(N) + 1);
        for (int j = 0; j < N; ++j) {
            const ValueRate g = tail_fraction(chain, j);
            vals[static_cast<std::size_t>(j)] =
                -g.rate /
                (sys.nodes[static_cast<std::size_t>(k)][j] -
                 sys.nodes[static_cast<std::size_t>(k) - 1][j]);
        }
        // xi = 1 is the removable 0/0 of the chain; extend by extrapolation
        vals[static_cast<std::size_t>(N)] =
            detail::extrapolate_endpoint(vals, static_cast<std::size_t>(N));
        ks.kernels.emplace_back(N, std::move(vals));
    }
    return ks;
}

/// Value of the integral fraction at an arbitrary grid function x. Each
/// floor numerator integrates a_i (x - x^{i-1}(., xi)); the split at the
/// switch point treats the xi sample as the right-hand limit, so a step in x
/// aligned with xi is integrated cleanly.
inline double evaluate(const KernelSet& ks, const GridFunction& x,
                       int xi_index) {
    detail::require_same_grid(x, ks.system.nodes[0]);
    if (xi_index < 0 || xi_index > ks.cells())
        throw ValidationError("switch index out of range");
    FiniteFraction cf;
    cf.b0 = ks.a0;
    for (int i = 1; i <= ks.floor_count(); ++i) {
        const GridFunction reference =
            continual_node(ks.system, i - 1, xi_index);
        const GridFunction integrand =
            product(ks.kernels[static_cast<std::size_t>(i) - 1],
                    difference(x, reference));
        cf.floors.push_back({integrate_split(integrand, xi_index), 1.0});
    }
    return eval_backward(cf, kUnitDenominatorTol);
}

/// Value of the fraction truncated at level k when x is the step node
/// x^k(., xi) itself: the first k numerators reduce to right tails
/// integral over [xi,1] of a_i (x_k - x_{i-1}), and every higher floor
/// vanishes identically. Uses the same strictly-local tail quadrature as
/// evaluate(), so the two agree bit-for-bit on step nodes.
inline double evaluate_at_node(const KernelSet& ks, int k, int xi_index) {
    if (k < 0 || k > ks.floor_count())
        throw ValidationError("node index out of range");
    if (xi_index < 0 || xi_index > ks.cells())
        throw ValidationError("switch index out of range");
    if (k == 0) return ks.a0;
    FiniteFraction cf;
    cf.b0 = ks.a0;
    const GridFunction& xk = ks.system.nodes[static_cast<std::size_t>(k)];
    for (int i = 1; i <= k; ++i) {
        const GridFunction integrand =
            product(ks.kernels[static_cast<std::size_t>(i) - 1],
                    difference(xk, ks.system.nodes[static_cast<std::size_t>(i) - 1]));
        cf.floors.push_back({integrate_tail(integrand, xi_index), 1.0});
    }
    return eval_backward(cf, kUnitDenominatorTol);
}

struct InterpolationReport {
    int floor_count = 0;
    int cells = 0;
    /// residuals[k][j] = |Q(x^k(., z_j)) - F(x^k(., z_j))|; NaN where the
    /// fraction broke down.
    std::vector<std::vector<double>> residuals;
    double max_residual = 0.0;
    std::vector<std::pair<int, int>> breakdowns;  // (level, xi index)
};

/// Checks the continual interpolation conditions on the whole (k, xi) grid.
/// The functional side F(x^k(., xi)) is evaluated through the split moment
/// s_k(xi); at xi = 1 both sides collapse to F(x_0) exactly.
inline InterpolationReport verify_interpolation(const KernelSet& ks) {
    const NodeSystem& sys = ks.system;
    const int n = ks.floor_count();
    const int N = ks.cells();
    InterpolationReport rep;
    rep.floor_count = n;
    rep.cells = N;
    rep.residuals.assign(static_cast<std::size_t>(n) + 1,
                         std::vector<double>(static_cast<std::size_t>(N) + 1,
                                             0.0));

    // numerator tables: tails[k-1][i-1](xi) = integral over [xi,1] of
    // a_i (x_k - x_{i-1})
    std::vector<std::vector<GridFunction>> tails;
    tails.reserve(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        std::vector<GridFunction> row;
        row.reserve(static_cast<std::size_t>(k));
        for (int i = 1; i <= k; ++i)
            row.push_back(tail_integral_table(product(
                ks.kernels[static_cast<std::size_t>(i) - 1],
                difference(sys.nodes[static_cast<std::size_t>(k)],
                           sys.nodes[static_cast<std::size_t>(i) - 1]))));
        tails.push_back(std::move(row));
    }

    for (int k = 0; k <= n; ++k) {
        for (int j = 0; j <= N; ++j) {
            const double f_val =
                (k == 0)
                    ? ks.a0
                    : sys.f.value(moment_and_derivative(sys, k, j).moment);
            double q_val = ks.a0;
            if (k > 0) {
                FiniteFraction cf;
                cf.b0 = ks.a0;
                for (int i = 1; i <= k; ++i)
                    cf.floors.push_back(
                        {tails[static_cast<std::size_t>(k) - 1]
                              [static_cast<std::size_t>(i) - 1][j],
                         1.0});
                try {
                    q_val = eval_backward(cf, kUnitDenominatorTol);
                } catch (const BreakdownError&) {
                    rep.breakdowns.emplace_back(k, j);
                    rep.residuals[static_cast<std::size_t>(k)]
                                 [static_cast<std::size_t>(j)] =
                        std::numeric_limits<double>::quiet_NaN();
                    continue;
                }
            }
            const double r = std::fabs(q_val - f_val);
            rep.residuals[static_cast<std::size_t>(k)]
                         [static_cast<std::size_t>(j)] = r;
            rep.max_residual = std::max(rep.max_residual, r);
        }
    }
    return rep;
}

/// Value of the inverted tail chain at (level, xi); the proofs' diagnostic
/// quantity, which tends to 1 as xi -> 1 for non-degenerate f.
inline double tail_chain_value(const KernelSet& ks, int level, int xi_index) {
    const TailChain chain = make_tail_chain(
        ks.system, std::span(ks.kernels).first(static_cast<std::size_t>(level) - 1),
        level);
    return tail_fraction(chain, xi_index).value;
}

struct ReductionReport {
    std::vector<double> integrated_coefficients;  // full-range kernel integrals
    InterpCFraction scalar;                       // fit of (x_i, f(x_i))
    double a0_error = 0.0;
    std::vector<double> coefficient_errors;
    double max_error = 0.0;
};

/// With constant node functions, integrating each kernel over [0,1] must
/// reproduce the scalar continued-fraction coefficients fitted to the node
/// values f(x_i). Reports both sets and their discrepancies.
inline ReductionReport scalar_reduction_report(const KernelSet& ks) {
    const NodeSystem& sys = ks.system;
    const int N = ks.cells();
    std::vector<double> node_values;
    for (const GridFunction& g : sys.nodes) {
        double lo = g[0], hi = g[0];
        for (int j = 0; j <= N; ++j) {
            lo = std::min(lo, g[j]);
            hi = std::max(hi, g[j]);
        }
        if (hi - lo > 1e-12 * (1.0 + std::fabs(hi)))
            throw ValidationError(
                "reduction check requires constant node functions");
        node_values.push_back(g[0]);
    }
    std::vector<double> values;
    values.reserve(node_values.size());
    for (double x : node_values) values.push_back(sys.f.value(x));

    ReductionReport rep;
    rep.scalar = fit_interp_cfraction(node_values, values);
    rep.a0_error = std::fabs(ks.a0 - rep.scalar.coefficients[0]);
    rep.max_error = rep.a0_error;
    for (int m = 1; m <= ks.floor_count(); ++m) {
        const double integrated = integrate_range(
            ks.kernels[static_cast<std::size_t>(m) - 1], 0, N);
        rep.integrated_coefficients.push_back(integrated);
        const double err = std::fabs(
            integrated - rep.scalar.coefficients[static_cast<std::size_t>(m)]);
        rep.coefficient_errors.push_back(err);
        rep.max_error = std::max(rep.max_error, err);
    }
    return rep;
}

}  // namespace icf
