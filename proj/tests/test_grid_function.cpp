#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "icf/grid_function.hpp"

using icf::GridFunction;
using icf::integrate_range;
using icf::sample_expression;
using icf::tail_integral_table;

namespace {

GridFunction sample(const std::string& text, int n_cells) {
    return sample_expression(icf::expr::parse(text, "z"), n_cells);
}

}  // namespace

TEST_CASE("sampling hits the grid points") {
    const GridFunction g = sample("z", 8);
    REQUIRE(g.cells() == 8);
    for (int j = 0; j <= 8; ++j) CHECK(g[j] == j / 8.0);

    const GridFunction c = sample("2", 16);
    for (int j = 0; j <= 16; ++j) CHECK(c[j] == 2.0);
}

TEST_CASE("sampling propagates evaluation errors with the grid index") {
    try {
        sample("1/(z-0.5)", 8);
        FAIL("expected eval error");
    } catch (const icf::EvalError& e) {
        CHECK(std::string(e.what()).find("grid index 4") != std::string::npos);
    }
}

TEST_CASE("grid invariants are enforced") {
    CHECK_THROWS_AS(GridFunction(4, std::vector<double>(5, 1.0)),
                    icf::ValidationError);
    CHECK_THROWS_AS(GridFunction(8, std::vector<double>(5, 1.0)),
                    icf::ValidationError);
    std::vector<double> bad(9, 1.0);
    bad[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(GridFunction(8, bad), icf::ValidationError);
    CHECK_THROWS_AS(icf::product(GridFunction::constant(8, 1.0),
                                 GridFunction::constant(16, 1.0)),
                    icf::ValidationError);
}

TEST_CASE("quadrature reproduces simple closed forms") {
    const GridFunction one = GridFunction::constant(64, 1.0);
    CHECK_THAT(integrate_range(one, 0, 64),
               Catch::Matchers::WithinAbs(1.0, 1e-15));

    const GridFunction z = sample("z", 64);
    CHECK_THAT(integrate_range(z, 0, 64),
               Catch::Matchers::WithinAbs(0.5, 1e-14));

    const GridFunction z3 = sample("z^3", 64);
    CHECK_THAT(integrate_range(z3, 0, 32),
               Catch::Matchers::WithinAbs(1.0 / 64.0, 1e-12));

    // odd cell count exercises the 3/8 tail; still exact for cubics
    const double upper = 31.0 / 64.0;
    CHECK_THAT(integrate_range(z3, 0, 31),
               Catch::Matchers::WithinAbs(std::pow(upper, 4) / 4.0, 1e-14));

    // single-cell ranges close with the four-point cubic rule
    for (int j : {0, 1, 30, 62, 63}) {
        const double lo = j / 64.0, hi = (j + 1) / 64.0;
        CHECK_THAT(integrate_range(z3, j, j + 1),
                   Catch::Matchers::WithinAbs(
                       (std::pow(hi, 4) - std::pow(lo, 4)) / 4.0, 1e-15));
    }
}

TEST_CASE("integration endpoints are validated") {
    const GridFunction g = GridFunction::constant(8, 1.0);
    CHECK_THROWS_AS(integrate_range(g, -1, 4), icf::ValidationError);
    CHECK_THROWS_AS(integrate_range(g, 0, 9), icf::ValidationError);
    CHECK_THROWS_AS(integrate_range(g, 5, 4), icf::ValidationError);
    CHECK(integrate_range(g, 3, 3) == 0.0);
}

TEST_CASE("quadrature error decays at fourth order") {
    const double exact = std::exp(1.0) - 1.0;
    double previous = 0.0;
    for (int n : {64, 128, 256}) {
        const double err =
            std::fabs(integrate_range(sample("exp(z)", n), 0, n) - exact);
        if (previous > 0.0) CHECK(previous / err >= 12.0);
        previous = err;
    }
}

TEST_CASE("additivity of integrate_range") {
    // exact for cubics on any grid
    const GridFunction z3 = sample("z^3-z", 16);
    for (int b : {1, 5, 8, 13}) {
        const double split =
            integrate_range(z3, 0, b) + integrate_range(z3, b, 16);
        CHECK_THAT(split, Catch::Matchers::WithinAbs(
                              integrate_range(z3, 0, 16), 1e-15));
    }

    // smooth integrands at production resolution
    std::mt19937_64 rng(5150);
    std::uniform_int_distribution<int> cut(1, 1023);
    for (const char* text : {"exp(z)", "sin(3*z)+z*z", "1/(1+z)"}) {
        const GridFunction g = sample(text, 1024);
        const double total = integrate_range(g, 0, 1024);
        for (int trial = 0; trial < 20; ++trial) {
            const int a = cut(rng);
            const int b = std::uniform_int_distribution<int>(a, 1024)(rng);
            const double sum = integrate_range(g, 0, a) +
                               integrate_range(g, a, b) +
                               integrate_range(g, b, 1024);
            CHECK(std::fabs(sum - total) <= 1e-13 * (1.0 + std::fabs(total)));
        }
    }
}

TEST_CASE("tail integral table") {
    const GridFunction one = GridFunction::constant(32, 1.0);
    const GridFunction t1 = tail_integral_table(one);
    for (int j = 0; j <= 32; ++j)
        CHECK_THAT(t1[j], Catch::Matchers::WithinAbs(1.0 - j / 32.0, 1e-14));

    const GridFunction z = sample("z", 64);
    const GridFunction t2 = tail_integral_table(z);
    for (int j = 0; j <= 64; ++j) {
        const double xi = j / 64.0;
        CHECK_THAT(t2[j],
                   Catch::Matchers::WithinAbs((1.0 - xi * xi) / 2.0, 1e-14));
    }

    const GridFunction g = sample("exp(z)*sin(2*z)", 128);
    const GridFunction t3 = tail_integral_table(g);
    CHECK(t3[0] == integrate_range(g, 0, 128));
    CHECK(t3[128] == 0.0);
}

TEST_CASE("tail table is monotone for non-negative integrands") {
    for (const char* text : {"z*z", "1-z", "2+sin(5*z)"}) {
        const GridFunction g = sample(text, 256);
        const GridFunction t = tail_integral_table(g);
        for (int j = 0; j < 256; ++j) CHECK(t[j] >= t[j + 1] - 1e-15);
    }
}

TEST_CASE("split integral treats the switch sample as a right limit") {
    // Step data aligned with the split point: all samples below j are zero,
    // so the left piece must vanish identically and the split must agree
    // with the strictly-local tail bit for bit.
    const int N = 64;
    for (int j : {1, 2, 3, 17, 40, 63}) {
        std::vector<double> vals(N + 1, 0.0);
        for (int m = j; m <= N; ++m) vals[m] = 2.0 + std::sin(0.3 * m);
        const GridFunction g(N, vals);
        CHECK(icf::integrate_left_closed(g, j) == 0.0);
        CHECK(icf::integrate_split(g, j) == icf::integrate_tail(g, j));
    }

    // integrate_tail never reaches left of its endpoint: integrands that
    // agree on the tail integrate identically there
    {
        std::vector<double> a(N + 1, 0.0), b(N + 1, 0.0);
        for (int m = 0; m <= N; ++m) b[m] = std::cos(0.2 * m);
        for (int m = 50; m <= N; ++m) a[m] = b[m];
        CHECK(icf::integrate_tail(GridFunction(N, a), 50) ==
              icf::integrate_tail(GridFunction(N, b), 50));
        CHECK(icf::integrate_tail(GridFunction(N, a), 63) ==
              icf::integrate_tail(GridFunction(N, b), 63));
    }

    // For smooth data the split agrees with the plain rule to high order,
    // except at the two leftmost split points where the left closure only
    // has one or two samples to work with.
    const GridFunction smooth = sample("exp(z)+sin(2*z)", 512);
    const double whole = integrate_range(smooth, 0, 512);
    for (int j : {1, 2})
        CHECK_THAT(icf::integrate_split(smooth, j),
                   Catch::Matchers::WithinAbs(whole, 1e-4));
    for (int j : {3, 5, 100, 256, 509, 511, 512})
        CHECK_THAT(icf::integrate_split(smooth, j),
                   Catch::Matchers::WithinAbs(whole, 1e-8));
    CHECK(icf::integrate_split(smooth, 0) == whole);
}

TEST_CASE("csv emission") {
    const GridFunction g = sample("z*z", 8);
    std::ostringstream os;
    icf::write_csv(g, os);
    std::istringstream is(os.str());
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line == "z,value");
    int rows = 0;
    while (std::getline(is, line)) {
        if (rows == 4) {
            const auto comma = line.find(',');
            CHECK(std::stod(line.substr(0, comma)) == 0.5);
            CHECK(std::stod(line.substr(comma + 1)) == 0.25);
        }
        ++rows;
    }
    CHECK(rows == 9);
}
