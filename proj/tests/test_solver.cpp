#include <gtest/gtest.h>

#include <cmath>

#include "hjlb/solver.hpp"

using namespace hjlb;

namespace {

GridSpec spec(double t_end, int cells = 1200, double cfl = 0.5) {
    return {-3.0, 3.0, cells, t_end, cfl};
}

}  // namespace

TEST(Oracle, WorkedExampleValues) {
    const auto cone = make_cone_datum(1);
    const auto tp = make_oracle(BuiltinHamiltonian::transport_plus, cone);
    EXPECT_NEAR(tp.eval(0.5, std::log(2.0)), 0.375, 1e-15);
    const auto tn = make_oracle(BuiltinHamiltonian::transport_neg_u, cone);
    EXPECT_NEAR(tn.eval(0.5, 0.3), 0.849858807576003104, 1e-15);
    const auto ek = make_oracle(BuiltinHamiltonian::eikonal, cone, 1.0);
    EXPECT_NEAR(ek.eval(0.25, 0.25), 0.389400391535702434, 1e-15);
    // generic-datum eikonal path goes through the dense Hopf-Lax scan
    const auto ab = make_oracle(BuiltinHamiltonian::eikonal, make_abs_datum(1), 1.0);
    EXPECT_NEAR(ab.eval(0.8, 0.3), std::exp(-0.3) * 0.5, 1e-9);
    EXPECT_THROW(make_oracle(BuiltinHamiltonian::quadratic, cone),
                 std::invalid_argument);
}

TEST(Oracle, MeasuredSubgradients) {
    const auto cone = make_cone_datum(1);
    const auto tp = make_oracle(BuiltinHamiltonian::transport_plus, cone);
    {
        const auto s = measured_subgradient(tp, 0.3, 0.2);
        ASSERT_FALSE(s.empty);
        EXPECT_NEAR(s.min_norm(), std::exp(-0.4), 1e-10);
        EXPECT_NEAR(0.5 * (s.lo + s.hi), -std::exp(-0.4), 1e-10);
    }
    const auto ek = make_oracle(BuiltinHamiltonian::eikonal, cone, 1.0);
    {
        const auto s = measured_subgradient(ek, 0.25, 0.25);
        ASSERT_FALSE(s.empty);
        EXPECT_NEAR(0.5 * (s.lo + s.hi), -std::exp(-0.25), 1e-10);
    }
    EXPECT_TRUE(measured_subgradient(tp, 0.0, 0.2).empty);  // apex kink
}

TEST(Solve, ZeroDatumIsFixedPoint) {
    const auto zero = make_zero_datum(1);
    for (const auto kind :
         {BuiltinHamiltonian::transport_plus, BuiltinHamiltonian::eikonal}) {
        const auto m = make_builtin(kind, 1, kind == BuiltinHamiltonian::eikonal
                                                ? 1.0
                                                : 0.0);
        const auto sol = solve(m, zero, spec(0.3, 64));
        for (const double v : sol.values.back()) EXPECT_DOUBLE_EQ(v, 0.0);
    }
}

TEST(Solve, ConstantDatumPureDecay) {
    // eikonal with constant data: no spatial coupling, u(t) = k e^{-t};
    // a tiny cfl turns the update into sufficiently fine Euler stepping
    const auto m = make_builtin(BuiltinHamiltonian::eikonal, 1, 1.0);
    const auto k2 = make_constant_datum(1, 2.0);
    GridSpec gs{-1.0, 1.0, 16, 1.0, 1e-5};
    const auto sol = solve(m, k2, gs);
    for (const double v : sol.values.back())
        EXPECT_NEAR(v, 2.0 * std::exp(-1.0), 1e-6);
}

TEST(Solve, TransportConeValue) {
    const auto m = make_builtin(BuiltinHamiltonian::transport_plus, 1);
    const auto sol = solve(m, make_cone_datum(1), spec(std::log(2.0)));
    const Grid1D g = sol.spec.grid();
    const int i = g.nearest(0.5);
    EXPECT_NEAR(sol.values.back()[i], 0.375, 2e-2);
}

TEST(Solve, ErrorNormsAndFirstOrderConvergence) {
    const auto cone = make_cone_datum(1);
    for (const auto kind :
         {BuiltinHamiltonian::transport_plus, BuiltinHamiltonian::eikonal}) {
        const auto m =
            make_builtin(kind, 1, kind == BuiltinHamiltonian::eikonal ? 1.0 : 0.0);
        const auto oracle = make_oracle(kind, cone, 1.0);
        const auto coarse = solve(m, cone, spec(0.5, 1200));
        const auto e1 = error_norms(coarse, oracle, 0.5, 20);
        EXPECT_LE(e1.l1, 2e-2);
        EXPECT_LE(e1.linf_interior, 2e-2);
        const auto fine = solve(m, cone, spec(0.5, 2400));
        const auto e2 = error_norms(fine, oracle, 0.5, 40);
        const double ratio = e1.l1 / e2.l1;
        EXPECT_GE(ratio, 1.5);
        EXPECT_LE(ratio, 3.0);
    }
}

TEST(Solve, SelfComparisonIsZero) {
    const auto m = make_builtin(BuiltinHamiltonian::transport_plus, 1);
    const auto sol = solve(m, make_cone_datum(1), spec(0.25, 64));
    // rebuild an oracle that evaluates the numerical solution itself
    const Grid1D g = sol.spec.grid();
    const auto level = sol.level_near(0.25);
    double l1 = 0.0;
    for (int i = 0; i < g.points(); ++i)
        l1 += std::abs(sol.values[level][i] - sol.values[level][i]) * g.dx();
    EXPECT_DOUBLE_EQ(l1, 0.0);
}

TEST(Solve, MeasuredSubgradientFromScheme) {
    const auto m = make_builtin(BuiltinHamiltonian::transport_plus, 1);
    const auto sol = solve(m, make_cone_datum(1), spec(0.2));
    const auto s = measured_subgradient(sol, 0.3, 0.2);
    ASSERT_FALSE(s.empty);
    EXPECT_NEAR(s.min_norm(), std::exp(-0.4), 5e-2);
}

TEST(Solve, MonotoneStepInStencilNeighbors) {
    // the update is nondecreasing in u_{i-1} and u_{i+1}, and in u_i after the
    // e^{K3 dt} allowance, at cfl <= 0.5
    const auto m = make_builtin(BuiltinHamiltonian::transport_plus, 1);
    const double dx = 0.01, dt = 0.5 * dx / 3.0, x = 1.3, t = 0.1;
    const double sigma = 3.0;
    auto update = [&](double ul, double ui, double ur) {
        const double slope = (ur - ul) / (2.0 * dx);
        const double visc = sigma * (ur - 2.0 * ui + ul) / (2.0 * dx);
        return ui - dt * (m.eval(Vec{x}, t, ui, Vec{slope}) - visc);
    };
    Rng rng(314);
    for (int s = 0; s < 500; ++s) {
        const double ul = uniform(rng, -1.0, 1.0);
        const double ui = uniform(rng, -1.0, 1.0);
        const double ur = uniform(rng, -1.0, 1.0);
        const double d = uniform(rng, 1e-6, 0.1);
        EXPECT_GE(update(ul + d, ui, ur), update(ul, ui, ur) - 1e-14);
        EXPECT_GE(update(ul, ui, ur + d), update(ul, ui, ur) - 1e-14);
        const double k3 = m.constants.k3;
        EXPECT_GE(update(ul, ui + d, ur) + d * k3 * dt,
                  update(ul, ui, ur) - 1e-14);
    }
}

TEST(Solve, ValidationErrors) {
    const auto m = make_builtin(BuiltinHamiltonian::transport_plus, 1);
    const auto cone = make_cone_datum(1);
    GridSpec bad = spec(0.5);
    bad.cells = 8;
    EXPECT_THROW(solve(m, cone, bad), std::invalid_argument);
    bad = spec(0.5);
    bad.cfl = 1.5;
    EXPECT_THROW(solve(m, cone, bad), std::invalid_argument);
}

TEST(Solve, UnderstatedDissipationTripsTheGuard) {
    // declaring A2 = B2 = 0 makes sigma = 0 and the time step huge; the
    // central scheme blows up and the monotone-envelope guard must catch it
    auto m = make_builtin(BuiltinHamiltonian::transport_plus, 1);
    m.constants.a2 = 0.0;
    m.constants.b2 = 0.0;
    EXPECT_THROW(solve(m, make_cone_datum(1), spec(5.0, 64)), CflError);
}

TEST(Oracle, KinkLocations) {
    const auto cone = make_cone_datum(1);
    const auto ek = make_oracle(BuiltinHamiltonian::eikonal, cone, 1.0);
    const auto kinks = ek.kinks(0.25);
    ASSERT_EQ(kinks.size(), 3u);
    EXPECT_DOUBLE_EQ(kinks[2], 0.75);
    const auto tp = make_oracle(BuiltinHamiltonian::transport_plus, cone);
    EXPECT_DOUBLE_EQ(tp.kinks(0.5)[2], std::exp(0.5));
}
