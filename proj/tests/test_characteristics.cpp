#include <gtest/gtest.h>

#include <cmath>

#include "hjlb/characteristics.hpp"

using namespace hjlb;

namespace {

HamiltonianModel transport() {
    return make_builtin(BuiltinHamiltonian::transport_plus, 1);
}
HamiltonianModel eikonal() { return make_builtin(BuiltinHamiltonian::eikonal, 1, 1.0); }

// closed-form trajectory of the transport system:
//   xi(s) = x e^{s-t},  eta(s) = p e^{2(t-s)},  u(s) = u e^{t-s}
struct TransportExact {
    double x, t, p, u;
    double xi(double s) const { return x * std::exp(s - t); }
    double eta(double s) const { return p * std::exp(2.0 * (t - s)); }
    double uval(double s) const { return u * std::exp(t - s); }
};

const TransportExact kTransportCase{0.5, std::log(2.0), -0.25, 0.375};

TerminalCondition transport_terminal() {
    return {Vec{kTransportCase.x}, kTransportCase.t, Vec{kTransportCase.p},
            kTransportCase.u};
}

}  // namespace

TEST(Backward, TransportClosedForm) {
    const auto path = integrate_backward(transport(), transport_terminal(), 1000);
    EXPECT_NEAR(path.xi.front()[0], 0.25, 1e-10);
    EXPECT_NEAR(path.eta.front()[0], -1.0, 1e-10);
    EXPECT_NEAR(path.u_xi.front(), 0.75, 1e-10);
    // interior nodes follow the closed form too
    for (std::size_t j = 0; j < path.times.size(); j += 100) {
        const double s = path.times[j];
        EXPECT_NEAR(path.xi[j][0], kTransportCase.xi(s), 1e-10);
        EXPECT_NEAR(path.eta[j][0], kTransportCase.eta(s), 1e-10);
        EXPECT_NEAR(path.u_xi[j], kTransportCase.uval(s), 1e-10);
    }
}

TEST(Backward, EikonalClosedForm) {
    // eta(s) = p e^{t-s}, xi(s) = x + c(t-s) for p < 0
    TerminalCondition term{Vec{0.25}, 0.25, Vec{-std::exp(-0.25)},
                           std::exp(-0.25) * 0.5};
    const auto path = integrate_backward(eikonal(), term, 1000);
    EXPECT_NEAR(path.xi.front()[0], 0.5, 1e-10);
    EXPECT_NEAR(path.eta.front()[0], -1.0, 1e-10);
    EXPECT_NEAR(path.u_xi.front(), 0.5, 1e-10);
}

TEST(Backward, TinyHorizonIsIdentity) {
    TerminalCondition term{Vec{0.3}, 1e-9, Vec{0.7}, 0.2};
    const auto path = integrate_backward(transport(), term, 1);
    EXPECT_NEAR(path.xi.front()[0], 0.3, 1e-8);
    EXPECT_NEAR(path.eta.front()[0], 0.7, 1e-8);
    EXPECT_NEAR(path.u_xi.front(), 0.2, 1e-8);
}

TEST(Backward, EikonalSingularityRefused) {
    TerminalCondition term{Vec{0.25}, 0.25, Vec{0.0}, 0.1};
    EXPECT_THROW(integrate_backward(eikonal(), term, 10), SingularGradientError);
}

TEST(Forward, RoundTripAllBuiltins) {
    const std::vector<HamiltonianModel> models = {
        transport(), make_builtin(BuiltinHamiltonian::transport_minus, 1),
        make_builtin(BuiltinHamiltonian::transport_neg_u, 1), eikonal(),
        make_builtin(BuiltinHamiltonian::quadratic, 1, 1.0)};
    Rng rng(2024);
    for (const auto& m : models) {
        for (int rep = 0; rep < 5; ++rep) {
            TerminalCondition term;
            term.x = Vec{uniform(rng, -0.8, 0.8)};
            term.t = uniform(rng, 0.2, 1.0);
            term.p = Vec{uniform(rng, 0.2, 1.0) * (rep % 2 ? 1.0 : -1.0)};
            term.u = uniform(rng, -0.5, 0.5);
            const auto back = integrate_backward(m, term, 1000);
            const auto fwd =
                integrate_forward(m, back.xi.front(), back.eta.front(),
                                  back.u_xi.front(), term.t, 1000);
            EXPECT_NEAR(fwd.xi.back()[0], term.x[0], 1e-8);
            EXPECT_NEAR(fwd.eta.back()[0], term.p[0], 1e-8);
            EXPECT_NEAR(fwd.u_xi.back(), term.u, 1e-8);
        }
    }
}

TEST(Forward, ZeroHamiltonianConstantPath) {
    HamiltonianModel zero;
    zero.dimension = 1;
    zero.eval = [](const Vec&, double, double, const Vec&) { return 0.0; };
    zero.grad_x = [](const Vec& x, double, double, const Vec&) {
        return Vec(x.size(), 0.0);
    };
    zero.grad_p = [](const Vec& x, double, double, const Vec&) {
        return Vec(x.size(), 0.0);
    };
    zero.grad_u = [](const Vec&, double, double, const Vec&) { return 0.0; };
    const auto path = integrate_forward(zero, Vec{0.4}, Vec{-0.7}, 0.9, 1.0, 50);
    for (std::size_t j = 0; j < path.times.size(); ++j) {
        EXPECT_DOUBLE_EQ(path.xi[j][0], 0.4);
        EXPECT_DOUBLE_EQ(path.eta[j][0], -0.7);
        EXPECT_DOUBLE_EQ(path.u_xi[j], 0.9);
    }
}

TEST(Forward, QuadraticClosedForm) {
    // eta(s) = e^{-s}, xi' = eta: xi(1) = 1 - e^{-1}
    const auto m = make_builtin(BuiltinHamiltonian::quadratic, 1, 1.0);
    const auto path = integrate_forward(m, Vec{0.0}, Vec{1.0}, 0.0, 1.0, 1000);
    EXPECT_NEAR(path.xi.back()[0], 1.0 - std::exp(-1.0), 1e-8);
    EXPECT_NEAR(path.eta.back()[0], std::exp(-1.0), 1e-10);
}

TEST(Convergence, FourthOrder) {
    // endpoint error vs the transport closed form scales like m^{-4}
    std::vector<double> errors;
    for (const int m : {50, 100, 200, 400}) {
        const auto path = integrate_backward(transport(), transport_terminal(), m);
        const double err = std::abs(path.eta.front()[0] - (-1.0)) +
                           std::abs(path.xi.front()[0] - 0.25) +
                           std::abs(path.u_xi.front() - 0.75);
        errors.push_back(err);
    }
    for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
        const double order = std::log2(errors[k] / errors[k + 1]);
        EXPECT_NEAR(order, 4.0, 1.0);
    }
}

TEST(HerglotzIdentity, DiscreteResidualSmall) {
    for (const auto& m :
         {transport(), make_builtin(BuiltinHamiltonian::transport_minus, 1),
          make_builtin(BuiltinHamiltonian::transport_neg_u, 1),
          make_builtin(BuiltinHamiltonian::quadratic, 1, 1.0)}) {
        TerminalCondition term{Vec{0.4}, 0.8, Vec{-0.6}, 0.25};
        const auto path = integrate_backward(m, term, 1000);
        EXPECT_LE(herglotz_identity_residual(path, m), 1e-6);
    }
    // eikonal is smooth along paths with eta bounded away from zero
    TerminalCondition term{Vec{0.25}, 0.25, Vec{-std::exp(-0.25)},
                           std::exp(-0.25) * 0.5};
    const auto path = integrate_backward(eikonal(), term, 1000);
    EXPECT_LE(herglotz_identity_residual(path, eikonal()), 1e-6);
}

// ---------------------------------------------------------------------------
// Propagation inequalities

TEST(Propagation, TransportTightLowerBound) {
    const auto path = integrate_backward(transport(), transport_terminal(), 1000);
    const auto rep = check_propagation(path, transport().constants);
    EXPECT_TRUE(rep.all_pass());
    // beta = 0 lower bound: |eta(0)| e^{-2t} = |eta(t)| exactly here
    for (const auto& row : rep.rows) {
        if (row.name == "costate_lower_beta0") {
            EXPECT_NEAR(row.lhs, row.rhs, 1e-9);
        }
    }
}

TEST(Propagation, ConstantHamiltonianKeepsEta) {
    HamiltonianModel constant;
    constant.dimension = 1;
    constant.eval = [](const Vec&, double, double, const Vec&) { return 0.7; };
    constant.grad_x = [](const Vec& x, double, double, const Vec&) {
        return Vec(x.size(), 0.0);
    };
    constant.grad_p = [](const Vec& x, double, double, const Vec&) {
        return Vec(x.size(), 0.0);
    };
    constant.grad_u = [](const Vec&, double, double, const Vec&) { return 0.0; };
    constant.constants = {0.0, 0.0, 0.0, 0.0, 0.0, std::nullopt};
    const auto path = integrate_forward(constant, Vec{0.1}, Vec{0.45}, 0.0, 1.0, 100);
    const auto rep = check_propagation(path, constant.constants);
    ASSERT_EQ(rep.rows.size(), 1u);
    EXPECT_EQ(rep.rows[0].name, "costate_constant");
    EXPECT_TRUE(rep.rows[0].pass);
    EXPECT_NEAR(path.eta.back()[0], 0.45, 1e-15);
}

TEST(Propagation, EikonalC1Zero) {
    TerminalCondition term{Vec{0.25}, 0.25, Vec{-std::exp(-0.25)},
                           std::exp(-0.25) * 0.5};
    const auto path = integrate_backward(eikonal(), term, 1000);
    const auto rep = check_propagation(path, eikonal().constants);
    EXPECT_TRUE(rep.all_pass());
    bool saw46 = false;
    for (const auto& row : rep.rows)
        if (row.name == "costate_lower_c1zero") {
            saw46 = true;
            EXPECT_NEAR(row.lhs, row.rhs, 1e-9);  // e^{-t} ratio attained
        }
    EXPECT_TRUE(saw46);
}

TEST(Spatial, TransportAndEikonal) {
    const auto pathT = integrate_backward(transport(), transport_terminal(), 1000);
    const auto repT = check_spatial(pathT, transport().constants);
    EXPECT_TRUE(repT.all_pass());
    EXPECT_NEAR(repT.rows[0].lhs, 0.25, 1e-9);  // |0.5 - 0.25|
    EXPECT_NEAR(repT.rows[0].rhs, 0.5, 1e-9);   // R(0.5, ln 2)

    TerminalCondition term{Vec{0.25}, 0.25, Vec{-std::exp(-0.25)},
                           std::exp(-0.25) * 0.5};
    const auto pathE = integrate_backward(eikonal(), term, 1000);
    const auto repE = check_spatial(pathE, eikonal().constants);
    EXPECT_TRUE(repE.all_pass());
    EXPECT_NEAR(repE.rows[0].lhs, repE.rows[0].rhs, 1e-9);  // B2 t attained
}

TEST(SpecialPropagation, TransportPlusLambdaEqualsC1) {
    const auto path = integrate_backward(transport(), transport_terminal(), 1000);
    const auto rep = check_special_propagation(path, 1.0, transport().constants);
    EXPECT_TRUE(rep.all_pass());
    for (const auto& row : rep.rows) {
        if (row.name == "special_drift_vs_initial_resonant") {
            EXPECT_NEAR(row.lhs, 0.25, 1e-9);
            EXPECT_NEAR(row.rhs, 0.5, 1e-9);
        }
    }
}

TEST(SpecialPropagation, TransportNegULambdaEqualsMinusC1) {
    const auto m = make_builtin(BuiltinHamiltonian::transport_neg_u, 1);
    TerminalCondition term{Vec{0.3}, 0.4, Vec{-1.0}, 0.2};
    const auto path = integrate_backward(m, term, 1000);
    const auto rep = check_special_propagation(path, -1.0, m.constants);
    EXPECT_TRUE(rep.all_pass());
    bool saw = false;
    for (const auto& row : rep.rows)
        if (row.name == "special_drift_vs_terminal_resonant") saw = true;
    EXPECT_TRUE(saw);
}

TEST(SpecialPropagation, LambdaZeroMatchesGeneralK3Zero) {
    // beta = 0, lambda = 0: the special case collapses onto the K3 = 0 general
    // bounds; both reports must agree on the shared inequality
    HamiltonianModel m = transport();
    m.constants.k3 = 0.0;
    m.constants.lambda = 0.0;
    // H = <x, p> (drop the u term)
    m.eval = [](const Vec& x, double, double, const Vec& p) { return dot(x, p); };
    m.grad_u = [](const Vec&, double, double, const Vec&) { return 0.0; };
    TerminalCondition term{Vec{0.5}, 0.5, Vec{-0.6}, 0.1};
    const auto path = integrate_backward(m, term, 1000);
    const auto special = check_special_propagation(path, 0.0, m.constants);
    const auto general = check_propagation(path, m.constants);
    EXPECT_TRUE(special.all_pass());
    EXPECT_TRUE(general.all_pass());
    // with lambda = 0 the special drift bound coincides with the general one
    double lhs64 = kInf, lhs42 = kInf, rhs64 = kInf, rhs42 = kInf;
    for (const auto& row : special.rows)
        if (row.name == "special_drift_vs_terminal") {
            lhs64 = row.lhs;
            rhs64 = row.rhs;
        }
    for (const auto& row : general.rows)
        if (row.name == "costate_drift_vs_terminal") {
            lhs42 = row.lhs;
            rhs42 = row.rhs;
        }
    EXPECT_NEAR(lhs64, lhs42, 1e-12);
    EXPECT_NEAR(rhs64, rhs42, 1e-12);
}

// ---------------------------------------------------------------------------
// Endpoint subgradient residual

TEST(EndpointResidual, OracleTerminalDataLandsInSubdifferential) {
    const auto cone = make_cone_datum(1);
    const auto pathT = integrate_backward(transport(), transport_terminal(), 1000);
    EXPECT_LE(endpoint_subgradient_residual(pathT, cone), 1e-9);

    TerminalCondition term{Vec{0.25}, 0.25, Vec{-std::exp(-0.25)},
                           std::exp(-0.25) * 0.5};
    const auto pathE = integrate_backward(eikonal(), term, 1000);
    EXPECT_LE(endpoint_subgradient_residual(pathE, cone), 1e-9);
}

TEST(EndpointResidual, PerturbedTerminalGradientDetected) {
    // integrating from p = -0.5 instead of -0.25 lands away from D^-u0
    TerminalCondition bad{Vec{0.5}, std::log(2.0), Vec{-0.5}, 0.375};
    const auto path = integrate_backward(transport(), bad, 1000);
    const auto cone = make_cone_datum(1);
    EXPECT_GT(endpoint_subgradient_residual(path, cone), 0.1);
}
