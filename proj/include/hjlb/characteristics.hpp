#pragma once

// Characteristic integration for u-dependent Hamiltonians: the coupled system
//
//   xi'(s)   =  D_p H(xi, s, u_xi, eta)
//   eta'(s)  = -D_x H(xi, s, u_xi, eta) - D_u H(xi, s, u_xi, eta) eta
//   u_xi'(s) = <eta, xi'> - H(xi, s, u_xi, eta)
//
// is integrated with fixed-step classic RK4, backward from terminal data or
// forward from initial data, plus the propagation/spatial inequality checks
// evaluated along computed paths.

#include <stdexcept>
#include <string>
#include <vector>

#include "hjlb/bounds.hpp"
#include "hjlb/hamiltonian.hpp"
#include "hjlb/initial_data.hpp"
#include "hjlb/numeric.hpp"

namespace hjlb {

struct TerminalCondition {
    Vec x;
    double t = 0.0;  // > 0
    Vec p;           // value of D_x u(x, t), or a reachable-gradient element
    double u = 0.0;  // u(x, t)
};

struct CharacteristicPath {
    std::vector<double> times;  // ascending, times.front() == 0
    std::vector<Vec> xi;
    std::vector<Vec> eta;
    std::vector<double> u_xi;
    int step_count = 0;

    double horizon() const { return times.back(); }
};

/// Thrown when a stage evaluation lands on the p-kink of a Hamiltonian whose
/// D_p H is a subdifferential selection there (eikonal at eta = 0).
struct SingularGradientError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

struct LieState {
    Vec xi;
    Vec eta;
    double u = 0.0;
};

struct LieDeriv {
    Vec dxi;
    Vec deta;
    double du = 0.0;
};

inline LieDeriv lie_rhs(const HamiltonianModel& m, double s, const LieState& y) {
    if (m.kink_at_p_zero && norm(y.eta) < 1e-12)
        throw SingularGradientError("characteristic hit the p-kink (|eta| < 1e-12)");
    LieDeriv d;
    d.dxi = m.grad_p(y.xi, s, y.u, y.eta);
    d.deta = m.grad_x(y.xi, s, y.u, y.eta);
    const double hu = m.grad_u(y.xi, s, y.u, y.eta);
    for (std::size_t i = 0; i < d.deta.size(); ++i)
        d.deta[i] = -d.deta[i] - hu * y.eta[i];
    d.du = dot(y.eta, d.dxi) - m.eval(y.xi, s, y.u, y.eta);
    return d;
}

inline LieState advance(const LieState& y, const LieDeriv& d, double h) {
    LieState r = y;
    axpy(h, d.dxi, r.xi);
    axpy(h, d.deta, r.eta);
    r.u += h * d.du;
    return r;
}

inline LieState rk4_step(const HamiltonianModel& m, double s, const LieState& y,
                         double h) {
    const LieDeriv k1 = lie_rhs(m, s, y);
    const LieDeriv k2 = lie_rhs(m, s + 0.5 * h, advance(y, k1, 0.5 * h));
    const LieDeriv k3 = lie_rhs(m, s + 0.5 * h, advance(y, k2, 0.5 * h));
    const LieDeriv k4 = lie_rhs(m, s + h, advance(y, k3, h));
    LieState r = y;
    const double w = h / 6.0;
    for (std::size_t i = 0; i < y.xi.size(); ++i) {
        r.xi[i] += w * (k1.dxi[i] + 2.0 * k2.dxi[i] + 2.0 * k3.dxi[i] + k4.dxi[i]);
        r.eta[i] += w * (k1.deta[i] + 2.0 * k2.deta[i] + 2.0 * k3.deta[i] + k4.deta[i]);
    }
    r.u += w * (k1.du + 2.0 * k2.du + 2.0 * k3.du + k4.du);
    return r;
}

}  // namespace detail

inline CharacteristicPath integrate_backward(const HamiltonianModel& model,
                                             const TerminalCondition& terminal,
                                             int steps) {
    if (steps < 1) throw std::invalid_argument("integrate_backward needs steps >= 1");
    if (!(terminal.t > 0.0))
        throw std::invalid_argument("terminal time must be positive");
    const double h = terminal.t / steps;
    if (h <= 0.0) throw std::underflow_error("characteristic step underflow");
    CharacteristicPath path;
    path.step_count = steps;
    path.times.resize(steps + 1);
    path.xi.resize(steps + 1);
    path.eta.resize(steps + 1);
    path.u_xi.resize(steps + 1);
    for (int j = 0; j <= steps; ++j) path.times[j] = j * h;
    path.times[steps] = terminal.t;
    detail::LieState y{terminal.x, terminal.p, terminal.u};
    path.xi[steps] = y.xi;
    path.eta[steps] = y.eta;
    path.u_xi[steps] = y.u;
    for (int j = steps - 1; j >= 0; --j) {
        y = detail::rk4_step(model, path.times[j + 1], y, -h);
        path.xi[j] = y.xi;
        path.eta[j] = y.eta;
        path.u_xi[j] = y.u;
    }
    return path;
}

inline CharacteristicPath integrate_forward(const HamiltonianModel& model,
                                            const Vec& xi0, const Vec& eta0,
                                            double u0, double t, int steps) {
    if (steps < 1) throw std::invalid_argument("integrate_forward needs steps >= 1");
    if (!(t > 0.0)) throw std::invalid_argument("horizon must be positive");
    const double h = t / steps;
    if (h <= 0.0) throw std::underflow_error("characteristic step underflow");
    CharacteristicPath path;
    path.step_count = steps;
    path.times.resize(steps + 1);
    path.xi.resize(steps + 1);
    path.eta.resize(steps + 1);
    path.u_xi.resize(steps + 1);
    detail::LieState y{xi0, eta0, u0};
    path.times[0] = 0.0;
    path.xi[0] = y.xi;
    path.eta[0] = y.eta;
    path.u_xi[0] = y.u;
    for (int j = 1; j <= steps; ++j) {
        y = detail::rk4_step(model, (j - 1) * h, y, h);
        path.times[j] = (j == steps) ? t : j * h;
        path.xi[j] = y.xi;
        path.eta[j] = y.eta;
        path.u_xi[j] = y.u;
    }
    return path;
}

// ---------------------------------------------------------------------------
// Inequality checks along a computed path. Every row passes iff
// lhs <= rhs + 1e-9.

struct CheckRow {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

struct CheckReport {
    std::vector<CheckRow> rows;
    bool all_pass() const {
        for (const auto& r : rows)
            if (!r.pass) return false;
        return true;
    }
};

namespace detail {

inline void push_check(CheckReport& rep, std::string name, double lhs, double rhs,
                       double tol = 1e-9) {
    rep.rows.push_back({std::move(name), lhs, rhs, lhs <= rhs + tol});
}

}  // namespace detail

/// Costate propagation inequalities with eta(t), eta(0) taken from the path.
inline CheckReport check_propagation(const CharacteristicPath& path,
                                     const StructuralConstants& c) {
    CheckReport rep;
    const double t = path.horizon();
    const double nt = norm(path.eta.back());
    const double n0 = norm(path.eta.front());
    const double diff = dist(path.eta.back(), path.eta.front());
    const double a = c.c1 + c.k3;
    if (a > 0.0) {
        const double grow = std::expm1(a * t);
        const double k = c.c1 * c.beta / a;
        detail::push_check(rep, "costate_drift_vs_terminal", diff, (k + nt) * grow);
        detail::push_check(rep, "costate_drift_vs_initial", diff, (k + n0) * grow);
        const double em = std::exp(-a * t);
        detail::push_check(rep, "costate_lower", n0 * em - k * (1.0 - em), nt);
        detail::push_check(rep, "costate_upper", nt, n0 * (grow + 1.0) + k * grow);
    }
    if (c.k3 == 0.0 && c.c1 > 0.0) {
        const double em = std::exp(-c.c1 * t);
        const double ep = std::exp(c.c1 * t);
        detail::push_check(rep, "costate_lower_k3zero", n0 * em - c.beta * (1.0 - em), nt);
        detail::push_check(rep, "costate_upper_k3zero", nt, n0 * ep + c.beta * (ep - 1.0));
    }
    if (c.beta == 0.0 && a > 0.0) {
        detail::push_check(rep, "costate_lower_beta0", n0 * std::exp(-a * t), nt);
        detail::push_check(rep, "costate_upper_beta0", nt, n0 * std::exp(a * t));
    }
    if (c.c1 == 0.0 && c.k3 > 0.0) {
        detail::push_check(rep, "costate_lower_c1zero", n0 * std::exp(-c.k3 * t), nt);
        detail::push_check(rep, "costate_upper_c1zero", nt, n0 * std::exp(c.k3 * t));
    }
    if (a == 0.0) detail::push_check(rep, "costate_constant", diff, 0.0);
    return rep;
}

/// |xi(t) - xi(0)| <= R(xi(t), t).
inline CheckReport check_spatial(const CharacteristicPath& path,
                                 const StructuralConstants& c) {
    CheckReport rep;
    const double t = path.horizon();
    detail::push_check(rep, "spatial_reach", dist(path.xi.back(), path.xi.front()),
                       radius_R(c, path.xi.back(), t));
    return rep;
}

/// Special-case propagation for H = lambda u + H0.
inline CheckReport check_special_propagation(const CharacteristicPath& path,
                                             double lambda,
                                             const StructuralConstants& c) {
    CheckReport rep;
    const double t = path.horizon();
    const Vec& et = path.eta.back();
    const Vec& e0 = path.eta.front();
    const double nt = norm(et);
    const double n0 = norm(e0);
    const double c1 = c.c1;
    const double cb = c.c1 * c.beta;
    if (lambda != -c1) {
        const double lhs = dist(et, scaled(e0, std::exp(-lambda * t)));
        const double rhs = cb / (c1 + lambda) *
                               (std::exp(c1 * t) - std::exp(-lambda * t)) +
                           nt * std::expm1(c1 * t);
        detail::push_check(rep, "special_drift_vs_terminal", lhs, rhs);
    } else {
        const double lhs = dist(et, scaled(e0, std::exp(c1 * t)));
        const double rhs = cb * t * std::exp(c1 * t) + nt * std::expm1(c1 * t);
        detail::push_check(rep, "special_drift_vs_terminal_resonant", lhs, rhs);
    }
    if (lambda != c1) {
        const double lhs = dist(et, scaled(e0, std::exp(-lambda * t)));
        const double rhs =
            cb / (c1 - lambda) * std::expm1((c1 - lambda) * t) +
            n0 * (std::exp((c1 - lambda) * t) - std::exp(-lambda * t));
        detail::push_check(rep, "special_drift_vs_initial", lhs, rhs);
    } else {
        const double lhs = dist(et, scaled(e0, std::exp(-c1 * t)));
        const double rhs = cb * t + n0 * (1.0 - std::exp(-c1 * t));
        detail::push_check(rep, "special_drift_vs_initial_resonant", lhs, rhs);
    }
    return rep;
}

/// Distance from eta(0) to the subdifferential of the datum at xi(0);
/// +infinity when that set is empty.
inline double endpoint_subgradient_residual(const CharacteristicPath& path,
                                            const InitialDatum& datum) {
    return datum.subgradient(path.xi.front()).distance(path.eta.front());
}

/// Max discrete residual of the value equation u' = <eta, xi'> - H at interior
/// nodes (central differences in s); O(ds^2) for smooth models.
inline double herglotz_identity_residual(const CharacteristicPath& path,
                                         const HamiltonianModel& model) {
    double worst = 0.0;
    for (std::size_t j = 1; j + 1 < path.times.size(); ++j) {
        const double ds = path.times[j + 1] - path.times[j - 1];
        const double du = (path.u_xi[j + 1] - path.u_xi[j - 1]) / ds;
        const Vec v = model.grad_p(path.xi[j], path.times[j], path.u_xi[j], path.eta[j]);
        const double rhs = dot(path.eta[j], v) -
                           model.eval(path.xi[j], path.times[j], path.u_xi[j],
                                      path.eta[j]);
        worst = std::max(worst, std::abs(du - rhs));
    }
    return worst;
}

}  // namespace hjlb
