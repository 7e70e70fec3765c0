#pragma once

// Herglotz variational principle at desk scale: the value along a curve is
// defined implicitly by the Caratheodory equation
//
//   u_xi'(s) = L(xi(s), s, u_xi(s), xi'(s)),   u_xi(0) = u0(xi(0)),
//
// the action is J(xi) = u0(xi(0)) + int_0^t L ds, and the solution candidate
// is the infimum of J over curves ending at x. Curves are piecewise linear;
// the minimization is multi-start coordinate descent with golden-section line
// searches, projected onto the feasible velocity set for constrained
// Lagrangians.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hjlb/hamiltonian.hpp"
#include "hjlb/initial_data.hpp"
#include "hjlb/numeric.hpp"

namespace hjlb {

struct Curve {
    std::vector<double> times;  // strictly increasing, usually uniform on [0, t]
    std::vector<Vec> nodes;     // piecewise-linear in s

    int segments() const { return static_cast<int>(times.size()) - 1; }
};

inline Curve make_uniform_curve(std::vector<Vec> nodes, double t) {
    Curve c;
    const int m = static_cast<int>(nodes.size()) - 1;
    if (m < 1) throw std::invalid_argument("curve needs >= 2 nodes");
    c.times.resize(m + 1);
    for (int j = 0; j <= m; ++j) c.times[j] = t * j / m;
    c.nodes = std::move(nodes);
    return c;
}

struct ActionResult {
    double action = kInf;  // J; +infinity marker when the curve is infeasible
    std::vector<double> u_trajectory;  // u_xi at curve.times
    bool feasible = false;
    double u_terminal = 0.0;  // ODE route: u_xi(t); equals J when
                              // u_xi(0) = u0(xi(0)), up to quadrature error
};

struct InfeasibleCurveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline double lagrangian(const HamiltonianModel& m, const Vec& x, double s, double u,
                         const Vec& q) {
    return legendre_transform(m, x, s, u, q).value;
}

struct ActionAccumulator {
    std::vector<double> u_nodes;
    double integral = 0.0;
    double u_final = 0.0;
};

/// RK4 march of the Caratheodory equation along the curve, with trapezoidal
/// accumulation of int L ds on the same substep lattice. Throws
/// InfeasibleCurveError when L is +infinity anywhere along the curve.
inline ActionAccumulator integrate_caratheodory(const HamiltonianModel& model,
                                                const Curve& curve, double u_start,
                                                int substeps) {
    if (curve.segments() < 1) throw std::invalid_argument("degenerate curve");
    ActionAccumulator acc;
    acc.u_nodes.reserve(curve.times.size());
    acc.u_nodes.push_back(u_start);
    double u = u_start;
    for (int seg = 0; seg < curve.segments(); ++seg) {
        const double s0 = curve.times[seg];
        const double s1 = curve.times[seg + 1];
        const double ds = s1 - s0;
        if (!(ds > 0.0)) throw std::invalid_argument("curve times must increase");
        const Vec v = scaled(sub(curve.nodes[seg + 1], curve.nodes[seg]), 1.0 / ds);
        auto pos = [&](double s) {
            Vec p = curve.nodes[seg];
            axpy(s - s0, v, p);
            return p;
        };
        auto f = [&](double s, double uu) {
            const double L = lagrangian(model, pos(s), s, uu, v);
            if (L == kInf)
                throw InfeasibleCurveError("segment velocity outside dom L");
            return L;
        };
        const double h = ds / substeps;
        double Lprev = f(s0, u);
        for (int j = 0; j < substeps; ++j) {
            const double s = s0 + j * h;
            const double k1 = f(s, u);
            const double k2 = f(s + 0.5 * h, u + 0.5 * h * k1);
            const double k3 = f(s + 0.5 * h, u + 0.5 * h * k2);
            const double k4 = f(s + h, u + h * k3);
            u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            const double Lnext = f(s + h, u);
            acc.integral += 0.5 * h * (Lprev + Lnext);
            Lprev = Lnext;
        }
        acc.u_nodes.push_back(u);
    }
    acc.u_final = u;
    return acc;
}

}  // namespace detail

/// Value trajectory of the Caratheodory equation along a feasible curve.
inline std::vector<double> caratheodory_solve(const HamiltonianModel& model,
                                              const Curve& curve, double u_start,
                                              int substeps = 64) {
    return detail::integrate_caratheodory(model, curve, u_start, substeps).u_nodes;
}

/// Action J of a curve; infeasible curves yield the +infinity marker instead
/// of an error.
inline ActionResult action(const HamiltonianModel& model, const InitialDatum& datum,
                           const Curve& curve, int substeps = 64) {
    ActionResult r;
    const double u0 = datum.eval(curve.nodes.front());
    try {
        const auto acc = detail::integrate_caratheodory(model, curve, u0, substeps);
        r.u_trajectory = acc.u_nodes;
        r.u_terminal = acc.u_final;
        r.action = u0 + acc.integral;
        r.feasible = true;
    } catch (const InfeasibleCurveError&) {
        r.action = kInf;
        r.feasible = false;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Value function minimization.

struct ValueFunctionResult {
    double value = kInf;
    Curve minimizer;
};

namespace detail {

inline std::optional<double> velocity_cap(const HamiltonianModel& m) {
    if (m.builtin && *m.builtin == BuiltinHamiltonian::eikonal) return m.param;
    return std::nullopt;
}

/// Feasible interval for one coordinate of one node under per-segment speed
/// caps; the current position is assumed feasible.
inline std::pair<double, double> coordinate_interval(const Curve& c, int node,
                                                     int comp, double cap,
                                                     double ds) {
    double lo = -kInf, hi = kInf;
    auto restrict = [&](const Vec& anchor) {
        double off2 = 0.0;
        for (std::size_t k = 0; k < anchor.size(); ++k) {
            if (static_cast<int>(k) == comp) continue;
            const double d = c.nodes[node][k] - anchor[k];
            off2 += d * d;
        }
        const double w2 = cap * cap * ds * ds - off2;
        const double w = w2 > 0.0 ? std::sqrt(w2) : 0.0;
        lo = std::max(lo, anchor[comp] - w);
        hi = std::min(hi, anchor[comp] + w);
    };
    if (node > 0) restrict(c.nodes[node - 1]);
    restrict(c.nodes[node + 1]);
    return {lo, hi};
}

inline bool lex_less(const Curve& a, const Curve& b) {
    for (std::size_t j = 0; j < a.nodes.size() && j < b.nodes.size(); ++j)
        for (std::size_t k = 0; k < a.nodes[j].size(); ++k) {
            if (a.nodes[j][k] < b.nodes[j][k]) return true;
            if (a.nodes[j][k] > b.nodes[j][k]) return false;
        }
    return false;
}

}  // namespace detail

/// Minimize the action over piecewise-linear curves with `nodes` free interior
/// nodes and a free left endpoint, ending at x. Multi-start coordinate descent
/// (golden-section per coordinate); restarts use the fixed seed so results are
/// reproducible and schedule-independent.
inline ValueFunctionResult value_function(const HamiltonianModel& model,
                                          const InitialDatum& datum, const Vec& x,
                                          double t, int nodes = 7, int restarts = 4,
                                          int substeps = 32) {
    if (!(t > 0.0)) throw std::invalid_argument("value_function needs t > 0");
    if (!model.convex_in_p)
        throw std::invalid_argument("value_function needs convexity in p");
    const int n = model.dimension;
    const int m = nodes + 1;  // segments
    const double ds = t / m;
    const auto cap = detail::velocity_cap(model);
    const double reach = cap ? *cap * t : std::max(1.0, 2.0 * norm(x)) + t;

    auto objective = [&](const Curve& c) {
        return action(model, datum, c, substeps).action;
    };

    std::vector<Curve> seeds;
    {  // constant curve at x
        seeds.push_back(make_uniform_curve(std::vector<Vec>(m + 1, x), t));
    }
    {  // straight run from the best reachable point of the datum
        Vec dir(n, 0.0);
        if (norm(x) > 1e-12)
            dir = scaled(x, 1.0 / norm(x));
        else
            dir[0] = 1.0;
        double best = kInf;
        Vec ystar = x;
        const int scan = 512;
        for (int i = 0; i <= scan; ++i) {
            const double s = -reach + 2.0 * reach * i / scan;
            Vec y = x;
            axpy(s, dir, y);
            const double v = datum.eval(y);
            if (v < best) {
                best = v;
                ystar = y;
            }
        }
        Vec adj = x;  // pull the endpoint a hair inside the reachable set
        axpy(1.0 - 1e-9, sub(ystar, x), adj);
        std::vector<Vec> pts(m + 1);
        for (int j = 0; j <= m; ++j) {
            const double w = static_cast<double>(j) / m;
            pts[j] = add(scaled(adj, 1.0 - w), scaled(x, w));
        }
        seeds.push_back(make_uniform_curve(std::move(pts), t));
    }
    Rng rng(0x48454A);  // fixed multistart seed
    for (int r = 2; r < restarts; ++r) {
        // random walk backward from x with feasible per-segment steps
        std::vector<Vec> pts(m + 1);
        pts[m] = x;
        const double step = cap ? *cap * ds : reach / m;
        for (int j = m - 1; j >= 0; --j) {
            pts[j] = pts[j + 1];
            Vec d(n);
            for (int k = 0; k < n; ++k) d[k] = uniform(rng, -1.0, 1.0);
            const double dn = norm(d);
            if (dn > 1e-12) axpy(uniform(rng, 0.0, step) / dn, d, pts[j]);
        }
        seeds.push_back(make_uniform_curve(std::move(pts), t));
    }

    ValueFunctionResult best;
    bool any_feasible = false;
    for (auto& curve : seeds) {
        double val = objective(curve);
        if (val == kInf) continue;
        any_feasible = true;
        for (int sweep = 0; sweep < 100; ++sweep) {
            const double before = val;
            for (int j = 0; j < m; ++j) {  // free nodes: 0 .. m-1
                for (int k = 0; k < n; ++k) {
                    double lo, hi;
                    if (cap) {
                        auto iv = detail::coordinate_interval(curve, j, k, *cap, ds);
                        lo = iv.first;
                        hi = iv.second;
                    } else {
                        lo = curve.nodes[j][k] - reach;
                        hi = curve.nodes[j][k] + reach;
                    }
                    if (!(hi > lo)) continue;
                    auto line = [&](double y) {
                        Curve probe = curve;
                        probe.nodes[j][k] = y;
                        return objective(probe);
                    };
                    const double y = golden_section_min(line, lo, hi, 1e-11);
                    const double fy = line(y);
                    if (fy < val) {
                        curve.nodes[j][k] = y;
                        val = fy;
                    }
                }
            }
            if (before - val < 1e-10) break;
        }
        if (val < best.value ||
            (val == best.value && detail::lex_less(curve, best.minimizer))) {
            best.value = val;
            best.minimizer = curve;
        }
    }
    if (!any_feasible)
        throw InfeasibleCurveError("value_function: all starts infeasible");
    return best;
}

// ---------------------------------------------------------------------------
// Dynamic programming principle along a given curve ending at x:
//   u(x, t) <= int_tau^t L ds + u(xi(tau), tau),
// with equality exactly on minimizers.

struct DppReport {
    double lhs = 0.0;      // u(x, t)
    double rhs = 0.0;      // integral + u(xi(tau), tau)
    double slack = 0.0;    // rhs - lhs
    bool pass = false;     // inequality within 1e-6
    bool equality = false; // |slack| within 1e-4
};

inline DppReport dpp_check(const HamiltonianModel& model, const InitialDatum& datum,
                           const Vec& x, double t, const Curve& curve, double tau,
                           int nodes = 7, int restarts = 4, int substeps = 32,
                           std::optional<double> u_xt_hint = std::nullopt) {
    if (tau < 0.0 || tau > t + 1e-15)
        throw std::invalid_argument("dpp_check needs 0 <= tau <= t");
    if (dist(curve.nodes.back(), x) > 1e-12)
        throw std::invalid_argument("dpp_check curve must end at x");
    DppReport rep;
    rep.lhs = u_xt_hint
                  ? *u_xt_hint
                  : value_function(model, datum, x, t, nodes, restarts, substeps)
                        .value;
    if (tau >= t - 1e-15) {  // trivial tail
        rep.rhs = rep.lhs;
        rep.slack = 0.0;
        rep.pass = true;
        rep.equality = true;
        return rep;
    }

    // cut the curve at tau (interpolating a node when tau is interior)
    Curve tail;
    std::size_t j = 0;
    while (j + 1 < curve.times.size() && curve.times[j + 1] <= tau + 1e-15) ++j;
    Vec start = curve.nodes[j];
    if (tau > curve.times[j] + 1e-15) {
        const double w =
            (tau - curve.times[j]) / (curve.times[j + 1] - curve.times[j]);
        start = add(scaled(curve.nodes[j], 1.0 - w), scaled(curve.nodes[j + 1], w));
        tail.times.push_back(tau);
        tail.nodes.push_back(start);
        ++j;
    }
    for (; j < curve.times.size(); ++j) {
        tail.times.push_back(std::max(curve.times[j], tau));
        tail.nodes.push_back(curve.nodes[j]);
    }

    const double u_tau =
        (tau <= 1e-15)
            ? datum.eval(start)
            : value_function(model, datum, start, tau, nodes, restarts, substeps)
                  .value;
    const auto acc = detail::integrate_caratheodory(model, tail, u_tau, substeps);
    rep.rhs = acc.integral + u_tau;
    rep.slack = rep.rhs - rep.lhs;
    rep.pass = rep.lhs <= rep.rhs + 1e-6;
    rep.equality = std::abs(rep.slack) <= 1e-4;
    return rep;
}

}  // namespace hjlb
