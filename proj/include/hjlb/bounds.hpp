#pragma once

// Closed-form lower gradient bounds, dependence domains, vanish times, and
// the bound comparison F. Everything here is pure arithmetic on the
// structural constants; negative bound values are returned as-is and callers
// clamp for display.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

#include "hjlb/hamiltonian.hpp"
#include "hjlb/initial_data.hpp"
#include "hjlb/numeric.hpp"

namespace hjlb {

struct BoundInputs {
    StructuralConstants constants;
    double theta = 0.0;  // uniform lower bound on initial subgradient norms, > 0
    double horizon_T = 1.0;
    std::optional<double> t0;  // cutoff used by the approximation-method bounds
};

struct DependenceDomain {
    Vec x0;
    double r = 0.0;
    StructuralConstants constants;
};

/// Spatial reach of the dependence cone after time t:
///   (B2/A2 + |x|)(e^{A2 t} - 1)  when A2 > 0,  else  B2 t.
inline double radius_R(const StructuralConstants& c, const Vec& x, double t) {
    if (t < 0.0) throw std::invalid_argument("radius_R needs t >= 0");
    if (c.a2 > 0.0) return (c.b2 / c.a2 + norm(x)) * std::expm1(c.a2 * t);
    return c.b2 * t;
}

/// Same reach for the mollified Hamiltonian: B2 -> B2 + eps.
inline double radius_R_eps(const StructuralConstants& c, double epsilon, const Vec& x,
                           double t) {
    StructuralConstants ce = c;
    ce.b2 += epsilon;
    return radius_R(ce, x, t);
}

/// (x, t) lies in E(x0, r):  R(x, t) + |x - x0| < r.
inline bool in_domain_E(const DependenceDomain& d, const Vec& x, double t) {
    return radius_R(d.constants, x, t) + dist(x, d.x0) < d.r;
}

/// (x, t) lies in D(x0, r):  e^{(A2+B2+A2|x0|) t} (1 + |x - x0|) < r + 1.
inline bool in_domain_D(const DependenceDomain& d, const Vec& x, double t) {
    const double rate = d.constants.a2 + d.constants.b2 + d.constants.a2 * norm(d.x0);
    return std::exp(rate * t) * (1.0 + dist(x, d.x0)) < d.r + 1.0;
}

namespace detail {

inline double gamma_tilde(const StructuralConstants& c) {
    return (c.beta / 2.0 + 2.0) * c.c1 + 2.0 * c.k3;
}

inline double radicand_l(const BoundInputs& in, double t) {
    const auto& c = in.constants;
    return in.theta * in.theta * std::exp(-gamma_tilde(c) * t) -
           2.0 * c.c1 * c.beta * t;
}

}  // namespace detail

/// Approximation-method bound l(t); nullopt once the radicand turns negative.
inline std::optional<double> lower_l(const BoundInputs& in, double t) {
    if (t < 0.0) throw std::invalid_argument("lower_l needs t >= 0");
    const double rad = detail::radicand_l(in, t);
    if (rad < 0.0) return std::nullopt;
    return std::sqrt(rad);
}

/// Dynamical-method bound L(t); may go negative, callers clamp for display.
/// For (C1, K3) = (0, 0) the bound is theta for all t.
inline double lower_L(const BoundInputs& in, double t) {
    if (t < 0.0) throw std::invalid_argument("lower_L needs t >= 0");
    const auto& c = in.constants;
    const double a = c.c1 + c.k3;
    if (a == 0.0) return in.theta;
    const double e = std::exp(-a * t);
    return in.theta * e - (c.c1 * c.beta / a) * (1.0 - e);
}

/// The u-independent variant of the approximation bound with an explicit
/// cutoff t0: e^{-(5/4) C1 t} sqrt(theta^2 - 2 beta C1 e^{(5/2) C1 T} t0).
inline std::optional<double> lower_ley(const BoundInputs& in, double t, double t0) {
    const auto& c = in.constants;
    const double rad = in.theta * in.theta -
                       2.0 * c.beta * c.c1 * std::exp(2.5 * c.c1 * in.horizon_T) * t0;
    if (rad <= 0.0) return std::nullopt;
    return std::exp(-1.25 * c.c1 * t) * std::sqrt(rad);
}

/// Sharpened approximation-method bound: the comparison integral evaluated
/// exactly instead of over-estimated.
inline std::optional<double> lower_sharpened(const BoundInputs& in, double t) {
    if (t < 0.0) throw std::invalid_argument("lower_sharpened needs t >= 0");
    const auto& c = in.constants;
    if (c.c1 == 0.0 && c.k3 == 0.0) return in.theta;
    const double g = detail::gamma_tilde(c);  // = (beta/2+2)C1 + 2K3
    const double e = std::exp(-g * t);
    const double coeff = 4.0 * c.beta * c.c1 / ((c.beta + 4.0) * c.c1 + 4.0 * c.k3);
    const double rad = in.theta * in.theta * e - coeff * (1.0 - e);
    if (rad < 0.0) return std::nullopt;
    return std::sqrt(rad);
}

/// Two-sided estimate driven by the gradient statistics of the initial datum.
inline std::pair<double, double> two_sided_bounds(const GradientStats& stats,
                                                 const StructuralConstants& c,
                                                 double t) {
    const double a = c.c1 + c.k3;
    if (a == 0.0) return {stats.inf_norm, stats.sup_norm};
    const double em = std::exp(-a * t);
    const double ep = std::exp(a * t);
    const double k = c.c1 * c.beta / a;
    return {stats.inf_norm * em - k * (1.0 - em), stats.sup_norm * ep + k * (ep - 1.0)};
}

/// Lower bound for H = lambda u + H0 from the given inf statistic:
///   I e^{-(C1+lambda)t} - C1 beta/(C1+lambda) (1 - e^{-(C1+lambda)t}),
/// or I - C1 beta t when lambda = -C1.
inline double special_lower(double inf_norm, const StructuralConstants& c, double t) {
    if (!c.lambda) throw std::invalid_argument("special_lower needs lambda");
    const double lam = *c.lambda;
    if (lam == -c.c1) return inf_norm - c.c1 * c.beta * t;
    const double a = c.c1 + lam;
    const double e = std::exp(-a * t);
    return inf_norm * e - (c.c1 * c.beta / a) * (1.0 - e);
}

/// M(t): the dynamical special-case bound seeded with theta.
inline double special_M(const BoundInputs& in, double t) {
    return special_lower(in.theta, in.constants, t);
}

/// m(t): the homogeneity-reduction bound, theta e^{-(C1+lambda)t} -
/// beta (e^{-lambda t} - e^{-(C1+lambda)t}).
inline double special_m(const BoundInputs& in, double t) {
    const auto& c = in.constants;
    if (!c.lambda) throw std::invalid_argument("special_m needs lambda");
    const double lam = *c.lambda;
    return in.theta * std::exp(-(c.c1 + lam) * t) -
           c.beta * (std::exp(-lam * t) - std::exp(-(c.c1 + lam) * t));
}

/// First zero of l; only beta = 1 with C1 > 0 admits one.
/// Bisection on the (strictly decreasing) radicand; the returned abscissa is
/// the left endpoint of the final bracket so that l is still defined there.
inline std::optional<double> vanish_time_l(const BoundInputs& in) {
    const auto& c = in.constants;
    if (c.beta != 1.0 || c.c1 == 0.0) return std::nullopt;
    double lo = 0.0;
    double hi = std::min(10.0 / (c.c1 + c.k3 + 1.0), 1e3);
    if (detail::radicand_l(in, hi) > 0.0) {
        // widen until a sign change appears; the radicand eventually goes
        // negative since the linear term dominates
        double probe = hi;
        for (int i = 0; i < 60 && detail::radicand_l(in, probe) > 0.0; ++i) probe *= 2.0;
        if (detail::radicand_l(in, probe) > 0.0)
            throw std::runtime_error("vanish_time_l: no sign change found");
        hi = probe;
    }
    while (hi - lo > 1e-14) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (detail::radicand_l(in, mid) >= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

/// First zero of L, in closed form.
inline std::optional<double> vanish_time_L(const BoundInputs& in) {
    const auto& c = in.constants;
    if (c.beta != 1.0 || c.c1 == 0.0) return std::nullopt;
    const double a = c.c1 + c.k3;
    return std::log1p(in.theta * a / (c.c1 * c.beta)) / a;
}

/// F(t) = L(t)^2 - l(t)^2, the comparison functional; positive exactly when
/// the dynamical bound beats the approximation bound. Uses the signed
/// radicand of l so the expression extends continuously past t_l.
inline double compare_F(const BoundInputs& in, double t) {
    const double L = lower_L(in, t);
    return L * L - detail::radicand_l(in, t);
}

}  // namespace hjlb
