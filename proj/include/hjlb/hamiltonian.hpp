#pragma once

// Hamiltonian models H(x, t, u, p): evaluation, partial derivatives,
// structural constants, Legendre transform, Friedrichs mollification,
// and the built-in example Hamiltonians.
//
// Structural constants encode the Lipschitz structure of H:
//   |H(x,..) - H(y,..)| <= C1 (beta + |p|) |x - y|        (in x)
//   |H(..,p) - H(..,q)| <= (A2 |x| + B2) |p - q|          (in p)
//   |H(.,u,.) - H(.,v,.)| <= K3 |u - v|                   (in u)
// with beta in {0, 1}; lambda is set when H = lambda*u + H0(x, t, p).

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "hjlb/numeric.hpp"

namespace hjlb {

struct StructuralConstants {
    double c1 = 0.0;
    double beta = 0.0;  // 0 or 1
    double a2 = 0.0;
    double b2 = 0.0;
    double k3 = 0.0;
    std::optional<double> lambda;  // set when H = lambda*u + H0
};

enum class BuiltinHamiltonian {
    transport_plus,   // u + <x, p>
    transport_minus,  // u - <x, p>
    transport_neg_u,  // -u + <x, p>
    eikonal,          // u + c |p|, c > 0
    quadratic,        // lambda*u + |p|^2/2  (strictly convex test model; not
                      //  globally p-Lipschitz, so the reach-radius machinery
                      //  and the grid solver never see it)
};

struct HamiltonianModel {
    int dimension = 1;
    std::function<double(const Vec&, double, double, const Vec&)> eval;
    std::function<Vec(const Vec&, double, double, const Vec&)> grad_x;
    std::function<Vec(const Vec&, double, double, const Vec&)> grad_p;
    std::function<double(const Vec&, double, double, const Vec&)> grad_u;
    StructuralConstants constants;
    bool convex_in_p = true;
    bool positively_homogeneous = false;  // u-free part H0 is 1-homogeneous in p
    // grad_p at p = 0 is a subdifferential selection (zero covector returned);
    // characteristic integration refuses to pass through it.
    bool kink_at_p_zero = false;
    // false when no finite (A2, B2) bounds D_p H (quadratic growth in p);
    // the reach radius R and every check built on it are then meaningless
    bool p_lipschitz = true;
    std::optional<BuiltinHamiltonian> builtin;  // closed-form dispatch tag
    double param = 0.0;                         // c for eikonal, lambda for quadratic
};

struct LagrangianValue {
    double value = 0.0;  // +infinity when the supremum is unattained/unbounded
    std::optional<Vec> maximizer_p;
    bool approximate = false;  // true when obtained by numeric search
    bool finite() const { return value < kInf; }
};

// ---------------------------------------------------------------------------
// Built-ins

inline HamiltonianModel make_builtin(BuiltinHamiltonian kind, int dimension,
                                     double param = 0.0) {
    if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
    HamiltonianModel m;
    m.dimension = dimension;
    m.builtin = kind;
    switch (kind) {
        case BuiltinHamiltonian::transport_plus:
            m.eval = [](const Vec& x, double, double u, const Vec& p) {
                return u + dot(x, p);
            };
            m.grad_x = [](const Vec&, double, double, const Vec& p) { return p; };
            m.grad_p = [](const Vec& x, double, double, const Vec&) { return x; };
            m.grad_u = [](const Vec&, double, double, const Vec&) { return 1.0; };
            m.constants = {1.0, 0.0, 1.0, 0.0, 1.0, 1.0};
            m.positively_homogeneous = true;
            break;
        case BuiltinHamiltonian::transport_minus:
            m.eval = [](const Vec& x, double, double u, const Vec& p) {
                return u - dot(x, p);
            };
            m.grad_x = [](const Vec&, double, double, const Vec& p) {
                return scaled(p, -1.0);
            };
            m.grad_p = [](const Vec& x, double, double, const Vec&) {
                return scaled(x, -1.0);
            };
            m.grad_u = [](const Vec&, double, double, const Vec&) { return 1.0; };
            m.constants = {1.0, 0.0, 1.0, 0.0, 1.0, 1.0};
            m.positively_homogeneous = true;
            break;
        case BuiltinHamiltonian::transport_neg_u:
            m.eval = [](const Vec& x, double, double u, const Vec& p) {
                return -u + dot(x, p);
            };
            m.grad_x = [](const Vec&, double, double, const Vec& p) { return p; };
            m.grad_p = [](const Vec& x, double, double, const Vec&) { return x; };
            m.grad_u = [](const Vec&, double, double, const Vec&) { return -1.0; };
            m.constants = {1.0, 0.0, 1.0, 0.0, 1.0, -1.0};
            m.positively_homogeneous = true;
            break;
        case BuiltinHamiltonian::eikonal: {
            if (param <= 0.0) throw std::invalid_argument("eikonal needs c > 0");
            const double c = param;
            m.param = c;
            m.eval = [c](const Vec&, double, double u, const Vec& p) {
                return u + c * norm(p);
            };
            m.grad_x = [](const Vec& x, double, double, const Vec&) {
                return Vec(x.size(), 0.0);
            };
            m.grad_p = [c](const Vec&, double, double, const Vec& p) {
                const double n = norm(p);
                if (n < 1e-300) return Vec(p.size(), 0.0);  // subdifferential point
                return scaled(p, c / n);
            };
            m.grad_u = [](const Vec&, double, double, const Vec&) { return 1.0; };
            m.constants = {0.0, 0.0, 0.0, c, 1.0, 1.0};
            m.positively_homogeneous = true;
            m.kink_at_p_zero = true;
            break;
        }
        case BuiltinHamiltonian::quadratic: {
            const double lam = param;
            m.param = lam;
            m.eval = [lam](const Vec&, double, double u, const Vec& p) {
                return lam * u + 0.5 * dot(p, p);
            };
            m.grad_x = [](const Vec& x, double, double, const Vec&) {
                return Vec(x.size(), 0.0);
            };
            m.grad_p = [](const Vec&, double, double, const Vec& p) { return p; };
            m.grad_u = [lam](const Vec&, double, double, const Vec&) { return lam; };
            m.constants = {0.0, 0.0, 0.0, 0.0, std::abs(lam), lam};
            m.p_lipschitz = false;
            break;
        }
        default:
            throw std::invalid_argument("unknown Hamiltonian kind");
    }
    return m;
}

/// Built-in kinds addressable by string name in harness configs.
/// Accepts an optional parenthesized parameter, e.g. "eikonal(0.5)".
inline HamiltonianModel make_builtin_by_name(const std::string& name, int dimension) {
    std::string kind = name;
    double param = 0.0;
    bool has_param = false;
    const auto open = name.find('(');
    if (open != std::string::npos) {
        const auto close = name.find(')', open);
        if (close == std::string::npos)
            throw std::invalid_argument("malformed Hamiltonian name: " + name);
        kind = name.substr(0, open);
        param = std::strtod(name.substr(open + 1, close - open - 1).c_str(), nullptr);
        has_param = true;
    }
    if (kind == "transport+")
        return make_builtin(BuiltinHamiltonian::transport_plus, dimension);
    if (kind == "transport-")
        return make_builtin(BuiltinHamiltonian::transport_minus, dimension);
    if (kind == "transport-negu")
        return make_builtin(BuiltinHamiltonian::transport_neg_u, dimension);
    if (kind == "eikonal")
        return make_builtin(BuiltinHamiltonian::eikonal, dimension,
                            has_param ? param : 1.0);
    if (kind == "quadratic")
        return make_builtin(BuiltinHamiltonian::quadratic, dimension,
                            has_param ? param : 1.0);
    throw std::invalid_argument("unknown Hamiltonian kind: " + name);
}

// ---------------------------------------------------------------------------
// Legendre transform  L(x, t, u, q) = sup_p { <p, q> - H(x, t, u, p) }

struct SearchBox {
    Vec lo;
    Vec hi;
};

namespace detail {

/// Coordinate-ascent supremum over a box. Reports +infinity when the
/// maximizer sticks to the box boundary (the supremum is then presumed
/// unattained inside any finite box).
inline LagrangianValue legendre_numeric(const HamiltonianModel& m, const Vec& x,
                                        double t, double u, const Vec& q,
                                        const SearchBox& box) {
    const int n = m.dimension;
    Vec p(n, 0.0);
    for (int i = 0; i < n; ++i) p[i] = 0.5 * (box.lo[i] + box.hi[i]);
    auto objective = [&](const Vec& pp) { return dot(pp, q) - m.eval(x, t, u, pp); };
    double best = objective(p);
    for (int sweep = 0; sweep < 100; ++sweep) {
        const double before = best;
        for (int i = 0; i < n; ++i) {
            auto line = [&](double v) {
                Vec probe = p;
                probe[i] = v;
                return -objective(probe);
            };
            p[i] = golden_section_min(line, box.lo[i], box.hi[i], 1e-12);
        }
        best = objective(p);
        if (best - before < 1e-13) break;
    }
    for (int i = 0; i < n; ++i) {
        const double w = box.hi[i] - box.lo[i];
        if (p[i] - box.lo[i] < 1e-6 * w || box.hi[i] - p[i] < 1e-6 * w)
            return {kInf, std::nullopt, true};
    }
    return {best, p, true};
}

}  // namespace detail

inline LagrangianValue legendre_transform(
    const HamiltonianModel& m, const Vec& x, double t, double u, const Vec& q,
    const std::optional<SearchBox>& search_box = std::nullopt) {
    if (!m.convex_in_p)
        throw std::invalid_argument("Legendre transform requires convexity in p");
    if (m.builtin) {
        switch (*m.builtin) {
            case BuiltinHamiltonian::eikonal: {
                const double c = m.param;
                // relative slack: segment velocities of extremal curves sit a
                // few ulps past c after the node/time divisions
                if (norm(q) <= c * (1.0 + 1e-12) + 1e-15)
                    return {-u, Vec(q.size(), 0.0), false};
                return {kInf, std::nullopt, false};
            }
            case BuiltinHamiltonian::quadratic:
                return {0.5 * dot(q, q) - m.param * u, q, false};
            case BuiltinHamiltonian::transport_plus:
                if (dist(q, x) <= 1e-12) return {-u, Vec(q.size(), 0.0), false};
                return {kInf, std::nullopt, false};
            case BuiltinHamiltonian::transport_minus:
                if (norm(add(q, x)) <= 1e-12) return {-u, Vec(q.size(), 0.0), false};
                return {kInf, std::nullopt, false};
            case BuiltinHamiltonian::transport_neg_u:
                if (dist(q, x) <= 1e-12) return {u, Vec(q.size(), 0.0), false};
                return {kInf, std::nullopt, false};
        }
    }
    if (!search_box)
        throw std::invalid_argument(
            "generic Legendre transform needs an explicit search box");
    return detail::legendre_numeric(m, x, t, u, q, *search_box);
}

// ---------------------------------------------------------------------------
// Friedrichs mollification  H_eps = (H * rho_eps) + eps sqrt(|p|^2 + 1)
//
// The convolution runs over all 2n+2 arguments (x, t, u, p) with the standard
// compactly supported kernel, approximated by a midpoint tensor rule with
// `quadrature_points` nodes per axis, weights normalized to sum to one. The
// symmetric node set reproduces affine Hamiltonians exactly; the transport
// family is detected and short-circuited.

inline HamiltonianModel mollify(const HamiltonianModel& model, double epsilon,
                                int quadrature_points) {
    if (!(epsilon > 0.0) || epsilon > 1.0)
        throw std::invalid_argument("mollify requires 0 < epsilon <= 1");
    if (quadrature_points < 1)
        throw std::invalid_argument("quadrature_points must be positive");

    const int n = model.dimension;
    HamiltonianModel out;
    out.dimension = n;
    out.constants = model.constants;
    out.constants.b2 += epsilon;  // p-Lipschitz envelope grows by the eps term
    out.convex_in_p = model.convex_in_p;
    out.positively_homogeneous = false;
    out.kink_at_p_zero = false;

    const bool affine =
        model.builtin && (*model.builtin == BuiltinHamiltonian::transport_plus ||
                          *model.builtin == BuiltinHamiltonian::transport_minus ||
                          *model.builtin == BuiltinHamiltonian::transport_neg_u);

    std::function<double(const Vec&, double, double, const Vec&)> smooth_part;
    if (affine) {
        smooth_part = model.eval;  // symmetric kernel preserves affine maps
    } else {
        const int d = 2 * n + 2;  // displaced axes: x (n), t, u, p (n)
        const int q = quadrature_points;
        // midpoint nodes and kernel weights on the cube [-eps, eps]^d,
        // restricted to the unit-kernel support |w| < eps
        std::vector<double> nodes(q);
        for (int i = 0; i < q; ++i)
            nodes[i] = -epsilon + (2.0 * i + 1.0) * epsilon / q;
        struct QPoint {
            std::vector<double> w;
            double weight;
        };
        std::vector<QPoint> pts;
        std::vector<int> idx(d, 0);
        double wsum = 0.0;
        while (true) {
            std::vector<double> w(d);
            double r2 = 0.0;
            for (int k = 0; k < d; ++k) {
                w[k] = nodes[idx[k]];
                r2 += w[k] * w[k];
            }
            const double rho2 = r2 / (epsilon * epsilon);
            if (rho2 < 1.0) {
                const double weight = std::exp(1.0 / (rho2 - 1.0));
                pts.push_back({std::move(w), weight});
                wsum += weight;
            }
            int k = 0;
            while (k < d && ++idx[k] == q) idx[k++] = 0;
            if (k == d) break;
        }
        for (auto& pt : pts) pt.weight /= wsum;
        const auto base = model.eval;
        smooth_part = [base, pts, n](const Vec& x, double t, double u, const Vec& p) {
            double acc = 0.0;
            Vec xs(n), ps(n);
            for (const auto& pt : pts) {
                for (int i = 0; i < n; ++i) {
                    xs[i] = x[i] - pt.w[i];
                    ps[i] = p[i] - pt.w[n + 2 + i];
                }
                acc += pt.weight * base(xs, t - pt.w[n], u - pt.w[n + 1], ps);
            }
            return acc;
        };
    }

    const double eps = epsilon;
    out.eval = [smooth_part, eps](const Vec& x, double t, double u, const Vec& p) {
        return smooth_part(x, t, u, p) + eps * std::sqrt(dot(p, p) + 1.0);
    };
    // Mollified H is smooth; partials by central differences of the quadrature.
    const auto ev = out.eval;
    const double h = 1e-5;
    out.grad_x = [ev, h, n](const Vec& x, double t, double u, const Vec& p) {
        Vec g(n);
        for (int i = 0; i < n; ++i) {
            Vec xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            g[i] = (ev(xp, t, u, p) - ev(xm, t, u, p)) / (2.0 * h);
        }
        return g;
    };
    out.grad_p = [ev, h, n](const Vec& x, double t, double u, const Vec& p) {
        Vec g(n);
        for (int i = 0; i < n; ++i) {
            Vec pp = p, pm = p;
            pp[i] += h;
            pm[i] -= h;
            g[i] = (ev(x, t, u, pp) - ev(x, t, u, pm)) / (2.0 * h);
        }
        return g;
    };
    out.grad_u = [ev, h](const Vec& x, double t, double u, const Vec& p) {
        return (ev(x, t, u + h, p) - ev(x, t, u - h, p)) / (2.0 * h);
    };
    return out;
}

// ---------------------------------------------------------------------------
// Sampled falsification of the declared structural constants.

struct ConstantsBox {
    double x_radius = 2.0;
    double p_radius = 2.0;
    double u_radius = 1.0;
    double t_max = 1.0;
};

struct StructuralReport {
    double x_ratio = 0.0;  // compare against c1
    double p_ratio = 0.0;  // normalized: compare against 1
    double u_ratio = 0.0;  // compare against k3
    bool x_pass = true;
    bool p_pass = true;
    bool u_pass = true;
    bool pass() const { return x_pass && p_pass && u_pass; }
};

inline StructuralReport verify_structural_constants(const HamiltonianModel& m,
                                                    const ConstantsBox& box,
                                                    int samples,
                                                    std::uint64_t seed = 12345) {
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    const int n = m.dimension;
    Rng rng(seed);
    auto rand_vec = [&](double radius) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = uniform(rng, -radius, radius);
        return v;
    };
    StructuralReport rep;
    const double tiny = 1e-12;
    for (int s = 0; s < samples; ++s) {
        const Vec x = rand_vec(box.x_radius);
        const Vec y = rand_vec(box.x_radius);
        const Vec p = rand_vec(box.p_radius);
        const Vec q = rand_vec(box.p_radius);
        const double t = uniform(rng, 0.0, box.t_max);
        const double u = uniform(rng, -box.u_radius, box.u_radius);
        const double v = uniform(rng, -box.u_radius, box.u_radius);

        const double h1_den = (m.constants.beta + norm(p)) * dist(x, y);
        if (h1_den > tiny) {
            const double r =
                std::abs(m.eval(x, t, u, p) - m.eval(y, t, u, p)) / h1_den;
            if (r > rep.x_ratio) rep.x_ratio = r;
        }
        const double h2_den = (m.constants.a2 * norm(x) + m.constants.b2) * dist(p, q);
        const double h2_num = std::abs(m.eval(x, t, u, p) - m.eval(x, t, u, q));
        if (h2_den > tiny) {
            const double r = h2_num / h2_den;
            if (r > rep.p_ratio) rep.p_ratio = r;
        } else if (h2_num > 1e-9) {
            rep.p_ratio = kInf;
        }
        const double h3_den = std::abs(u - v);
        if (h3_den > tiny) {
            const double r =
                std::abs(m.eval(x, t, u, p) - m.eval(x, t, v, p)) / h3_den;
            if (r > rep.u_ratio) rep.u_ratio = r;
        }
    }
    constexpr double slack = 1.0 + 1e-9;
    rep.x_pass = rep.x_ratio <= m.constants.c1 * slack + 1e-15;
    rep.p_pass = rep.p_ratio <= slack;
    rep.u_pass = rep.u_ratio <= m.constants.k3 * slack + 1e-15;
    return rep;
}

}  // namespace hjlb
