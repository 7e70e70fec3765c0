#pragma once

// Lipschitz initial data with exact subdifferential sets, the lower
// gradient-norm constant theta on balls, and inf/sup gradient statistics.
//
// Subdifferential sets are stored as radial segments
//   { s * axis : s in [lo, hi] },  |axis| = 1,
// which covers every supported datum: singletons, the boundary cone of the
// tent, 1D one-sided-slope intervals, and {0}. The n-dimensional data are
// radial, so set norms depend on |x| only.

#include <algorithm>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hjlb/numeric.hpp"

namespace hjlb {

struct SubgradientSet {
    bool empty = true;
    Vec axis;         // unit direction (zero vector allowed when lo == hi == 0)
    double lo = 0.0;  // signed coordinates along axis, lo <= hi
    double hi = 0.0;

    static SubgradientSet empty_set(int dim) { return {true, Vec(dim, 0.0), 0, 0}; }
    static SubgradientSet singleton(const Vec& p) {
        const double n = norm(p);
        if (n == 0.0) return {false, Vec(p.size(), 0.0), 0.0, 0.0};
        return {false, scaled(p, 1.0 / n), n, n};
    }
    static SubgradientSet segment(const Vec& axis_dir, double lo_, double hi_) {
        return {false, axis_dir, lo_, hi_};
    }

    double min_norm() const {
        if (empty) return kInf;
        if (lo <= 0.0 && 0.0 <= hi) return 0.0;
        return std::min(std::abs(lo), std::abs(hi));
    }
    double max_norm() const {
        if (empty) return 0.0;
        return std::max(std::abs(lo), std::abs(hi));
    }
    /// Euclidean distance from p to the set (+infinity for the empty set).
    double distance(const Vec& p) const {
        if (empty) return kInf;
        const double s = dot(p, axis);
        const double sc = std::clamp(s, lo, hi);
        double perp2 = dot(p, p) - s * s;
        if (perp2 < 0.0) perp2 = 0.0;
        return std::sqrt(perp2 + (s - sc) * (s - sc));
    }
};

enum class DatumKind { cone, zero, constant, abs, samples };

struct GradientStats {
    double inf_norm = kInf;  // +infinity marker when no subgradient exists in the ball
    double sup_norm = 0.0;
    double radius_used = 0.0;
    double delta = 0.0;
    bool empty = false;  // no point of the ball carries a subgradient
};

struct InitialDatum {
    int dimension = 1;
    DatumKind kind = DatumKind::zero;
    double constant_value = 0.0;
    double lipschitz = 0.0;
    // payload for kind == samples (1D uniform grid)
    std::vector<double> sample_x;
    std::vector<double> sample_u;

    double eval(const Vec& x) const {
        switch (kind) {
            case DatumKind::cone:
                return std::max(1.0 - norm(x), 0.0);
            case DatumKind::zero:
                return 0.0;
            case DatumKind::constant:
                return constant_value;
            case DatumKind::abs:
                return norm(x);
            case DatumKind::samples:
                return interp(x[0]);
        }
        return 0.0;
    }

    SubgradientSet subgradient(const Vec& x) const {
        const int n = dimension;
        const double r = norm(x);
        switch (kind) {
            case DatumKind::cone: {
                if (r > 1.0) return SubgradientSet::singleton(Vec(n, 0.0));
                if (r == 1.0)
                    return SubgradientSet::segment(scaled(x, 1.0 / r), -1.0, 0.0);
                if (r > 0.0)
                    return SubgradientSet::singleton(scaled(x, -1.0 / r));
                return SubgradientSet::empty_set(n);
            }
            case DatumKind::zero:
            case DatumKind::constant:
                return SubgradientSet::singleton(Vec(n, 0.0));
            case DatumKind::abs: {
                if (r > 0.0) return SubgradientSet::singleton(scaled(x, 1.0 / r));
                // At the origin D^-|x| is the closed unit ball; the radial
                // descriptor records its norm span, which is all the gradient
                // statistics consume.
                Vec axis(n, 0.0);
                axis[0] = 1.0;
                return SubgradientSet::segment(axis, -1.0, 1.0);
            }
            case DatumKind::samples: {
                const auto i = nearest_interior_index(x[0]);
                if (!i) return SubgradientSet::empty_set(n);
                return numeric_from_samples(*i);
            }
        }
        return SubgradientSet::empty_set(n);
    }

    // --- samples helpers ----------------------------------------------------
    double interp(double x) const {
        const auto& xs = sample_x;
        if (xs.size() < 2) throw std::invalid_argument("sampled datum needs >= 2 nodes");
        if (x <= xs.front()) return sample_u.front();
        if (x >= xs.back()) return sample_u.back();
        const double dx = xs[1] - xs[0];
        auto j = static_cast<std::size_t>((x - xs.front()) / dx);
        j = std::min(j, xs.size() - 2);
        const double w = (x - xs[j]) / dx;
        return (1.0 - w) * sample_u[j] + w * sample_u[j + 1];
    }
    std::optional<std::size_t> nearest_interior_index(double x) const {
        if (sample_x.size() < 3) return std::nullopt;
        const double dx = sample_x[1] - sample_x[0];
        const auto j = static_cast<long>(std::lround((x - sample_x.front()) / dx));
        if (j < 1 || j + 1 >= static_cast<long>(sample_x.size())) return std::nullopt;
        return static_cast<std::size_t>(j);
    }
    SubgradientSet numeric_from_samples(std::size_t i) const;
};

// ---------------------------------------------------------------------------
// Constructors

inline InitialDatum make_cone_datum(int dimension) {
    if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
    InitialDatum d;
    d.dimension = dimension;
    d.kind = DatumKind::cone;
    d.lipschitz = 1.0;
    return d;
}

inline InitialDatum make_zero_datum(int dimension) {
    InitialDatum d;
    d.dimension = dimension;
    d.kind = DatumKind::zero;
    d.lipschitz = 0.0;
    return d;
}

inline InitialDatum make_constant_datum(int dimension, double k) {
    InitialDatum d;
    d.dimension = dimension;
    d.kind = DatumKind::constant;
    d.constant_value = k;
    d.lipschitz = 0.0;
    return d;
}

inline InitialDatum make_abs_datum(int dimension) {
    InitialDatum d;
    d.dimension = dimension;
    d.kind = DatumKind::abs;
    d.lipschitz = 1.0;
    return d;
}

/// 1D datum from a column of values on a uniform grid.
inline InitialDatum make_sampled_datum(std::vector<double> xs, std::vector<double> us) {
    if (xs.size() != us.size() || xs.size() < 2)
        throw std::invalid_argument("sampled datum needs matching grids, >= 2 nodes");
    InitialDatum d;
    d.dimension = 1;
    d.kind = DatumKind::samples;
    d.sample_x = std::move(xs);
    d.sample_u = std::move(us);
    double lip = 0.0;
    const double dx = d.sample_x[1] - d.sample_x[0];
    for (std::size_t i = 0; i + 1 < d.sample_u.size(); ++i)
        lip = std::max(lip, std::abs(d.sample_u[i + 1] - d.sample_u[i]) / dx);
    d.lipschitz = lip;
    return d;
}

// ---------------------------------------------------------------------------
// One-sided slopes: D^- of sampled 1D data at an interior grid index.

inline SubgradientSet numeric_subgradient_1d(std::span<const double> values,
                                             std::size_t index, double dx) {
    if (index == 0 || index + 1 >= values.size())
        throw std::out_of_range("numeric_subgradient_1d needs an interior index");
    const double sl = (values[index] - values[index - 1]) / dx;
    const double sr = (values[index + 1] - values[index]) / dx;
    // roundoff slack so exactly-linear data is not misread as a concave kink
    const double slack = 1e-12 * std::max(1.0, std::max(std::abs(sl), std::abs(sr)));
    if (sl > sr + slack) return SubgradientSet::empty_set(1);
    return SubgradientSet::segment(Vec{1.0}, std::min(sl, sr), std::max(sl, sr));
}

inline SubgradientSet InitialDatum::numeric_from_samples(std::size_t i) const {
    return numeric_subgradient_1d(sample_u, i, sample_x[1] - sample_x[0]);
}

// ---------------------------------------------------------------------------
// Radial norm profiles: min/max subgradient norms as functions of rho = |x|,
// evaluated exactly over an interval of radii for the analytic data.

namespace detail {

struct NormEnvelope {
    double lo = kInf;  // inf of |p| over nonempty sets in the interval
    double hi = 0.0;   // sup of |p|
    bool any = false;  // saw at least one nonempty set
    void absorb(double mn, double mx) {
        any = true;
        lo = std::min(lo, mn);
        hi = std::max(hi, mx);
    }
};

/// Exact envelope of subgradient norms of `d` over radii in [rlo, rhi]
/// (closed; callers handle open endpoints by nudging with `open_*`).
inline NormEnvelope radial_envelope(const InitialDatum& d, double rlo, double rhi,
                                    bool open_hi) {
    NormEnvelope env;
    auto touch = [&](double rho, bool included) {
        if (!included) return;
        Vec x(d.dimension, 0.0);
        x[0] = rho;
        const auto s = d.subgradient(x);
        if (!s.empty) env.absorb(s.min_norm(), s.max_norm());
    };
    switch (d.kind) {
        case DatumKind::zero:
        case DatumKind::constant:
            env.absorb(0.0, 0.0);
            return env;
        case DatumKind::cone: {
            // profile: rho=0 empty; (0,1): {1}; 1: [0,1]; (1,inf): {0}
            if (rhi > 0.0 && rlo < 1.0) env.absorb(1.0, 1.0);
            const bool hits_one = rlo <= 1.0 && (open_hi ? rhi > 1.0 : rhi >= 1.0);
            if (hits_one) env.absorb(0.0, 1.0);
            if (rhi > 1.0) env.absorb(0.0, 0.0);
            return env;
        }
        case DatumKind::abs: {
            // profile: rho=0: ball norms [0,1]; rho>0: {1}
            if (rlo <= 0.0) env.absorb(0.0, 1.0);
            if (rhi > 0.0) env.absorb(1.0, 1.0);
            return env;
        }
        case DatumKind::samples: {
            // dense scan of one-sided slopes on the sample grid
            const double dx = d.sample_x[1] - d.sample_x[0];
            for (std::size_t i = 1; i + 1 < d.sample_x.size(); ++i) {
                const double rho = std::abs(d.sample_x[i]);
                if (rho < rlo - dx || rho > rhi + dx) continue;
                touch(d.sample_x[i], true);
            }
            return env;
        }
    }
    return env;
}

}  // namespace detail

/// Largest theta with |p| >= theta for every subgradient at every point of the
/// OPEN ball B_r(x0); empty-subgradient points impose no constraint. Returns
/// nullopt when theta would be 0.
inline std::optional<double> theta_on_ball(const InitialDatum& datum, const Vec& x0,
                                           double r) {
    if (!(r > 0.0)) throw std::invalid_argument("theta_on_ball needs r > 0");
    const double c = norm(x0);
    const double rlo = std::max(c - r, 0.0);
    const double rhi = c + r;
    const auto env = detail::radial_envelope(datum, rlo, rhi, /*open_hi=*/true);
    if (!env.any) return std::nullopt;  // only existing subgradients constrain theta
    if (env.lo <= 0.0) return std::nullopt;
    return env.lo;
}

/// inf/sup of |p| over all subgradients at points of the CLOSED ball of radius
/// radius + delta around `center`.
inline GradientStats gradient_stats_on_ball(const InitialDatum& datum,
                                            const Vec& center, double radius,
                                            double delta = 0.0) {
    if (radius < 0.0 || delta < 0.0)
        throw std::invalid_argument("gradient_stats_on_ball needs radius, delta >= 0");
    const double R = radius + delta;
    const double c = norm(center);
    const auto env =
        detail::radial_envelope(datum, std::max(c - R, 0.0), c + R, /*open_hi=*/false);
    GradientStats g;
    g.radius_used = radius;
    g.delta = delta;
    if (!env.any) {
        g.empty = true;
        g.inf_norm = kInf;
        g.sup_norm = 0.0;
        return g;
    }
    g.inf_norm = env.lo;
    g.sup_norm = env.hi;
    return g;
}

}  // namespace hjlb
