#pragma once

// Scenario-driven verification: run a configured example (closed form or
// scheme), measure min-norm subgradients, evaluate every applicable lower
// bound, check the comparison and barrier inequalities, and emit CSV/SVG
// artifacts. Checks run in the order the config declares them; all output is
// deterministic.

#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hjlb/bounds.hpp"
#include "hjlb/config.hpp"
#include "hjlb/convolution.hpp"
#include "hjlb/hamiltonian.hpp"
#include "hjlb/initial_data.hpp"
#include "hjlb/numeric.hpp"
#include "hjlb/report.hpp"
#include "hjlb/solver.hpp"

namespace hjlb {

inline InitialDatum make_datum_by_name(const std::string& name, int dimension);

struct ScenarioConfig {
    std::string name = "scenario";
    std::string hamiltonian = "transport+";
    std::string datum = "cone";
    std::string samples_file;  // datum = samples: one value per line
    double samples_xmin = -1.0;
    double samples_xmax = 1.0;
    GridSpec grid{-3.0, 3.0, 1200, 0.7, 0.5};
    double x0 = 0.0;
    double r = 1.0;
    std::optional<double> theta;  // override; otherwise theta_on_ball
    std::vector<std::string> checks;
    std::string mode = "oracle";  // oracle | scheme
    std::vector<double> times{0.1, 0.2, 0.3, 0.5};
    int xpoints = 41;
    double epsilon = 0.1;
    std::optional<double> gamma;  // defaults to gamma_min of the model
    std::optional<double> tolerance;  // defaults by mode: 1e-9 / 5e-2

    static ScenarioConfig from_config(const ConfigMap& cfg) {
        ScenarioConfig s;
        s.name = cfg.get_string("name", "scenario");
        s.hamiltonian = cfg.get_string("hamiltonian", "transport+");
        s.datum = cfg.get_string("datum", "cone");
        s.samples_file = cfg.get_string("samples_file", "");
        s.samples_xmin = cfg.get_double("samples_xmin", -1.0);
        s.samples_xmax = cfg.get_double("samples_xmax", 1.0);
        s.grid.xmin = cfg.get_double("xmin", -3.0);
        s.grid.xmax = cfg.get_double("xmax", 3.0);
        s.grid.cells = cfg.get_int("cells", 1200);
        s.grid.t_end = cfg.get_double("t_end", 0.7);
        s.grid.cfl = cfg.get_double("cfl", 0.5);
        s.x0 = cfg.get_double("x0", 0.0);
        s.r = cfg.get_double("r", 1.0);
        s.theta = cfg.get_optional("theta");
        if (cfg.has("checks")) s.checks = cfg.get_words("checks");
        if (s.checks.empty()) throw ConfigError("config needs a nonempty checks list");
        s.mode = cfg.get_string("mode", "oracle");
        if (s.mode != "oracle" && s.mode != "scheme")
            throw ConfigError("mode must be oracle or scheme");
        if (cfg.has("times")) s.times = cfg.get_doubles("times");
        s.xpoints = cfg.get_int("xpoints", 41);
        s.epsilon = cfg.get_double("epsilon", 0.1);
        s.gamma = cfg.get_optional("gamma");
        s.tolerance = cfg.get_optional("tolerance");
        try {  // surface bad kind names as config errors (exit code 2)
            (void)make_builtin_by_name(s.hamiltonian, 1);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        if (s.datum != "samples") (void)make_datum_by_name(s.datum, 1);
        return s;
    }

    double tol() const {
        if (tolerance) return *tolerance;
        return mode == "oracle" ? 1e-9 : 5e-2;
    }
};

inline InitialDatum make_datum_by_name(const std::string& name, int dimension) {
    std::string kind = name;
    double param = 0.0;
    const auto open = name.find('(');
    if (open != std::string::npos) {
        const auto close = name.find(')', open);
        if (close == std::string::npos)
            throw ConfigError("malformed datum name: " + name);
        kind = name.substr(0, open);
        param = std::strtod(name.substr(open + 1, close - open - 1).c_str(), nullptr);
    }
    if (kind == "cone") return make_cone_datum(dimension);
    if (kind == "zero") return make_zero_datum(dimension);
    if (kind == "abs") return make_abs_datum(dimension);
    if (kind == "constant") return make_constant_datum(dimension, param);
    throw ConfigError("unknown datum kind: " + name);
}

/// Datum from scenario fields; "samples" reads one value per line from
/// samples_file onto the declared uniform grid.
inline InitialDatum make_scenario_datum(const ScenarioConfig& sc) {
    if (sc.datum != "samples") return make_datum_by_name(sc.datum, 1);
    if (sc.samples_file.empty())
        throw ConfigError("datum = samples needs samples_file");
    std::ifstream in(sc.samples_file);
    if (!in) throw ConfigError("cannot open samples_file: " + sc.samples_file);
    std::vector<double> us;
    std::string line;
    while (std::getline(in, line)) {
        const auto t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        us.push_back(std::strtod(t.c_str(), nullptr));
    }
    if (us.size() < 2) throw ConfigError("samples_file needs at least two values");
    std::vector<double> xs(us.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        xs[i] = sc.samples_xmin + (sc.samples_xmax - sc.samples_xmin) * i /
                                      (xs.size() - 1.0);
    return make_sampled_datum(std::move(xs), std::move(us));
}

// ---------------------------------------------------------------------------
// Lower-bound verification rows.

struct VerificationRow {
    double x = 0.0;
    double t = 0.0;
    double p_min_measured = 0.0;
    double bound_l = 0.0;          // nan when the radicand is negative
    double bound_L = 0.0;
    double bound_sharpened = 0.0;  // nan when undefined
    double bound_special = 0.0;    // nan when lambda is absent
    bool in_E = false;
    bool in_D = false;
    bool pass = true;  // vacuously true outside E or on empty subgradients
};

struct VerificationOutcome {
    std::vector<VerificationRow> rows;
    bool skipped = false;  // no subgradient-norm floor available
    std::string diagnostic;
    bool all_pass() const {
        for (const auto& r : rows)
            if (!r.pass) return false;
        return true;
    }
};

inline VerificationOutcome verify_lower_bound(const ScenarioConfig& sc) {
    VerificationOutcome out;
    const HamiltonianModel model = make_builtin_by_name(sc.hamiltonian, 1);
    const InitialDatum datum = make_scenario_datum(sc);
    std::optional<double> theta = sc.theta;
    if (!theta) theta = theta_on_ball(datum, Vec{sc.x0}, sc.r);
    if (!theta) {
        out.skipped = true;
        out.diagnostic = "no positive subgradient-norm floor theta on B_r(x0)";
        return out;
    }
    BoundInputs inputs{model.constants, *theta, sc.grid.t_end, std::nullopt};
    DependenceDomain domain{Vec{sc.x0}, sc.r, model.constants};

    std::optional<NumericalSolution> solution;
    std::optional<ClosedFormOracle> oracle;
    if (sc.mode == "scheme") {
        solution = solve(model, datum, sc.grid);
    } else {
        oracle = make_oracle(*model.builtin, datum, model.param);
    }

    const double tol = sc.tol();
    for (const double t : sc.times) {
        for (int i = 0; i < sc.xpoints; ++i) {
            const double x =
                sc.x0 - sc.r + 2.0 * sc.r * (i + 0.5) / sc.xpoints;
            VerificationRow row;
            row.x = x;
            row.t = t;
            row.in_E = in_domain_E(domain, Vec{x}, t);
            row.in_D = in_domain_D(domain, Vec{x}, t);
            const auto l = lower_l(inputs, t);
            row.bound_l = l ? *l : std::nan("");
            row.bound_L = lower_L(inputs, t);
            const auto sh = lower_sharpened(inputs, t);
            row.bound_sharpened = sh ? *sh : std::nan("");
            if (model.constants.lambda) {
                const auto stats = gradient_stats_on_ball(
                    datum, Vec{x}, radius_R(model.constants, Vec{x}, t));
                row.bound_special =
                    stats.empty ? std::nan("")
                                : special_lower(stats.inf_norm, model.constants, t);
            } else {
                row.bound_special = std::nan("");
            }
            const SubgradientSet sub =
                oracle ? measured_subgradient(*oracle, x, t)
                       : measured_subgradient(*solution, x, t);
            if (sub.empty) {
                row.p_min_measured = std::nan("");
                out.rows.push_back(row);
                continue;  // the theorems quantify over existing subgradients
            }
            row.p_min_measured = sub.min_norm();
            if (row.in_E) {
                double bound = row.bound_L;
                if (l) bound = std::max(bound, *l);
                if (sh) bound = std::max(bound, *sh);
                if (!std::isnan(row.bound_special))
                    bound = std::max(bound, row.bound_special);
                bound = std::max(bound, 0.0);
                row.pass = row.p_min_measured >= bound - tol;
            }
            out.rows.push_back(row);
        }
    }
    return out;
}

inline void write_verification_csv(const std::string& path,
                                   const std::vector<VerificationRow>& rows) {
    CsvWriter w(path);
    w.header({"x", "t", "p_min_measured", "bound_l", "bound_L", "bound_sharpened",
              "bound_special", "in_E", "in_D", "pass"});
    for (const auto& r : rows) {
        w.raw_row({format_double(r.x), format_double(r.t),
                   format_double(r.p_min_measured), format_double(r.bound_l),
                   format_double(r.bound_L), format_double(r.bound_sharpened),
                   format_double(r.bound_special), r.in_E ? "1" : "0",
                   r.in_D ? "1" : "0", r.pass ? "1" : "0"});
    }
}

// ---------------------------------------------------------------------------
// Comparison inequality between the inf-convolution subsolution u_eps (with
// error term f = (beta C1/2) e^{gamma t} eps^2) and the solution u (g = 0):
//
//   (u_eps - u)(x, t) <= sup_y e^{-K3 t}(u_eps - u)(y, 0)
//                        + (beta C1 eps^2 / (2 (gamma + K3))) (e^{gamma t} - e^{-K3 t})
//
// asserted at grid points of E(x0, r), boundary margin excluded.

struct ComparisonPoint {
    double x = 0.0;
    double t = 0.0;
    double lhs = 0.0;  // (u_eps - u)(x, t)
    double rhs = 0.0;
};

struct ComparisonReport {
    std::vector<ComparisonPoint> points;
    double max_violation = -kInf;  // max of lhs - rhs over checked points
    int checked_points = 0;
    double tolerance = 0.0;
    bool precondition_ok = true;  // u_eps <= u everywhere
    bool pass = false;
};

inline ComparisonReport verify_comparison(const FieldBlock& u_field,
                                          const HamiltonianModel& model,
                                          const ConvolutionParams& params,
                                          double tolerance) {
    ComparisonReport rep;
    rep.tolerance = tolerance;
    const auto& c = model.constants;
    const double gamma = params.gamma;

    FieldBlock u_eps = u_field;
    for (std::size_t k = 0; k < u_field.times.size(); ++k) {
        FieldSlice slice{u_field.grid, u_field.values[k], u_field.times[k]};
        u_eps.values[k] = inf_convolution_spatial(slice, params).values;
    }

    double sup_abs = 0.0, lip = 0.0;
    const double dx = u_field.grid.dx();
    for (const auto& row : u_field.values) {
        for (double v : row) sup_abs = std::max(sup_abs, std::abs(v));
        for (std::size_t i = 0; i + 1 < row.size(); ++i)
            lip = std::max(lip, std::abs(row[i + 1] - row[i]) / dx);
    }
    const double margin = boundary_margin(lip, sup_abs, params.epsilon, gamma,
                                          u_field.times.back());

    for (std::size_t k = 0; k < u_field.times.size(); ++k)
        for (int i = 0; i < u_field.grid.points(); ++i)
            if (u_eps.values[k][i] > u_field.values[k][i] + 1e-12)
                rep.precondition_ok = false;
    if (!rep.precondition_ok) return rep;

    double sup_initial = -kInf;
    for (int i = 0; i < u_field.grid.points(); ++i)
        sup_initial = std::max(sup_initial, u_eps.values[0][i] - u_field.values[0][i]);

    DependenceDomain domain{Vec{params.x0}, params.r, c};
    for (std::size_t k = 0; k < u_field.times.size(); ++k) {
        const double t = u_field.times[k];
        const double integral =
            (gamma + c.k3 > 0.0)
                ? c.beta * c.c1 * params.epsilon * params.epsilon /
                      (2.0 * (gamma + c.k3)) *
                      (std::exp(gamma * t) - std::exp(-c.k3 * t))
                : 0.0;
        const double rhs = std::exp(-c.k3 * t) * sup_initial + integral;
        for (int i = 0; i < u_field.grid.points(); ++i) {
            const double x = u_field.grid.x(i);
            if (!in_domain_E(domain, Vec{x}, std::max(t, 1e-12))) continue;
            if (x - (params.x0 - params.r) < margin ||
                (params.x0 + params.r) - x < margin)
                continue;
            const double lhs = u_eps.values[k][i] - u_field.values[k][i];
            rep.points.push_back({x, t, lhs, rhs});
            rep.max_violation = std::max(rep.max_violation, lhs - rhs);
            ++rep.checked_points;
        }
    }
    rep.pass = rep.max_violation <= rep.tolerance;
    return rep;
}

// ---------------------------------------------------------------------------
// Barrier inequality: the comparison-principle barrier
//   h_eps(x, t) = B2 t + sqrt(|x - x0|^2 + eps^2)                  (A2 = 0)
//   h_eps(x, t) = (B2/A2 + sqrt(|x|^2 + eps^2))(e^{A2 t} - 1)
//                 + sqrt(|x - x0|^2 + eps^2)                       (A2 > 0)
// satisfies d_t h - (A2 |x| + B2) |D_x h| >= 0; evaluated analytically at
// random sample points.

struct BarrierReport {
    double min_value = kInf;
    int samples = 0;
    bool pass = false;
};

inline double barrier_inequality_lhs(const StructuralConstants& c, const Vec& x0,
                                     const Vec& x, double t, double epsilon) {
    const int n = static_cast<int>(x.size());
    const double dx0 = dist(x, x0);
    const double s0 = std::sqrt(dx0 * dx0 + epsilon * epsilon);
    if (c.a2 == 0.0) return c.b2 - c.b2 * dx0 / s0;
    const double nx = norm(x);
    const double sx = std::sqrt(nx * nx + epsilon * epsilon);
    const double ht = c.a2 * std::exp(c.a2 * t) * (c.b2 / c.a2 + sx);
    Vec grad(n);
    for (int i = 0; i < n; ++i)
        grad[i] = x[i] / sx * std::expm1(c.a2 * t) + (x[i] - x0[i]) / s0;
    return ht - (c.a2 * nx + c.b2) * norm(grad);
}

inline BarrierReport check_barrier(const StructuralConstants& c, const Vec& x0,
                                   double r, double epsilon, int samples,
                                   double horizon = 1.0, std::uint64_t seed = 7) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("barrier needs epsilon > 0");
    BarrierReport rep;
    rep.samples = samples;
    Rng rng(seed);
    const int n = static_cast<int>(x0.size());
    for (int s = 0; s < samples; ++s) {
        Vec x(n);
        double r2 = 0.0;
        do {  // rejection-sample the ball
            r2 = 0.0;
            for (int i = 0; i < n; ++i) {
                x[i] = uniform(rng, -r, r);
                r2 += x[i] * x[i];
            }
        } while (r2 > r * r);
        for (int i = 0; i < n; ++i) x[i] += x0[i];
        const double t = uniform(rng, 0.0, horizon);
        rep.min_value =
            std::min(rep.min_value, barrier_inequality_lhs(c, x0, x, t, epsilon));
    }
    rep.pass = rep.min_value >= -1e-12;
    return rep;
}

// ---------------------------------------------------------------------------
// Scenario runner. Exit status: 0 all checks pass, 1 a check failed.
// (Config parse errors throw before this point; the CLI maps them to 2.)

inline int run_scenario(const ScenarioConfig& sc, const std::string& out_dir,
                        std::ostream& log = std::cout) {
    ensure_dir(out_dir);
    bool all_ok = true;
    const HamiltonianModel model = make_builtin_by_name(sc.hamiltonian, 1);
    const InitialDatum datum = make_scenario_datum(sc);

    for (const auto& check : sc.checks) {
        if (check == "lower_bound") {
            const auto outcome = verify_lower_bound(sc);
            if (outcome.skipped) {
                log << "[skip] " << sc.name << " lower_bound: " << outcome.diagnostic
                    << "\n";
                continue;
            }
            write_verification_csv(out_dir + "/" + sc.name + "_verification.csv",
                                   outcome.rows);
            const bool ok = outcome.all_pass();
            log << (ok ? "[ ok ] " : "[FAIL] ") << sc.name << " lower_bound ("
                << outcome.rows.size() << " rows)\n";
            all_ok = all_ok && ok;
        } else if (check == "comparison") {
            ConvolutionParams params;
            params.epsilon = sc.epsilon;
            params.gamma = sc.gamma ? *sc.gamma : gamma_min(model.constants);
            params.x0 = sc.x0;
            params.r = sc.r;
            FieldBlock block;
            block.grid = make_grid(sc.x0 - sc.r, sc.x0 + sc.r,
                                   std::min(sc.grid.cells, 800));
            const int levels = 25;
            for (int k = 0; k < levels; ++k)
                block.times.push_back(sc.grid.t_end * k / (levels - 1));
            if (sc.mode == "oracle") {
                const auto oracle = make_oracle(*model.builtin, datum, model.param);
                for (const double t : block.times) {
                    std::vector<double> row(block.grid.points());
                    for (int i = 0; i < block.grid.points(); ++i)
                        row[i] = oracle.eval(block.grid.x(i), t);
                    block.values.push_back(std::move(row));
                }
            } else {
                const auto sol = solve(model, datum, sc.grid);
                const Grid1D g = sc.grid.grid();
                for (const double t : block.times) {
                    const auto level = sol.level_near(t);
                    std::vector<double> row(block.grid.points());
                    for (int i = 0; i < block.grid.points(); ++i)
                        row[i] = sol.values[level][g.nearest(block.grid.x(i))];
                    block.values.push_back(std::move(row));
                }
            }
            const double tol = sc.mode == "oracle" ? 1e-6 : 5e-2;
            const auto rep = verify_comparison(block, model, params, tol);
            CsvWriter w(out_dir + "/" + sc.name + "_comparison.csv");
            w.header({"x", "t", "lhs", "rhs"});
            for (const auto& pt : rep.points) w.row({pt.x, pt.t, pt.lhs, pt.rhs});
            log << (rep.pass ? "[ ok ] " : "[FAIL] ") << sc.name << " comparison ("
                << rep.checked_points << " points, max violation "
                << format_double(rep.max_violation) << ")\n";
            all_ok = all_ok && rep.pass;
        } else if (check == "barrier") {
            const auto rep =
                check_barrier(model.constants, Vec{sc.x0}, sc.r, sc.epsilon, 10000,
                              sc.grid.t_end);
            CsvWriter w(out_dir + "/" + sc.name + "_barrier.csv");
            w.header({"min_value", "samples", "pass"});
            w.raw_row({format_double(rep.min_value), std::to_string(rep.samples),
                       rep.pass ? "1" : "0"});
            log << (rep.pass ? "[ ok ] " : "[FAIL] ") << sc.name << " barrier (min "
                << format_double(rep.min_value) << ")\n";
            all_ok = all_ok && rep.pass;
        } else if (check == "profiles") {
            // solution profiles at the configured times, oracle or scheme
            FieldCsv f;
            f.xmin = sc.grid.xmin;
            f.xmax = sc.grid.xmax;
            f.cells = sc.grid.cells;
            const Grid1D g = sc.grid.grid();
            std::vector<PlotSeries> series;
            if (sc.mode == "oracle") {
                const auto oracle = make_oracle(*model.builtin, datum, model.param);
                for (const double t : sc.times) {
                    std::vector<double> row(g.points());
                    for (int i = 0; i < g.points(); ++i) row[i] = oracle.eval(g.x(i), t);
                    f.times.push_back(t);
                    f.values.push_back(row);
                }
            } else {
                const auto sol = solve(model, datum, sc.grid);
                for (const double t : sc.times) {
                    const auto level = sol.level_near(t);
                    f.times.push_back(sol.times[level]);
                    f.values.push_back(sol.values[level]);
                }
            }
            for (std::size_t k = 0; k < f.times.size(); ++k) {
                PlotSeries ps;
                ps.label = "t=" + format_double(f.times[k]);
                for (int i = 0; i < g.points(); ++i) {
                    ps.x.push_back(g.x(i));
                    ps.y.push_back(f.values[k][i]);
                }
                series.push_back(std::move(ps));
            }
            write_field_csv(out_dir + "/" + sc.name + "_profiles.csv", f);
            write_svg_lines(out_dir + "/" + sc.name + "_profiles.svg", series);
            log << "[ ok ] " << sc.name << " profiles (" << f.times.size()
                << " levels)\n";
        } else if (check == "bound_compare") {
            // F(t) > 0 sweep over the parameter grid, beta = 1
            CsvWriter w(out_dir + "/" + sc.name + "_bound_compare.csv");
            w.header({"theta", "c1", "k3", "t", "F"});
            bool ok = true;
            for (const double theta : {0.5, 1.0, 2.0})
                for (const double c1 : {0.1, 1.0, 10.0})
                    for (const double k3 : {0.0, 0.1, 1.0, 10.0}) {
                        BoundInputs in{{c1, 1.0, 0.0, 0.0, k3, std::nullopt},
                                       theta,
                                       1.0,
                                       std::nullopt};
                        const auto tl = vanish_time_l(in);
                        if (!tl) continue;
                        for (int j = 1; j <= 200; ++j) {
                            const double t = *tl * j / 200.0;
                            const double F = compare_F(in, t);
                            w.row({theta, c1, k3, t, F});
                            ok = ok && F > 0.0;
                        }
                    }
            log << (ok ? "[ ok ] " : "[FAIL] ") << sc.name << " bound_compare\n";
            all_ok = all_ok && ok;
        } else {
            throw ConfigError("unknown check: " + check);
        }
    }
    return all_ok ? 0 : 1;
}

}  // namespace hjlb
