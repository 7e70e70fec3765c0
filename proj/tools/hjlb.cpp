// hjlb — command-line front end.
//
//   hjlb <solve|chars|bounds|convolve|herglotz|verify> --config FILE
//        [--out DIR] [--override key=value ...]
//
// Exit codes: 0 success, 1 check failures, 2 config parse errors.

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include "hjlb/characteristics.hpp"
#include "hjlb/config.hpp"
#include "hjlb/harness.hpp"
#include "hjlb/herglotz.hpp"
#include "hjlb/report.hpp"

namespace {

using namespace hjlb;

ConfigMap load(const std::string& path, const std::vector<std::string>& overrides) {
    ConfigMap cfg = ConfigMap::from_file(path);
    for (const auto& o : overrides) cfg.override_entry(o);
    return cfg;
}

int cmd_solve(const ConfigMap& cfg, const std::string& out_dir) {
    const ScenarioConfig sc = [&] {
        ConfigMap c = cfg;
        if (!c.has("checks")) c.override_entry("checks=profiles");
        return ScenarioConfig::from_config(c);
    }();
    const auto model = make_builtin_by_name(sc.hamiltonian, 1);
    const auto datum = make_datum_by_name(sc.datum, 1);
    const auto sol = solve(model, datum, sc.grid);
    FieldCsv f;
    f.xmin = sc.grid.xmin;
    f.xmax = sc.grid.xmax;
    f.cells = sc.grid.cells;
    std::vector<double> times = sc.times;
    times.insert(times.begin(), 0.0);
    times.push_back(sc.grid.t_end);
    for (const double t : times) {
        const auto level = sol.level_near(t);
        if (!f.times.empty() && f.times.back() == sol.times[level]) continue;
        f.times.push_back(sol.times[level]);
        f.values.push_back(sol.values[level]);
    }
    ensure_dir(out_dir);
    write_field_csv(out_dir + "/" + sc.name + "_solution.csv", f);
    std::cout << "wrote " << out_dir << "/" << sc.name << "_solution.csv ("
              << f.times.size() << " levels, sigma="
              << format_double(sol.dissipation) << ")\n";
    return 0;
}

int cmd_chars(const ConfigMap& cfg, const std::string& out_dir) {
    const std::string name = cfg.get_string("name", "chars");
    const auto model = make_builtin_by_name(cfg.get_string("hamiltonian"), 1);
    const auto datum = make_datum_by_name(cfg.get_string("datum", "cone"), 1);
    const double x = cfg.get_double("terminal_x");
    const double t = cfg.get_double("terminal_t");
    const int steps = cfg.get_int("steps", 1000);

    TerminalCondition term;
    term.x = Vec{x};
    term.t = t;
    if (cfg.has("terminal_p") && cfg.has("terminal_u")) {
        term.p = Vec{cfg.get_double("terminal_p")};
        term.u = cfg.get_double("terminal_u");
    } else {
        const auto oracle = make_oracle(*model.builtin, datum, model.param);
        term.u = oracle.eval(x, t);
        const auto sub = measured_subgradient(oracle, x, t);
        if (sub.empty) throw ConfigError("no subgradient at the terminal point");
        term.p = Vec{0.5 * (sub.lo + sub.hi)};
    }

    const auto path = integrate_backward(model, term, steps);
    ensure_dir(out_dir);
    {
        CsvWriter w(out_dir + "/" + name + "_path.csv");
        w.header({"s", "xi", "eta", "u_xi"});
        for (std::size_t j = 0; j < path.times.size(); ++j)
            w.row({path.times[j], path.xi[j][0], path.eta[j][0], path.u_xi[j]});
    }
    CheckReport checks = check_propagation(path, model.constants);
    if (model.p_lipschitz) {
        const auto spatial = check_spatial(path, model.constants);
        checks.rows.insert(checks.rows.end(), spatial.rows.begin(),
                           spatial.rows.end());
    }
    if (model.constants.lambda) {
        const auto special =
            check_special_propagation(path, *model.constants.lambda, model.constants);
        checks.rows.insert(checks.rows.end(), special.rows.begin(),
                           special.rows.end());
    }
    const double residual = endpoint_subgradient_residual(path, datum);
    checks.rows.push_back(
        {"endpoint_residual", residual, 1e-8, residual <= 1e-8});
    {
        CsvWriter w(out_dir + "/" + name + "_checks.csv");
        w.header({"inequality", "lhs", "rhs", "pass"});
        for (const auto& r : checks.rows)
            w.raw_row({r.name, format_double(r.lhs), format_double(r.rhs),
                       r.pass ? "1" : "0"});
    }
    const bool ok = checks.all_pass();
    std::cout << (ok ? "all checks pass" : "CHECK FAILURES") << " ("
              << checks.rows.size() << " rows)\n";
    return ok ? 0 : 1;
}

int cmd_bounds(const ConfigMap& cfg, const std::string& out_dir) {
    const std::string name = cfg.get_string("name", "bounds");
    StructuralConstants c;
    c.c1 = cfg.get_double("c1", 0.0);
    c.beta = cfg.get_double("beta", 0.0);
    c.a2 = cfg.get_double("a2", 0.0);
    c.b2 = cfg.get_double("b2", 0.0);
    c.k3 = cfg.get_double("k3", 0.0);
    c.lambda = cfg.get_optional("lambda");
    BoundInputs in{c, cfg.get_double("theta", 1.0), cfg.get_double("horizon", 1.0),
                   cfg.get_optional("t0")};
    const double t_max = cfg.get_double("t_max", in.horizon_T);
    const int samples = cfg.get_int("t_samples", 101);

    ensure_dir(out_dir);
    CsvWriter w(out_dir + "/" + name + "_bounds.csv");
    w.header({"t", "l", "L", "sharpened", "ley", "M", "m", "F"});
    for (int j = 0; j < samples; ++j) {
        const double t = t_max * j / (samples - 1.0);
        const auto l = lower_l(in, t);
        const auto sh = lower_sharpened(in, t);
        const auto ley =
            in.t0 ? lower_ley(in, t, *in.t0) : std::optional<double>{};
        w.row({t, l ? *l : std::nan(""), lower_L(in, t), sh ? *sh : std::nan(""),
               ley ? *ley : std::nan(""),
               c.lambda ? special_M(in, t) : std::nan(""),
               c.lambda ? special_m(in, t) : std::nan(""), compare_F(in, t)});
    }
    std::cout << "wrote " << out_dir << "/" << name << "_bounds.csv\n";
    return 0;
}

int cmd_convolve(const ConfigMap& cfg, const std::string& out_dir) {
    const std::string name = cfg.get_string("name", "convolve");
    const FieldCsv f = read_field_csv(cfg.get_string("input"));
    ConvolutionParams params;
    params.epsilon = cfg.get_double("epsilon", 0.1);
    params.gamma = cfg.get_double("gamma", 0.0);
    params.x0 = cfg.get_double("x0", 0.5 * (f.xmin + f.xmax));
    params.r = cfg.get_double("r", 0.5 * (f.xmax - f.xmin));

    FieldCsv out = f;
    ensure_dir(out_dir);
    CsvWriter stats(out_dir + "/" + name + "_gap.csv");
    stats.header({"t", "max_gap", "min_gap"});
    const Grid1D grid{f.xmin, f.xmax, f.cells};
    for (std::size_t k = 0; k < f.times.size(); ++k) {
        FieldSlice slice{grid, f.values[k], f.times[k]};
        const auto conv = inf_convolution_spatial(slice, params);
        double max_gap = -kInf, min_gap = kInf;
        for (int i = 0; i < grid.points(); ++i) {
            const double gap = conv.values[i] - f.values[k][i];
            max_gap = std::max(max_gap, gap);
            min_gap = std::min(min_gap, gap);
        }
        stats.row({f.times[k], max_gap, min_gap});
        out.values[k] = conv.values;
    }
    write_field_csv(out_dir + "/" + name + "_infconv.csv", out);
    std::cout << "wrote " << out_dir << "/" << name << "_infconv.csv and _gap.csv\n";
    return 0;
}

int cmd_herglotz(const ConfigMap& cfg, const std::string& out_dir) {
    const std::string name = cfg.get_string("name", "herglotz");
    const auto model = make_builtin_by_name(cfg.get_string("hamiltonian"), 1);
    const auto datum = make_datum_by_name(cfg.get_string("datum", "cone"), 1);
    const double x = cfg.get_double("x");
    const double t = cfg.get_double("t");
    const int nodes = cfg.get_int("nodes", 7);
    const int restarts = cfg.get_int("restarts", 4);

    const auto res = value_function(model, datum, Vec{x}, t, nodes, restarts);
    ensure_dir(out_dir);
    {
        CsvWriter w(out_dir + "/" + name + "_minimizer.csv");
        w.header({"s", "xi"});
        for (std::size_t j = 0; j < res.minimizer.times.size(); ++j)
            w.row({res.minimizer.times[j], res.minimizer.nodes[j][0]});
    }
    std::cout << "value = " << format_double(res.value);
    if (model.builtin == BuiltinHamiltonian::eikonal) {
        const auto oracle = make_oracle(BuiltinHamiltonian::eikonal, datum, model.param);
        const double exact = oracle.eval(x, t);
        std::cout << "  oracle = " << format_double(exact)
                  << "  |diff| = " << format_double(std::abs(res.value - exact));
    }
    std::cout << "\n";
    return 0;
}

int cmd_verify(const ConfigMap& cfg, const std::string& out_dir) {
    const ScenarioConfig sc = ScenarioConfig::from_config(cfg);
    return run_scenario(sc, out_dir);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lower gradient bounds for u-dependent Hamilton-Jacobi equations"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::vector<std::string> overrides;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "config file")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--override", overrides, "key=value config overrides");
    };
    CLI::App* solve = app.add_subcommand("solve", "run the monotone grid solver");
    CLI::App* chars = app.add_subcommand("chars", "integrate characteristics");
    CLI::App* bounds = app.add_subcommand("bounds", "tabulate the bound formulas");
    CLI::App* convolve = app.add_subcommand("convolve", "inf-convolve a field CSV");
    CLI::App* herglotz = app.add_subcommand("herglotz", "minimize the action");
    CLI::App* verify = app.add_subcommand("verify", "run a verification scenario");
    for (CLI::App* sub : {solve, chars, bounds, convolve, herglotz, verify})
        add_common(sub);

    CLI11_PARSE(app, argc, argv);

    try {
        const ConfigMap cfg = load(config_path, overrides);
        if (solve->parsed()) return cmd_solve(cfg, out_dir);
        if (chars->parsed()) return cmd_chars(cfg, out_dir);
        if (bounds->parsed()) return cmd_bounds(cfg, out_dir);
        if (convolve->parsed()) return cmd_convolve(cfg, out_dir);
        if (herglotz->parsed()) return cmd_herglotz(cfg, out_dir);
        if (verify->parsed()) return cmd_verify(cfg, out_dir);
    } catch (const hjlb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
