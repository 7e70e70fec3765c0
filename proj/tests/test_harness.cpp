#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <filesystem>
#include <fstream>

#include "hjlb/harness.hpp"

using namespace hjlb;

namespace {

ScenarioConfig scenario(const std::string& ham, const std::string& mode) {
    ScenarioConfig sc;
    sc.name = "test";
    sc.hamiltonian = ham;
    sc.datum = "cone";
    sc.mode = mode;
    sc.checks = {"lower_bound"};
    sc.times = {0.1, 0.2, 0.3, 0.5};
    sc.xpoints = 41;
    return sc;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Config, ParseAndOverride) {
    const auto dir = std::filesystem::temp_directory_path() / "hjlb_cfg";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "a.cfg").string();
    {
        std::ofstream out(path);
        out << "# comment\nname = demo\nhamiltonian = eikonal(1.0)\n"
            << "times = 0.1, 0.2\nxpoints = 21\nchecks = lower_bound\n";
    }
    auto cfg = ConfigMap::from_file(path);
    EXPECT_EQ(cfg.get_string("name"), "demo");
    EXPECT_EQ(cfg.get_doubles("times").size(), 2u);
    cfg.override_entry("xpoints=31");
    EXPECT_EQ(cfg.get_int("xpoints"), 31);
    const auto sc = ScenarioConfig::from_config(cfg);
    EXPECT_EQ(sc.xpoints, 31);
    EXPECT_EQ(sc.hamiltonian, "eikonal(1.0)");

    EXPECT_THROW(ConfigMap::from_file("/nonexistent/x.cfg"), ConfigError);
    {
        std::ofstream out(path);
        out << "key_without_value\n";
    }
    EXPECT_THROW(ConfigMap::from_file(path), ConfigError);
    {
        std::ofstream out(path);
        out << "checks = \n";  // empty checks list
    }
    auto empty = ConfigMap::from_file(path);
    EXPECT_THROW(ScenarioConfig::from_config(empty), ConfigError);
}

TEST(VerifyLowerBound, TransportTightness) {
    const auto outcome = verify_lower_bound(scenario("transport+", "oracle"));
    ASSERT_FALSE(outcome.skipped);
    EXPECT_TRUE(outcome.all_pass());
    int checked = 0;
    for (const auto& row : outcome.rows) {
        if (!row.in_E || std::isnan(row.p_min_measured)) continue;
        EXPECT_NEAR(row.p_min_measured, std::exp(-2.0 * row.t), 1e-9);
        EXPECT_NEAR(row.bound_L, std::exp(-2.0 * row.t), 1e-12);
        ++checked;
    }
    EXPECT_GT(checked, 50);
}

TEST(VerifyLowerBound, TransportMinusSlack) {
    const auto outcome = verify_lower_bound(scenario("transport-", "oracle"));
    EXPECT_TRUE(outcome.all_pass());
    for (const auto& row : outcome.rows) {
        if (!row.in_E || std::isnan(row.p_min_measured)) continue;
        EXPECT_NEAR(row.p_min_measured, 1.0, 1e-9);
        EXPECT_GE(row.p_min_measured - row.bound_L,
                  1.0 - std::exp(-2.0 * row.t) - 1e-9);
    }
}

TEST(VerifyLowerBound, NegUSpecialBoundTight) {
    const auto outcome = verify_lower_bound(scenario("transport-negu", "oracle"));
    EXPECT_TRUE(outcome.all_pass());
    int checked = 0;
    for (const auto& row : outcome.rows) {
        if (!row.in_E || std::isnan(row.p_min_measured)) continue;
        ASSERT_FALSE(std::isnan(row.bound_special));
        EXPECT_NEAR(row.bound_special, 1.0, 1e-12);  // I - C1 beta t with beta=0
        EXPECT_NEAR(row.p_min_measured, 1.0, 1e-9);
        ++checked;
    }
    EXPECT_GT(checked, 50);
}

TEST(VerifyLowerBound, RowsRecordBoundDominance) {
    // L and the sharpened bound never fall below l on any emitted row
    for (const char* ham : {"transport+", "eikonal(1.0)"}) {
        const auto outcome = verify_lower_bound(scenario(ham, "oracle"));
        for (const auto& row : outcome.rows) {
            if (std::isnan(row.bound_l)) continue;
            EXPECT_GE(row.bound_L, row.bound_l - 1e-12);
            if (!std::isnan(row.bound_sharpened))
                EXPECT_GE(row.bound_sharpened, row.bound_l - 1e-12);
        }
    }
}

TEST(VerifyLowerBound, SampledDatumColumn) {
    // a sampled tent behaves like the analytic cone within grid resolution
    const auto dir = std::filesystem::temp_directory_path() / "hjlb_samples";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "tent.csv").string();
    {
        std::ofstream out(path);
        out << std::setprecision(17);
        const int n = 4000;
        for (int i = 0; i <= n; ++i) {
            const double x = -2.0 + 4.0 * i / n;
            out << std::max(1.0 - std::abs(x), 0.0) << "\n";
        }
    }
    auto sc = scenario("transport+", "oracle");
    sc.datum = "samples";
    sc.samples_file = path;
    sc.samples_xmin = -2.0;
    sc.samples_xmax = 2.0;
    sc.theta = 1.0;  // numeric slopes of the sampled tent stay marginally
                     // below 1 at kink-adjacent nodes, so pin theta
    const auto outcome = verify_lower_bound(sc);
    ASSERT_FALSE(outcome.skipped);
    int checked = 0;
    for (const auto& row : outcome.rows) {
        if (!row.in_E || std::isnan(row.p_min_measured)) continue;
        EXPECT_TRUE(row.pass) << "x=" << row.x << " t=" << row.t;
        ++checked;
    }
    EXPECT_GT(checked, 50);
}

TEST(VerifyLowerBound, SkipsWithoutTheta) {
    auto sc = scenario("transport+", "oracle");
    sc.datum = "zero";
    const auto outcome = verify_lower_bound(sc);
    EXPECT_TRUE(outcome.skipped);
    EXPECT_FALSE(outcome.diagnostic.empty());
}

TEST(VerifyLowerBound, SchemeModeWithinTolerance) {
    auto sc = scenario("transport+", "scheme");
    sc.grid = GridSpec{-3.0, 3.0, 1200, 0.6, 0.5};
    sc.times = {0.2, 0.5};
    const auto outcome = verify_lower_bound(sc);
    ASSERT_FALSE(outcome.skipped);
    // assert on E-interior rows away from the solution kinks: the pointwise
    // slopes of a monotone scheme are polluted inside the diffusion band
    // around the apex (width ~ sqrt(4 nu t) ~ 0.12 at t = 0.5, N = 1200)
    int checked = 0;
    for (const auto& row : outcome.rows) {
        if (!row.in_E || std::isnan(row.p_min_measured)) continue;
        if (std::abs(row.x) > std::exp(-row.t) - 0.08) continue;
        if (std::abs(row.x) < 0.16) continue;
        EXPECT_TRUE(row.pass) << "x=" << row.x << " t=" << row.t << " measured "
                              << row.p_min_measured << " L " << row.bound_L;
        ++checked;
    }
    EXPECT_GT(checked, 10);
}

TEST(VerifyComparison, ConstantFieldIsExactlyTight) {
    // a constant field is a fixed point of the inf-convolution, so with
    // beta = 0 both sides of the inequality vanish identically
    const auto model = make_builtin_by_name("transport+", 1);
    FieldBlock block;
    block.grid = make_grid(-0.9, 0.9, 200);
    for (int k = 0; k < 5; ++k) block.times.push_back(0.1 * k);
    for (std::size_t k = 0; k < block.times.size(); ++k)
        block.values.push_back(std::vector<double>(block.grid.points(), 0.75));
    ConvolutionParams params;
    params.epsilon = 0.1;
    params.gamma = gamma_min(model.constants);
    params.x0 = 0.0;
    params.r = 0.9;
    const auto rep = verify_comparison(block, model, params, 1e-6);
    EXPECT_TRUE(rep.precondition_ok);
    EXPECT_TRUE(rep.pass);
    for (const auto& pt : rep.points) {
        EXPECT_NEAR(pt.lhs, 0.0, 1e-13);
        EXPECT_NEAR(pt.rhs, 0.0, 1e-13);
    }
}

TEST(VerifyComparison, TrivialPairAndEikonal) {
    const auto model = make_builtin_by_name("eikonal(1.0)", 1);
    const auto cone = make_cone_datum(1);
    const auto oracle = make_oracle(BuiltinHamiltonian::eikonal, cone, 1.0);
    FieldBlock block;
    block.grid = make_grid(-0.9, 0.9, 400);
    for (int k = 0; k < 11; ++k) block.times.push_back(0.4 * k / 10.0);
    for (const double t : block.times) {
        std::vector<double> row(block.grid.points());
        for (int i = 0; i < block.grid.points(); ++i)
            row[i] = oracle.eval(block.grid.x(i), t);
        block.values.push_back(std::move(row));
    }
    ConvolutionParams params;
    params.epsilon = 0.1;
    params.gamma = gamma_min(model.constants);
    params.x0 = 0.0;
    params.r = 0.9;
    const auto rep = verify_comparison(block, model, params, 1e-6);
    EXPECT_TRUE(rep.precondition_ok);
    EXPECT_TRUE(rep.pass) << "max violation " << rep.max_violation;
    EXPECT_GT(rep.checked_points, 100);
}

TEST(Barrier, ClosedFormsAndSampling) {
    // A2 = 0: value = B2 (1 - |x-x0|/sqrt(|x-x0|^2+eps^2)) >= 0, = B2 at x = x0
    StructuralConstants c{0.0, 0.0, 0.0, 1.0, 0.0, std::nullopt};
    EXPECT_DOUBLE_EQ(barrier_inequality_lhs(c, Vec{0.0}, Vec{0.0}, 0.3, 0.1), 1.0);
    EXPECT_GE(barrier_inequality_lhs(c, Vec{0.0}, Vec{0.7}, 0.3, 0.1), 0.0);
    const auto rep = check_barrier(c, Vec{0.0}, 1.0, 0.05, 10000);
    EXPECT_TRUE(rep.pass);
    StructuralConstants ca{0.0, 0.0, 1.0, 0.5, 0.0, std::nullopt};
    const auto repa = check_barrier(ca, Vec{0.0}, 1.0, 0.2, 10000);
    EXPECT_TRUE(repa.pass);
    EXPECT_GE(repa.min_value, -1e-12);
}

TEST(RunScenario, ArtifactsAndDeterminism) {
    const auto dir =
        (std::filesystem::temp_directory_path() / "hjlb_out").string();
    std::filesystem::remove_all(dir);
    auto sc = scenario("transport+", "oracle");
    sc.name = "fig-transport";
    sc.checks = {"lower_bound", "profiles", "barrier"};
    sc.times = {0.0, 0.35, 0.7};
    std::ostringstream log1, log2;
    const int rc1 = run_scenario(sc, dir + "/a", log1);
    const int rc2 = run_scenario(sc, dir + "/b", log2);
    EXPECT_EQ(rc1, 0);
    EXPECT_EQ(rc2, 0);
    for (const auto* f :
         {"fig-transport_verification.csv", "fig-transport_profiles.csv",
          "fig-transport_profiles.svg", "fig-transport_barrier.csv"}) {
        const auto a = read_file(dir + "/a/" + f);
        const auto b = read_file(dir + "/b/" + f);
        ASSERT_FALSE(a.empty()) << f;
        EXPECT_EQ(a, b) << f;  // byte-identical across runs
    }
}

TEST(RunScenario, UnknownCheckIsConfigError) {
    auto sc = scenario("transport+", "oracle");
    sc.checks = {"nosuch"};
    std::ostringstream log;
    EXPECT_THROW(run_scenario(sc, "/tmp/hjlb_unused", log), ConfigError);
}

TEST(FieldCsv, RoundTrip) {
    FieldCsv f;
    f.xmin = -1.0;
    f.xmax = 1.0;
    f.cells = 4;
    f.times = {0.0, 0.5};
    f.values = {{0, 1, 2, 1, 0}, {0.0, 0.5, 1.0, 0.5, 0.0}};
    const auto path =
        (std::filesystem::temp_directory_path() / "hjlb_field.csv").string();
    write_field_csv(path, f);
    const auto g = read_field_csv(path);
    EXPECT_EQ(g.cells, 4);
    ASSERT_EQ(g.times.size(), 2u);
    EXPECT_DOUBLE_EQ(g.values[1][2], 1.0);
}
