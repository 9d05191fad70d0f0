#include "conelab/conelab.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace conelab;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("conelab_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Config, DefaultsWhenKeysAreMissing) {
    const RunConfig c = parse_config(Json::object());
    EXPECT_EQ(c.gamma, -0.5);
    EXPECT_EQ(c.max_modes, 5);
    EXPECT_EQ(c.tol_pole, 1e-9);
    EXPECT_EQ(c.grid.points, 513);
    EXPECT_EQ(c.powers.contour.n_quad, 64);
    EXPECT_EQ(c.fit.options.max_condition, 1e10);
    EXPECT_EQ(c.cross_section.build().length(), 2 * pi);
}

TEST(Config, ReadsEveryBlock) {
    const Json j = Json::parse(R"({
        "cross_section": {"type": "circle", "length_over_pi": "1/2"},
        "max_modes": 2, "gamma": -0.25, "arithmetic": "float",
        "tolerances": {"pole": 1e-8, "membership": 1e-7},
        "grid": {"tau_min": -4, "points": 65},
        "heat": {"T": 0.2, "dt": 1e-3, "outer_bc": "neumann", "theta": 1.0, "output_times": [0.1]},
        "fit": {"x_a": 0.01, "x_b": 0.2, "guard_terms": 1, "basis_power": 2},
        "powers": {"z": [-0.5, [-0.25, 1.0]], "n_quad": 32, "shift": 2.0, "rbound_N": 3},
        "output": "somewhere", "seed": 7, "threads": 3
    })");
    const RunConfig c = parse_config(j);
    EXPECT_NEAR(c.cross_section.build().length(), pi / 2, 1e-15);
    EXPECT_FALSE(c.exact);
    EXPECT_EQ(c.tol_membership, 1e-7);
    EXPECT_EQ(c.heat.grid.size(), 65);
    EXPECT_EQ(c.heat.outer_bc, OuterBC::neumann);
    EXPECT_EQ(c.heat.theta, 1.0);
    EXPECT_EQ(c.fit_window(c.heat.grid).x_a, 0.01);
    EXPECT_EQ(c.fit.options.guard_terms, 1);
    ASSERT_EQ(c.powers.z.size(), 2u);
    EXPECT_EQ(c.powers.z[1], Complex(-0.25, 1.0));
    EXPECT_EQ(c.powers.contour.n_quad, 32);
    EXPECT_EQ(*c.powers.shift, 2.0);
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.source, j);
}

TEST(Config, GammaOutsideWindowIsRejectedForDD) {
    // unit circle window is (-1, 0)
    EXPECT_THROW(parse_config(Json::parse(R"({"gamma": 0.5, "heat": {}})")), ConfigError);
    EXPECT_NO_THROW(parse_config(Json::parse(R"({"gamma": 0.5})")));
    EXPECT_NO_THROW(parse_config(Json::parse(R"({"gamma": -0.5, "heat": {}})")));
}

TEST(Config, MalformedValuesAreConfigErrors) {
    EXPECT_THROW(parse_config(Json::parse(R"({"max_modes": "many"})")), ConfigError);
    EXPECT_THROW(parse_config(Json::parse(R"({"cross_section": {"type": "torus"}})")), ConfigError);
    EXPECT_THROW(parse_config(Json::parse(R"({"heat": {"outer_bc": "robin"}})")), ConfigError);
    EXPECT_THROW(parse_config(Json::parse(R"({"heat": {"dt": -1}})")), ConfigError);
    EXPECT_THROW(parse_config(Json::parse(R"({"powers": {"z": ["x"]}})")), ConfigError);
    EXPECT_THROW(parse_config(Json::parse("[1, 2]")), ConfigError);
}

TEST(Config, MissingFileNamesThePath) {
    try {
        load_config("/no/such/dir/cfg.json");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("/no/such/dir/cfg.json"), std::string::npos);
    }
}

TEST(Config, ShippedConfigsParse) {
    for (const auto& e : fs::directory_iterator(CONELAB_CONFIG_DIR)) {
        if (e.path().extension() != ".json") continue;
        EXPECT_NO_THROW(load_config(e.path())) << e.path();
    }
}

TEST(Config, ExplicitOperatorMatchesLaplacianPreset) {
    // x^2 A = (x d_x)^2 + (n-1) x d_x + Delta_Y as explicit polynomial coefficients
    Json j = Json::parse(R"({"operator": {"preset": "explicit", "mu": 2,
                                          "base": [[0], [0], [1]], "eig": [[1], [0], [0]]}})");
    const RunConfig c = parse_config(j);
    const auto a = build_operator<Rational>(c);
    const auto b = build_operator<Rational>(parse_config(Json::object()));
    const auto pa = pole_set(a, c.gamma, a.all_modes());
    const auto pb = pole_set(b, c.gamma, b.all_modes());
    ASSERT_EQ(pa.entries.size(), pb.entries.size());
    for (std::size_t i = 0; i < pa.entries.size(); ++i) {
        EXPECT_EQ(pa.entries[i].rho, pb.entries[i].rho);
        EXPECT_EQ(pa.entries[i].max_log_power, pb.entries[i].max_log_power);
    }
}

TEST(Io, FieldRoundTripIsExact) {
    const auto cs = CrossSection::circle(2 * pi);
    const LogGrid g(-5.0, 41);
    RadialField f = RadialField::zeros(g, cs, 2);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> d;
    for (auto& v : f.values)
        for (int j = 0; j < g.size(); ++j) v(j) = Complex(d(rng), d(rng));
    const fs::path dir = scratch("field");
    write_field_csv(dir / "f.csv", f);
    const RadialField r = read_field_csv(dir / "f.csv", cs, 2);
    EXPECT_EQ(r.grid.size(), g.size());
    EXPECT_EQ(r.max_abs_difference(f), 0.0);
    write_field_csv(dir / "g.csv", r);
    EXPECT_EQ(slurp(dir / "f.csv"), slurp(dir / "g.csv"));
}

TEST(Io, BadFieldFilesAreDataErrors) {
    const auto cs = CrossSection::circle(2 * pi);
    const fs::path dir = scratch("badfield");
    auto write = [&](const std::string& name, const std::string& body) {
        std::ofstream(dir / name) << body;
        return dir / name;
    };
    EXPECT_THROW(read_field_csv(write("h.csv", "x,y\n"), cs, 1), DataError);
    EXPECT_THROW(read_field_csv(write("n.csv", "tau,mode,re,im\n-1,0,nan,0\n-0.5,0,1,0\n0,0,1,0\n"), cs, 1),
                 DataError);
    EXPECT_THROW(read_field_csv(write("u.csv", "tau,mode,re,im\n-1,0,1,0\n-0.9,0,1,0\n0,0,1,0\n"), cs, 1),
                 DataError);
    EXPECT_THROW(read_field_csv(write("m.csv", "tau,mode,re,im\n-1,7,1,0\n-0.5,7,1,0\n0,7,1,0\n"), cs, 1),
                 DataError);
    EXPECT_THROW(read_field_csv(dir / "absent.csv", cs, 1), ConfigError);
}

TEST(Io, BasisJsonRoundTrip) {
    const auto spec = laplacian_spec<Rational>(make_modes(CrossSection::circle(2 * pi), 3), 1);
    const auto b = enumerate_asymptotics(pole_set_power(spec, -0.5, 2, spec.all_modes()));
    const auto r = basis_from_json(Json::parse(basis_to_json(b).dump()));
    ASSERT_EQ(r.terms.size(), b.terms.size());
    for (std::size_t i = 0; i < b.terms.size(); ++i) {
        EXPECT_EQ(r.terms[i].rho, b.terms[i].rho);
        EXPECT_EQ(r.terms[i].exact, b.terms[i].exact);
        EXPECT_EQ(r.terms[i].m, b.terms[i].m);
        EXPECT_EQ(r.terms[i].mode, b.terms[i].mode);
    }
    EXPECT_THROW(basis_from_json(Json::parse(R"({"terms": [{"rho": 1}]})")), DataError);
}

TEST(Io, PolesCsvSchema) {
    const auto spec = laplacian_spec<Rational>(make_modes(CrossSection::circle(2 * pi), 2), 1);
    std::ostringstream out;
    write_poles_csv(out, pole_set(spec, -0.5, spec.all_modes()));
    const std::string s = out.str();
    EXPECT_EQ(s.rfind("mode,label,re_rho,im_rho,max_log_power,in_strip\n", 0), 0u);
    EXPECT_NE(s.find("\n0,k=0,0,0,1,1\n"), std::string::npos);
    EXPECT_NE(s.find("\n1,k=+1,1,0,0,1\n"), std::string::npos);
}

TEST(Io, TrajectoryRoundTripAndDeterminism) {
    const RunConfig cfg = parse_config(Json::parse(R"({
        "max_modes": 2, "grid": {"tau_min": -6, "points": 97},
        "heat": {"T": 0.01, "dt": 1e-3, "outer_bc": "neumann", "output_stride": 5}})"));
    RadialField u0 = RadialField::zeros(cfg.heat.grid, cfg.cross_section.build(), cfg.max_modes);
    for (int j = 0; j < cfg.heat.grid.size(); ++j) u0.values[0](j) = 1.0 + cfg.heat.grid.x(j);
    const HeatTrajectory tr = solve_heat(u0, {}, cfg.heat);
    const fs::path a = scratch("traj_a"), b = scratch("traj_b");
    write_trajectory(a, tr, cfg, 0.0);
    write_trajectory(b, solve_heat(u0, {}, cfg.heat), cfg, 0.0);
    const HeatTrajectory r = read_trajectory(a);
    ASSERT_EQ(r.times, tr.times);
    for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
        EXPECT_EQ(r.snapshots[i].max_abs_difference(tr.snapshots[i]), 0.0);
        EXPECT_EQ(slurp(a / snapshot_name(i)), slurp(b / snapshot_name(i)));
    }
    const Json m = Json::parse(slurp(a / "manifest.json"));
    for (const char* key : {"command", "config", "seed", "versions", "wall_time_s", "times", "scheme"})
        EXPECT_TRUE(m.contains(key)) << key;
    EXPECT_EQ(m.at("scheme").at("outer_bc"), "neumann");
}

TEST(Io, FitsCsvSchema) {
    const auto cs = CrossSection::circle(2 * pi);
    const LogGrid g(-8.0, 257);
    RadialField u = RadialField::zeros(g, cs, 1);
    u.values[0].setConstant(2.0);
    const auto spec = laplacian_spec<Rational>(make_modes(cs, 1), 1);
    const TipFit f = fit_tip_expansion(u, enumerate_asymptotics(pole_set(spec, -0.5, {0})), FitWindow::default_for(g),
                                       {}, 0.5);
    std::ostringstream out;
    write_fits_csv(out, {f});
    std::istringstream in(out.str());
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    EXPECT_EQ(header, "t,rho_re,rho_im,m,mode,c_re,c_im,residual,decay_exp");
    const auto cells = detail::split_csv(row);
    ASSERT_EQ(cells.size(), 9u);
    EXPECT_EQ(cells[0], "0.5");
    EXPECT_EQ(cells[3], "0");
    EXPECT_NEAR(std::stod(cells[5]), 2.0, 1e-12);
}

TEST(Verify, SuitesCoverEveryCriterionOnce) {
    std::vector<int> all;
    for (const char* s : {"poles", "heat", "tip", "powers"})
        for (int id : suite_criteria(s)) all.push_back(id);
    std::sort(all.begin(), all.end());
    EXPECT_EQ(all, suite_criteria("all"));
    EXPECT_THROW(suite_criteria("everything"), ConfigError);
    EXPECT_THROW(run_criterion(11), LookupError);
}

TEST(Verify, PoleSuitePasses) {
    for (const auto& r : run_suite("poles")) EXPECT_TRUE(r.passed) << r.id << ": " << r.detail;
}
