#include "conelab/heat_solver.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <gtest/gtest.h>

#include <random>

using namespace conelab;

namespace {

// Independent oracle: power series in long double.
double series_j(double nu, double x) {
    long double term = std::pow(0.5L * x, static_cast<long double>(nu)) / std::tgamma(static_cast<long double>(nu) + 1);
    long double sum = term;
    const long double q = -0.25L * x * x;
    for (int k = 1; k < 200; ++k) {
        term *= q / (k * (k + static_cast<long double>(nu)));
        sum += term;
        if (std::abs(term) < 1e-22L * std::abs(sum)) break;
    }
    return static_cast<double>(sum);
}

RadialField mode0_field(const LogGrid& g, const std::function<double(double)>& f, int max_modes = 1) {
    RadialField u = RadialField::zeros(g, CrossSection::circle(2 * pi), max_modes);
    for (int j = 0; j < g.size(); ++j) u.values[0](j) = f(g.x(j));
    return u;
}

double rel_l2(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, const LogGrid& g) {
    return weighted_l2(a - b, g, 1, 0.0, 1.0) / weighted_l2(b, g, 1, 0.0, 1.0);
}

}  // namespace

TEST(Bessel, MatchesSeriesOracle) {
    for (double nu : {0.0, 0.5, 1.0, 2.0, 3.5})
        for (double x : {0.01, 0.5, 2.0, 5.0, 9.0, 14.0}) EXPECT_NEAR(bessel_j(nu, x), series_j(nu, x), 1e-12);
}

TEST(Bessel, FirstDirichletRoot) {
    const auto r = bessel_roots(1, 0.0, OuterBC::dirichlet, 1);
    EXPECT_NEAR(r[0], 2.404825557695773, 1e-12);
}

TEST(Bessel, RootsMatchBoostZeros) {
    for (double lam : {0.0, -1.0, -4.0, -2.25}) {
        const double nu = bessel_order(1, lam);
        const auto r = bessel_roots(1, lam, OuterBC::dirichlet, 6);
        for (int m = 0; m < 6; ++m) EXPECT_NEAR(r[m], boost::math::cyl_bessel_j_zero(nu, m + 1), 1e-11);
    }
    // n = 1 Neumann on the zero mode: J_0' = -J_1, so the positive roots are zeros of J_1.
    const auto rn = bessel_roots(1, 0.0, OuterBC::neumann, 4);
    for (int m = 0; m < 4; ++m) EXPECT_NEAR(rn[m], boost::math::cyl_bessel_j_zero(1.0, m + 1), 1e-11);
    EXPECT_NEAR(rn[0], 3.8317059702075125, 1e-11);
}

TEST(Bessel, NormFormulaMatchesQuadrature) {
    const GaussRule rule = GaussRule::legendre(30);
    for (int n : {1, 2, 3})
        for (auto bc : {OuterBC::dirichlet, OuterBC::neumann})
            for (const auto& phi : radial_eigenfunctions(n, -2.0, bc, 3)) {
                const double q = rule.integrate_composite([&](double x) { return phi(x) * phi(x) * std::pow(x, n); },
                                                          0.0, 1.0, 40);
                EXPECT_NEAR(phi.norm2(), q, 1e-12);
            }
}

TEST(Bessel, NeumannZeroModeStartsWithConstant) {
    const auto b = radial_eigenfunctions(2, 0.0, OuterBC::neumann, 3);
    EXPECT_EQ(b[0].k, 0.0);
    EXPECT_EQ(b[0](0.3), 1.0);
    EXPECT_GT(b[1].k, 0.0);
}

TEST(Bessel, SeriesIdentityAndScaling) {
    const std::vector<double> x{0.05, 0.3, 0.7, 0.95};
    const std::vector<double> a{1.0, -0.4, 0.25};
    const auto basis = radial_eigenfunctions(1, -1.0, OuterBC::dirichlet, 3);
    const auto v0 = bessel_series_solution(a, 1, -1.0, 0.0, x, OuterBC::dirichlet, 3);
    for (std::size_t i = 0; i < x.size(); ++i) {
        double direct = 0.0;
        for (int j = 0; j < 3; ++j) direct += a[j] * series_j(1.0, basis[j].k * x[i]);
        EXPECT_NEAR(v0[i], direct, 1e-10);
    }
    const auto s0 = bessel_series_solution({2.0}, 1, -1.0, 0.0, x, OuterBC::dirichlet, 1);
    const auto s1 = bessel_series_solution({2.0}, 1, -1.0, 0.3, x, OuterBC::dirichlet, 1);
    for (std::size_t i = 0; i < x.size(); ++i)
        EXPECT_NEAR(s1[i], std::exp(-basis[0].k * basis[0].k * 0.3) * s0[i], 1e-14);
}

TEST(Bessel, ProjectionRecoversCoefficients) {
    const auto basis = radial_eigenfunctions(1, 0.0, OuterBC::neumann, 4);
    const auto a = bessel_project([&](double x) { return 1.0 + 0.5 * basis[2](x); }, basis);
    EXPECT_NEAR(a[0], 1.0, 1e-12);
    EXPECT_NEAR(a[1], 0.0, 1e-12);
    EXPECT_NEAR(a[2], 0.5, 1e-12);
}

TEST(Bessel, TooFewRootsIsAnError) {
    EXPECT_THROW(bessel_roots(1, 0.0, OuterBC::dirichlet, 10, 10.0), NumericalError);
}

TEST(Assemble, UnitStencilForFlatZeroMode) {
    const LogGrid g(-4.0, 65);
    const auto op = assemble_mode_operator(1, 0.0, g, OuterBC::dirichlet);
    const double h2 = g.h() * g.h();
    for (int j : {3, 20, 50}) {
        const double w = std::exp(-2.0 * g.tau(j));
        EXPECT_NEAR(op.lower(j).real(), w / h2, 1e-9 * w / h2);
        EXPECT_NEAR(op.diag(j).real(), -2.0 * w / h2, 1e-9 * w / h2);
        EXPECT_NEAR(op.upper(j).real(), w / h2, 1e-9 * w / h2);
    }
}

TEST(Assemble, ConstantsAreHarmonicWithNeumann) {
    for (int n : {1, 2, 3}) {
        const LogGrid g(-6.0, 200);
        const auto op = assemble_mode_operator(n, 0.0, g, OuterBC::neumann);
        const Eigen::VectorXcd r = op.apply(Eigen::VectorXcd::Ones(op.size()));
        EXPECT_LT(r.cwiseAbs().maxCoeff(), 1e-9 * op.diag.cwiseAbs().maxCoeff() * 1e-6);
    }
}

TEST(Assemble, RegularIndicialSolutionAnnihilated) {
    // n = 2, lambda = -2: q(s) = s^2 + s - 2 vanishes at s = 1.
    const LogGrid g(-5.0, 301);
    const auto op = assemble_mode_operator(2, -2.0, g, OuterBC::dirichlet);
    Eigen::VectorXcd v(op.size());
    for (int j = 0; j < op.size(); ++j) v(j) = g.x(j);
    const Eigen::VectorXcd r = op.apply(v);
    for (int j = 0; j + 1 < op.size(); ++j) EXPECT_LT(std::abs(r(j)), 1e-9 * std::abs(op.diag(j)) * g.x(j));
}

TEST(Assemble, SecondOrderConsistency) {
    // Delta (x^3 phi_1) = q(3) x on the n = 2, l = 1 mode with q(3) = 10.
    std::vector<double> err;
    for (int J : {101, 201, 401}) {
        const LogGrid g(-3.0, J);
        const auto op = assemble_mode_operator(2, -2.0, g, OuterBC::dirichlet);
        Eigen::VectorXcd v(op.size());
        for (int j = 0; j < op.size(); ++j) v(j) = std::pow(g.x(j), 3);
        const Eigen::VectorXcd r = op.apply(v);
        double e = 0.0;
        for (int j = 1; j + 1 < op.size(); ++j) e = std::max(e, std::abs(r(j) - 10.0 * g.x(j)) / g.x(j));
        err.push_back(e);
    }
    EXPECT_NEAR(std::log2(err[0] / err[1]), 2.0, 0.15);
    EXPECT_NEAR(std::log2(err[1] / err[2]), 2.0, 0.15);
}

TEST(Step, ZeroStaysZero) {
    const LogGrid g(-6.0, 128);
    const auto u = RadialField::zeros(g, CrossSection::circle(2 * pi), 3);
    const auto v = step(u, 0.0, 1e-3, {}, OuterBC::dirichlet);
    EXPECT_EQ(v.max_abs_difference(u), 0.0);
}

TEST(Step, ConstantSteadyStateNeumann) {
    const LogGrid g(-6.0, 256);
    const auto u = mode0_field(g, [](double) { return 1.0; });
    auto v = u;
    for (int k = 0; k < 50; ++k) v = step(v, k * 1e-3, 1e-3, {}, OuterBC::neumann);
    EXPECT_LT(v.max_abs_difference(u), 1e-12);
}

TEST(Step, DirichletEigenfunctionDecay) {
    const double k = 2.404825557695773;
    std::vector<double> errs;
    for (int J : {129, 257}) {
        const LogGrid g(-8.0, J);
        const auto u0 = mode0_field(g, [&](double x) { return bessel_j(0.0, k * x); });
        HeatConfig cfg;
        cfg.grid = g;
        cfg.T = 0.1;
        cfg.dt = 2e-4;
        const auto traj = solve_heat(u0, {}, cfg);
        const Eigen::VectorXcd expected = std::exp(-k * k * 0.1) * u0.values[0];
        errs.push_back(rel_l2(traj.snapshots.back().values[0], expected, g));
    }
    EXPECT_LT(errs[1], 1e-3);
    EXPECT_GT(errs[0] / errs[1], 3.0);
}

TEST(SolveHeat, ZeroTrajectory) {
    const LogGrid g(-6.0, 128);
    HeatConfig cfg;
    cfg.grid = g;
    cfg.T = 0.01;
    cfg.dt = 1e-3;
    cfg.output_stride = 2;
    const auto traj = solve_heat(RadialField::zeros(g, CrossSection::circle(2 * pi), 3), {}, cfg);
    EXPECT_EQ(traj.times.size(), 6u);
    for (const auto& s : traj.snapshots)
        for (const auto& v : s.values) EXPECT_EQ(v.cwiseAbs().maxCoeff(), 0.0);
}

TEST(SolveHeat, MatchesBesselOracle) {
    const auto basis = radial_eigenfunctions(1, 0.0, OuterBC::dirichlet, 2);
    const std::vector<double> a{1.0, 0.5};
    const LogGrid g(-8.0, 512);
    const auto u0 = mode0_field(g, [&](double x) { return a[0] * basis[0](x) + a[1] * basis[1](x); });
    HeatConfig cfg;
    cfg.grid = g;
    cfg.T = 0.1;
    cfg.dt = 1e-4;
    const auto traj = solve_heat(u0, {}, cfg);
    std::vector<double> xs;
    for (int j = 0; j < g.size(); ++j) xs.push_back(g.x(j));
    const auto ref = bessel_series_solution(a, 1, 0.0, 0.1, xs, OuterBC::dirichlet, 2);
    Eigen::VectorXcd r(g.size());
    for (int j = 0; j < g.size(); ++j) r(j) = ref[j];
    EXPECT_LT(rel_l2(traj.snapshots.back().values[0], r, g), 1e-4);
}

TEST(SolveHeat, Linearity) {
    const LogGrid g(-6.0, 200);
    std::mt19937 rng(4);
    std::normal_distribution<double> nd;
    auto random_field = [&] {
        RadialField u = RadialField::zeros(g, CrossSection::circle(2 * pi), 3);
        for (auto& v : u.values)
            for (int j = 0; j < g.size(); ++j) v(j) = Complex(nd(rng), nd(rng)) * smooth_cutoff(g.x(j));
        return u;
    };
    const auto u = random_field(), v = random_field();
    ForcingProvider f = [&](std::size_t m, double t) {
        Eigen::VectorXcd r(g.size());
        for (int j = 0; j < g.size(); ++j) r(j) = (1.0 + m) * std::sin(3 * t) * g.x(j);
        return r;
    };
    ForcingProvider f2 = [&](std::size_t m, double t) { return Eigen::VectorXcd(-2.0 * f(m, t)); };
    HeatConfig cfg;
    cfg.grid = g;
    cfg.T = 0.02;
    cfg.dt = 1e-3;
    const Complex a(0.7, -0.2), b(-1.3, 0.0);
    ForcingProvider fab = [&](std::size_t m, double t) { return Eigen::VectorXcd(a * f(m, t) + b * f2(m, t)); };
    const auto lhs = solve_heat(a * u + b * v, fab, cfg);
    const auto tu = solve_heat(u, f, cfg), tv = solve_heat(v, f2, cfg);
    for (std::size_t s = 0; s < lhs.snapshots.size(); ++s) {
        const auto rhs = a * tu.snapshots[s] + b * tv.snapshots[s];
        EXPECT_LT(lhs.snapshots[s].max_abs_difference(rhs), 1e-10);
    }
}

TEST(SolveHeat, MaximumPrincipleImplicitEuler) {
    const LogGrid g(-6.0, 256);
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    RadialField u0 = mode0_field(g, [](double) { return 0.0; });
    for (int j = 0; j < g.size(); ++j) u0.values[0](j) = ud(rng);
    HeatConfig cfg;
    cfg.grid = g;
    cfg.T = 0.05;
    cfg.dt = 1e-3;
    cfg.theta = 1.0;
    cfg.outer_bc = OuterBC::neumann;
    cfg.output_stride = 1;
    const auto traj = solve_heat(u0, {}, cfg);
    double prev = 1e300;
    for (const auto& s : traj.snapshots) {
        const double m = s.values[0].cwiseAbs().maxCoeff();
        EXPECT_LE(m, prev * (1 + 1e-12));
        prev = m;
    }
}

TEST(SolveHeat, SmoothingOfRoughData) {
    // Piecewise-linear interpolant of random nodal values on a coarse grid,
    // re-sampled on each refinement so the continuum datum is fixed.
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    const LogGrid coarse(-4.0, 65);
    std::vector<double> nodal(coarse.size());
    for (auto& v : nodal) v = ud(rng);
    auto u0_fn = [&](double x) {
        const double tau = std::log(x);
        const double s = (tau - coarse.tau_min()) / coarse.h();
        const int i = std::clamp(static_cast<int>(std::floor(s)), 0, coarse.size() - 2);
        const double w = s - i;
        return (1 - w) * nodal[i] + w * nodal[i + 1];
    };
    std::vector<double> n1, n2;
    for (int J : {257, 513, 1025}) {
        const LogGrid g(-4.0, J);
        HeatConfig cfg;
        cfg.grid = g;
        cfg.T = 0.1;
        cfg.dt = 1e-4;
        cfg.theta = 1.0;
        cfg.outer_bc = OuterBC::neumann;
        const auto traj = solve_heat(mode0_field(g, u0_fn), {}, cfg);
        const auto d1 = apply_cone_laplacian(traj.snapshots.back(), OuterBC::neumann);
        const auto d2 = apply_cone_laplacian(d1, OuterBC::neumann);
        n1.push_back(mellin_norm(d1, 0, 0.0));
        n2.push_back(mellin_norm(d2, 0, 0.0));
    }
    for (std::size_t i = 0; i < n1.size(); ++i) {
        EXPECT_TRUE(std::isfinite(n1[i]) && std::isfinite(n2[i]));
        if (i > 0) {
            EXPECT_LT(std::abs(n1[i] / n1[i - 1] - 1.0), 0.2);
            EXPECT_LT(std::abs(n2[i] / n2[i - 1] - 1.0), 0.2);
        }
    }
}

TEST(HeatConfig, Validation) {
    HeatConfig cfg;
    cfg.theta = 0.3;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.theta = 0.5;
    cfg.dt = 2.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
}
