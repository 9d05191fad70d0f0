#pragma once

// Acceptance criteria 1-10. Each check builds its own fixed setup, compares
// against an independent oracle and reports pass/fail with a short detail
// string. A criterion also fails when it overruns its runtime budget.

#include "conelab/bessel.hpp"
#include "conelab/heat_solver.hpp"
#include "conelab/power_calculus.hpp"
#include "conelab/tip_analysis.hpp"

#include <chrono>
#include <iomanip>
#include <random>
#include <sstream>

namespace conelab {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
    double budget = 0.0;
};

namespace verify_detail {

struct Outcome {
    bool passed = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            passed = false;
            detail << "FAILED: " << what << "; ";
        }
    }
};

inline std::string sci(double v) {
    std::ostringstream s;
    s << std::setprecision(3) << std::scientific << v;
    return s.str();
}

inline double bump(double x) {
    if (x <= 0.4 || x >= 0.8) return 0.0;
    const double s = (x - 0.6) / 0.2;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

inline double rel_l2(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, const LogGrid& g, int n) {
    return weighted_l2(a - b, g, n, 0.0, 1.0) / weighted_l2(b, g, n, 0.0, 1.0);
}

// ---------------------------------------------------------------------------

// Closed form (n-1)/2 +- sqrt(((n-1)/2)^2 - lambda) against the computed pole set.
inline void check_pole_formula(Outcome& o, const CrossSection& cs, double gamma, const std::string& name) {
    const int n = cs.dimension();
    const auto spec = laplacian_spec<Rational>(make_modes(cs, 5), n);
    const PoleSet ps = pole_set(spec, gamma, spec.all_modes());
    const double c = 0.5 * (n - 1);
    const double right = 0.5 * (n + 1) - gamma, left = right - 2.0;
    double worst = 0.0;
    for (const auto& mode : spec.modes) {
        const double lam = mode.eigenvalue;
        const Complex r = std::sqrt(Complex(c * c - lam, 0.0));
        std::vector<Complex> expected;
        for (Complex rho : {Complex(c) + r, Complex(c) - r})
            if (rho.real() >= left - 1e-14 && rho.real() < right - 1e-14) {
                const bool dup = std::any_of(expected.begin(), expected.end(),
                                             [&](Complex e) { return std::abs(e - rho) < 1e-12; });
                if (!dup) expected.push_back(rho);
            }
        std::vector<PoleEntry> got;
        for (const auto& e : ps.entries)
            if (e.mode == mode.index && e.in_strip) got.push_back(e);
        if (got.size() != expected.size()) {
            o.require(false, name + " mode " + mode.label + ": " + std::to_string(got.size()) + " poles, expected " +
                                 std::to_string(expected.size()));
            continue;
        }
        for (const auto& rho : expected) {
            double best = INFINITY;
            const PoleEntry* hit = nullptr;
            for (const auto& e : got)
                if (std::abs(e.rho - rho) < best) {
                    best = std::abs(e.rho - rho);
                    hit = &e;
                }
            worst = std::max(worst, best);
            o.require(best <= 1e-12, name + " mode " + mode.label + ": pole off by " + sci(best));
            const int M = (lam == 0.0 && n == 1) ? 1 : 0;
            o.require(hit->max_log_power == M, name + " mode " + mode.label + ": log power " +
                                                   std::to_string(hit->max_log_power) + ", expected " +
                                                   std::to_string(M));
        }
    }
    o.detail << name << " max err " << sci(worst) << "; ";
}

inline Outcome criterion1() {
    Outcome o;
    for (const auto& [ratio, label] : {std::pair{2, "circle 2pi"}, {1, "circle pi"}, {4, "circle 4pi"}})
        check_pole_formula(o, CrossSection::circle_pi(Rational(ratio)), -0.5, label);
    check_pole_formula(o, CrossSection::sphere(2), 0.0, "sphere S2");
    return o;
}

inline Outcome criterion2() {
    Outcome o;
    const WeightWindow s = weight_window(CrossSection::sphere(2));
    const WeightWindow c = weight_window(CrossSection::circle(2 * pi));
    const double es = std::max(std::abs(s.lo + 0.5), std::abs(s.hi - 0.5));
    const double ec = std::max(std::abs(c.lo + 1.0), std::abs(c.hi));
    o.require(es <= 1e-12, "S2 window (" + fmt17(s.lo) + ", " + fmt17(s.hi) + ")");
    o.require(ec <= 1e-12, "circle window (" + fmt17(c.lo) + ", " + fmt17(c.hi) + ")");
    o.detail << "S2 err " << sci(es) << ", circle err " << sci(ec);
    return o;
}

inline void check_annihilation(Outcome& o, const CrossSection& cs, double gamma, const std::string& name) {
    const auto spec = laplacian_spec<Rational>(make_modes(cs, 5), cs.dimension());
    for (int k : {1, 2}) {
        const PoleSet ps = pole_set_power(spec, gamma, k, spec.all_modes());
        const AsymptoticsBasis b = enumerate_asymptotics(ps);
        std::size_t bad = 0;
        for (const auto& t : b.terms) {
            const auto image = apply_operator_power(spec, Expansion<Rational>{make_term<Rational>(t, Rational(1))}, k);
            if (!image.empty()) ++bad;
        }
        const PowerPoleCheck check = validate_power_poles(spec, ps);
        o.require(bad == 0, name + " k=" + std::to_string(k) + ": " + std::to_string(bad) + " terms survive");
        o.require(check.ok, name + " k=" + std::to_string(k) + ": " +
                                (check.failures.empty() ? std::string() : check.failures.front()));
        o.detail << name << " k=" << k << ": " << b.terms.size() << " terms; ";
    }
}

inline Outcome criterion3() {
    Outcome o;
    check_annihilation(o, CrossSection::circle(2 * pi), -0.5, "circle");
    check_annihilation(o, CrossSection::sphere(2), 0.0, "sphere");
    return o;
}

// ---------------------------------------------------------------------------

inline RadialField mode0_field(const LogGrid& g, const CrossSection& cs, int max_modes,
                               const std::function<double(double)>& f) {
    RadialField u = RadialField::zeros(g, cs, max_modes);
    for (int j = 0; j < g.size(); ++j) u.values[0](j) = f(g.x(j));
    return u;
}

inline double bessel_run_error(const LogGrid& g) {
    const auto basis = radial_eigenfunctions(1, 0.0, OuterBC::dirichlet, 2);
    const std::vector<double> a{1.0, 0.5};
    const auto u0 = mode0_field(g, CrossSection::circle(2 * pi), 1,
                                [&](double x) { return a[0] * basis[0](x) + a[1] * basis[1](x); });
    HeatConfig cfg;
    cfg.grid = g;
    cfg.T = 0.1;
    cfg.dt = 1e-4;
    cfg.output_times = {0.1};
    const auto traj = solve_heat(u0, {}, cfg);
    std::vector<double> xs;
    for (int j = 0; j < g.size(); ++j) xs.push_back(g.x(j));
    const auto ref = bessel_series_solution(a, 1, 0.0, 0.1, xs, OuterBC::dirichlet, 2);
    Eigen::VectorXcd r(g.size());
    for (int j = 0; j < g.size(); ++j) r(j) = ref[static_cast<std::size_t>(j)];
    return rel_l2(traj.snapshots.back().values[0], r, g, 1);
}

inline Outcome criterion4() {
    Outcome o;
    const double e512 = bessel_run_error(LogGrid(-8.0, 512));
    o.require(e512 <= 1e-4, "relative L2 error " + sci(e512) + " at J=512");
    o.detail << "J=512 rel err " << sci(e512) << "; orders";
    std::vector<double> errs;
    LogGrid g(-8.0, 65);
    for (int level = 0; level < 3; ++level, g = g.refined()) errs.push_back(bessel_run_error(g));
    for (std::size_t i = 1; i < errs.size(); ++i) {
        const double p = std::log2(errs[i - 1] / errs[i]);
        o.detail << ' ' << std::setprecision(4) << p;
        o.require(p >= 1.7 && p <= 2.3, "order " + std::to_string(p));
    }
    return o;
}

inline Outcome criterion5() {
    Outcome o;
    const LogGrid g(-8.0, 513);
    const auto u0 = mode0_field(g, CrossSection::circle(2 * pi), 3, [](double) { return 1.0; });
    HeatConfig cfg;
    cfg.grid = g;
    cfg.T = 0.1;
    cfg.dt = 1e-4;
    cfg.outer_bc = OuterBC::neumann;
    cfg.output_stride = 10;
    const auto traj = solve_heat(u0, {}, cfg);
    double worst = 0.0;
    for (const auto& s : traj.snapshots) worst = std::max(worst, s.max_abs_difference(u0));
    o.require(worst <= 1e-10, "deviation " + sci(worst));
    o.detail << traj.snapshots.size() << " snapshots, max |u-1| " << sci(worst);
    return o;
}

// ---------------------------------------------------------------------------

inline Outcome criterion6() {
    Outcome o;
    const CrossSection cs = CrossSection::circle(pi);
    const LogGrid g(-8.0, 1025);
    RadialField u0 = RadialField::zeros(g, cs, 3);
    for (std::size_t m = 0; m < 3; ++m)
        for (int j = 0; j < g.size(); ++j) u0.values[m](j) = bump(g.x(j));
    HeatConfig cfg;
    cfg.grid = g;
    cfg.T = 0.05;
    cfg.dt = 1e-4;
    cfg.startup_steps = 4;
    cfg.output_times = {0.05};
    const RadialField u = solve_heat(u0, {}, cfg).snapshots.back();
    const auto spec = laplacian_spec<Rational>(make_modes(cs, 3), 1);
    const auto w = FitWindow::default_for(g);
    const TipFit f1 = fit_tip_expansion(u, enumerate_asymptotics(pole_set(spec, 0.0, spec.all_modes())), w);
    const TipFit f2 = fit_tip_expansion(u, enumerate_asymptotics(pole_set_power(spec, 0.0, 2, spec.all_modes())), w);
    for (std::size_t m : {1u, 2u}) {
        const double e1 = f1.mode(m).decay_exponent, e2 = f2.mode(m).decay_exponent;
        o.require(std::abs(e1 - 2.0) <= 0.02, "mode " + u.modes[m].label + " exponent " + std::to_string(e1));
        o.require(e2 - e1 >= 1.5, "mode " + u.modes[m].label + " increase " + std::to_string(e2 - e1));
        o.detail << u.modes[m].label << ": " << std::setprecision(5) << e1 << " -> " << e2 << "; ";
    }
    return o;
}

inline Outcome criterion7() {
    Outcome o;
    const CrossSection cs = CrossSection::circle(2 * pi);
    const LogGrid g(-8.0, 513);
    const double k1 = bessel_roots(1, 0.0, OuterBC::neumann, 1)[0];
    const auto u0 = mode0_field(g, cs, 1, [&](double x) { return 1.0 + bessel_j(0.0, k1 * x); });
    HeatConfig cfg;
    cfg.grid = g;
    cfg.T = 0.05;
    cfg.dt = 5e-5;
    cfg.outer_bc = OuterBC::neumann;
    cfg.output_stride = 1;
    const auto traj = solve_heat(u0, {}, cfg);
    const auto spec = laplacian_spec<Rational>(make_modes(cs, 1), 1);
    const auto tr = decomposition_track(traj, enumerate_asymptotics(pole_set_power(spec, -0.5, 2, {0})),
                                        FitWindow::default_for(g));
    const auto path = tr.path(0.0, 0, 0);
    const std::size_t stride = (path.size() - 1) / 10;
    double worst = 0.0;
    for (std::size_t s = stride; s < path.size(); s += stride) {
        // oracle: value at the tip of 1 + e^{-k1^2 t} J0(k1 x)
        const double oracle = 1.0 + std::exp(-k1 * k1 * traj.times[s]);
        worst = std::max(worst, std::abs(path[s] - oracle));
    }
    o.require(worst <= 1e-3, "oracle deviation " + sci(worst));
    double jump = 0.0;
    for (std::size_t s = 1; s < path.size(); ++s) jump = std::max(jump, std::abs(path[s] - path[s - 1]));
    o.require(jump <= 1e-3, "jump " + sci(jump));
    o.detail << "max dev " << sci(worst) << ", max step jump " << sci(jump);
    return o;
}

// ---------------------------------------------------------------------------

inline Eigen::MatrixXcd random_hermitian_pd(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd X(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) X(i, j) = Complex(g(rng), g(rng));
    Eigen::MatrixXcd A = X * X.adjoint() / n;
    A.diagonal().array() += 0.5;
    return A;
}

inline Eigen::MatrixXcd eigen_power(const Eigen::MatrixXcd& A, Complex z) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A);
    Eigen::VectorXcd p(A.rows());
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = std::pow(Complex(es.eigenvalues()(i), 0.0), z);
    return es.eigenvectors() * p.asDiagonal() * es.eigenvectors().adjoint();
}

inline Outcome criterion8() {
    Outcome o;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> re(-1.5, -0.1), im(-1.0, 1.0);
    double oracle_err = 0.0, semigroup_err = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXcd A = random_hermitian_pd(rng, 8);
        const auto M = OperatorMatrix::dense(A);
        const Complex z(re(rng), im(rng)), w(re(rng), im(rng));
        const auto pz = dunford_power(M, z).matrix;
        oracle_err = std::max(oracle_err, (pz - eigen_power(A, z)).cwiseAbs().maxCoeff());
        const auto pw = dunford_power(M, w).matrix;
        const auto pzw = dunford_power(M, z + w).matrix;
        semigroup_err = std::max(semigroup_err, (pz * pw - pzw).cwiseAbs().maxCoeff());
    }
    Eigen::MatrixXcd two(1, 1);
    two(0, 0) = 2.0;
    const Complex s = dunford_power(OperatorMatrix::dense(two), -0.5).matrix(0, 0);
    const double scalar_err = std::abs(s - 1.0 / std::sqrt(2.0));
    o.require(oracle_err <= 1e-7, "oracle error " + sci(oracle_err));
    o.require(semigroup_err <= 1e-7, "semigroup error " + sci(semigroup_err));
    o.require(scalar_err <= 1e-8, "scalar error " + sci(scalar_err));
    o.detail << "oracle " << sci(oracle_err) << ", semigroup " << sci(semigroup_err) << ", [2]^-1/2 "
             << sci(scalar_err);
    return o;
}

inline Outcome criterion9() {
    Outcome o;
    const std::vector<LogGrid> ladders{LogGrid(-6.0, 257), LogGrid(-5.0, 193)};
    for (std::size_t l = 0; l < ladders.size(); ++l) {
        PowerProbeConfig cfg;
        cfg.gamma = -0.5;
        cfg.base_grid = ladders[l];
        const auto cs = cfg.cross_section;
        const std::string tag = "ladder " + std::to_string(l + 1);
        const AsymptoticsTerm<Rational> one{Rational(0), 0, 0, Rational(1)};
        for (double z : {0.25, 0.5, 0.9}) {
            const auto r = power_domain_probe(term_sampler(one, cs, 3), z, cfg);
            o.require(r.verdict == ProbeVerdict::member, tag + ": constant at z=" + std::to_string(z) + " is " +
                                                              to_string(r.verdict));
        }
        const AsymptoticsTerm<Rational> sing{Rational(1), 0, 1, Rational(1)};
        const auto rs = power_domain_probe(term_sampler(sing, cs, 3), 0.9, cfg);
        o.require(rs.verdict == ProbeVerdict::non_member, tag + ": x^-1 mode term is " + to_string(rs.verdict));
        const FieldSampler smooth = [cs](const LogGrid& g) {
            RadialField f = RadialField::zeros(g, cs, 3);
            for (std::size_t m = 0; m < 3; ++m)
                for (int j = 0; j < g.size(); ++j) f.values[m](j) = bump(g.x(j));
            return f;
        };
        const auto rb = power_domain_probe(smooth, 0.5, cfg);
        o.require(rb.verdict == ProbeVerdict::member, tag + ": smooth field is " + to_string(rb.verdict));
        o.detail << tag << " x^-1 ratios";
        for (double r : rs.ratios) o.detail << ' ' << std::setprecision(3) << r;
        o.detail << "; ";
    }
    return o;
}

inline Outcome criterion10() {
    Outcome o;
    const LogGrid g(-8.0, 129);
    const auto L1 = assemble_mode_operator(1, 0.0, g, OuterBC::neumann, "k=0");
    const auto L2 = assemble_mode_operator(1, 0.0, g.refined(), OuterBC::neumann, "k=0");
    const auto r1 = shift_ladder(L1, 3 * pi / 4, 1.0 / 16, 40, 200, 1e6);
    const auto r2 = shift_ladder(L2, 3 * pi / 4, 1.0 / 16, 40, 200, 1e6);
    const double ratio = r2.report.K / r1.report.K;
    o.require(std::isfinite(r1.report.K) && std::isfinite(r2.report.K), "non-finite bound");
    o.require(r1.shift == r2.shift, "shift changed under refinement");
    o.require(std::abs(ratio - 1.0) <= 0.1, "K ratio " + std::to_string(ratio));
    o.require(r1.report.lambdas.size() == 3 * 200 + 1, "sample count");  // 0, real axis, both rays
    o.detail << "c=" << r1.shift << ", K=" << std::setprecision(6) << r1.report.K << " -> " << r2.report.K
             << " (ratio " << ratio << ")";
    return o;
}

struct CriterionDef {
    int id;
    const char* name;
    double budget;
    Outcome (*run)();
};

inline const std::vector<CriterionDef>& criteria() {
    static const std::vector<CriterionDef> defs{
        {1, "pole formula reproduction", 1.0, criterion1},
        {2, "weight window", 1.0, criterion2},
        {3, "indicial annihilation", 5.0, criterion3},
        {4, "solver-oracle agreement", 60.0, criterion4},
        {5, "steady constant preservation", 10.0, criterion5},
        {6, "tip exponent", 120.0, criterion6},
        {7, "decomposition preservation", 60.0, criterion7},
        {8, "complex powers", 10.0, criterion8},
        {9, "power-domain membership", 60.0, criterion9},
        {10, "sectoriality probe", 30.0, criterion10},
    };
    return defs;
}

}  // namespace verify_detail

/// Criterion ids of a suite: poles, heat, tip, powers or all.
inline std::vector<int> suite_criteria(const std::string& suite) {
    if (suite == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    if (suite == "poles") return {1, 2, 3};
    if (suite == "heat") return {4, 5};
    if (suite == "tip") return {6, 7};
    if (suite == "powers") return {8, 9, 10};
    throw ConfigError("unknown suite '" + suite + "' (poles, heat, tip, powers, all)");
}

inline CriterionResult run_criterion(int id) {
    const auto& defs = verify_detail::criteria();
    const auto it = std::find_if(defs.begin(), defs.end(), [id](const auto& d) { return d.id == id; });
    if (it == defs.end()) throw LookupError("no acceptance criterion " + std::to_string(id));
    CriterionResult r{id, it->name, false, "", 0.0, it->budget};
    const auto t0 = std::chrono::steady_clock::now();
    try {
        auto o = it->run();
        r.passed = o.passed;
        r.detail = o.detail.str();
    } catch (const std::exception& e) {
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.seconds > r.budget) {
        r.passed = false;
        r.detail += " [over budget]";
    }
    return r;
}

inline std::vector<CriterionResult> run_suite(const std::string& suite) {
    std::vector<CriterionResult> out;
    for (int id : suite_criteria(suite)) out.push_back(run_criterion(id));
    return out;
}

/// One line per criterion: "[PASS] 6 tip exponent (0.8 s) detail".
inline void print_results(std::ostream& os, const std::vector<CriterionResult>& rs) {
    for (const auto& r : rs)
        os << (r.passed ? "[PASS] " : "[FAIL] ") << std::setw(2) << r.id << ' ' << std::left << std::setw(30)
           << r.name << std::right << " (" << std::fixed << std::setprecision(2) << r.seconds << " s / "
           << std::setprecision(0) << r.budget << " s) " << std::defaultfloat << r.detail << '\n';
}

}  // namespace conelab
