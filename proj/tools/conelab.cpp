// conelab: command-line front end.
// Exit codes: 0 success, 1 verification failure, 2 config/data error, 3 numerical failure.

#include "conelab/conelab.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>

using namespace conelab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// --out beats CONELAB_OUT beats the config's "output".
fs::path output_dir(const RunConfig& cfg, const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("CONELAB_OUT"); env && *env) return env;
    return cfg.output;
}

Realization parse_realization(const std::string& s) {
    if (s == "min") return Realization::minimal();
    if (s == "DD") return Realization::constants_extended();
    if (s == "max") return Realization::maximal();
    int k = 0;
    if (std::sscanf(s.c_str(), "power(%d)", &k) == 1) return Realization::power_of_max(k);
    if (std::sscanf(s.c_str(), "DD^%d", &k) == 1) return Realization::power_of_dd(k);
    throw ConfigError("unknown realization '" + s + "' (min, DD, max, power(k), DD^k)");
}

std::string verdict_name(Membership::Verdict v) {
    switch (v) {
        case Membership::Verdict::member: return "member";
        case Membership::Verdict::non_member: return "non-member";
        case Membership::Verdict::boundary: return "boundary";
    }
    return "?";
}

template <class T>
PoleSet poles_for(const RunConfig& cfg, int power) {
    const auto spec = build_operator<T>(cfg);
    PoleOptions opt;
    opt.tol_pole = cfg.tol_pole;
    return pole_set_power(spec, cfg.gamma, power, spec.all_modes(), opt);
}

PoleSet poles_for(const RunConfig& cfg, int power) {
    return cfg.exact ? poles_for<Rational>(cfg, power) : poles_for<Complex>(cfg, power);
}

template <class T>
Json membership_table(const RunConfig& cfg, const AsymptoticsBasis& b) {
    const auto spec = build_operator<T>(cfg);
    Json table = Json::array();
    for (const auto& t : b.terms) {
        Json row = {{"rho", detail::complex_json(t.rho)}, {"m", t.m}, {"mode", t.mode}, {"label", t.label}};
        for (const auto& name : cfg.realizations) {
            const auto r = domain_membership(make_term<T>(t, field_traits<T>::from_int(1)), parse_realization(name),
                                             cfg.gamma, spec, cfg.tol_membership);
            row[name] = {{"verdict", verdict_name(r.verdict)}, {"explanation", r.explanation}};
        }
        table.push_back(row);
    }
    return table;
}

void write_json(const fs::path& p, const Json& j) {
    auto out = detail::open_out(p);
    out << j.dump(2) << '\n';
}

RadialField builtin_or_file(const std::string& u0, const RunConfig& cfg) {
    const CrossSection cs = cfg.cross_section.build();
    const LogGrid g = cfg.grid.build();
    if (u0 == "one" || u0 == "bump") {
        RadialField f = RadialField::zeros(g, cs, cfg.max_modes);
        for (std::size_t m = 0; m < f.mode_count(); ++m)
            for (int j = 0; j < g.size(); ++j) {
                const double x = g.x(j);
                if (u0 == "one") {
                    if (m == 0) f.values[m](j) = 1.0;
                } else if (x > 0.4 && x < 0.8) {
                    const double s = (x - 0.6) / 0.2;
                    f.values[m](j) = std::exp(1.0 - 1.0 / (1.0 - s * s));
                }
            }
        return f;
    }
    return read_field_csv(u0, cs, cfg.max_modes);
}

TridiagonalOperator mode_operator(const RunConfig& cfg, const OuterBC bc) {
    const CrossSection cs = cfg.cross_section.build();
    const auto modes = make_modes(cs, cfg.max_modes);
    if (cfg.powers.mode >= modes.size())
        throw ConfigError("powers.mode " + std::to_string(cfg.powers.mode) + " exceeds max_modes");
    const auto& m = modes[cfg.powers.mode];
    return assemble_mode_operator(cs.dimension(), m.eigenvalue, cfg.grid.build(), bc, m.label);
}

Json sectorial_json(const SectorialReport& r) {
    Json lam = Json::array(), val = Json::array();
    for (std::size_t i = 0; i < r.lambdas.size(); ++i) {
        lam.push_back(detail::complex_json(r.lambdas[i]));
        val.push_back(r.values[i]);
    }
    return {{"K", r.K}, {"theta", r.theta}, {"argmax", detail::complex_json(r.argmax)}, {"normal", r.normal},
            {"lambdas", lam}, {"values", val}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conelab: operators, heat flow and complex powers on model cones"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (overrides the config)")->check(CLI::NonNegativeNumber);

    std::string config_path, out_flag;
    auto add_config = [&](CLI::App* sub, bool required = true) {
        auto* o = sub->add_option("--config", config_path, "run configuration (JSON)");
        if (required) o->required();
    };

    auto* poles = app.add_subcommand("poles", "pole set of the conormal symbol family (CSV)");
    int power = 1;
    add_config(poles);
    poles->add_option("--power", power, "pole set of the k-th power")->check(CLI::PositiveNumber);
    poles->add_option("--out", out_flag, "output directory");

    auto* asym = app.add_subcommand("asymptotics", "asymptotics basis and membership table (JSON)");
    add_config(asym);
    asym->add_option("--power", power, "basis of the k-th power")->check(CLI::PositiveNumber);
    asym->add_option("--out", out_flag, "output directory");

    auto* norm = app.add_subcommand("norm", "weighted Mellin-Sobolev norm of a field");
    std::string field_path;
    std::vector<int> orders{0};
    add_config(norm);
    norm->add_option("--field", field_path, "field CSV (tau,mode,re,im)")->required();
    norm->add_option("--s", orders, "smoothness orders")->check(CLI::NonNegativeNumber);
    norm->add_option("--out", out_flag, "output directory");

    auto* heat = app.add_subcommand("solve-heat", "theta-scheme heat flow; snapshots plus manifest");
    std::string u0_arg;
    add_config(heat);
    heat->add_option("--u0", u0_arg, "initial field CSV, or the builtin 'one' / 'bump'")->required();
    heat->add_option("--out", out_flag, "trajectory directory");

    auto* fit = app.add_subcommand("fit-tip", "fit the tip expansion of every snapshot (CSV)");
    std::string traj_dir, basis_path, fits_path;
    fit->add_option("--traj", traj_dir, "trajectory directory")->required();
    fit->add_option("--basis", basis_path, "basis JSON written by 'asymptotics'")->required();
    fit->add_option("--out", fits_path, "fits CSV")->required();

    auto* pw = app.add_subcommand("powers", "complex powers of the shifted mode operator (JSON)");
    add_config(pw);
    pw->add_option("--out", out_flag, "output directory");

    auto* sect = app.add_subcommand("sectorial-probe", "resolvent bound along the sector rays (JSON)");
    add_config(sect);
    sect->add_option("--out", out_flag, "output directory");

    auto* ver = app.add_subcommand("verify", "run acceptance criteria and print a pass/fail table");
    std::string suite = "all";
    add_config(ver, false);
    ver->add_option("--suite", suite, "poles, heat, tip, powers or all");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const auto t0 = Clock::now();
    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        set_thread_count(threads > 0 ? threads : cfg.threads);

        if (*poles) {
            const PoleSet ps = poles_for(cfg, power);
            const fs::path dir = output_dir(cfg, out_flag);
            const std::string name = power == 1 ? "poles.csv" : "poles_power" + std::to_string(power) + ".csv";
            {
                auto out = detail::open_out(dir / name);
                write_poles_csv(out, ps);
            }
            write_poles_csv(std::cout, ps);
            write_manifest(dir, "poles", cfg, {{"power", power}, {"outputs", {name}}}, seconds_since(t0));
        } else if (*asym) {
            const AsymptoticsBasis b = enumerate_asymptotics(poles_for(cfg, power));
            Json j = basis_to_json(b);
            j["membership"] = cfg.exact ? membership_table<Rational>(cfg, b) : membership_table<Complex>(cfg, b);
            j["realizations"] = cfg.realizations;
            const fs::path dir = output_dir(cfg, out_flag);
            write_json(dir / "asymptotics.json", j);
            write_json(dir / "basis.json", basis_to_json(b));
            write_manifest(dir, "asymptotics", cfg, {{"power", power}, {"outputs", {"asymptotics.json", "basis.json"}}},
                           seconds_since(t0));
            std::cout << "asymptotics: " << b.terms.size() << " basis terms -> " << (dir / "asymptotics.json").string()
                      << '\n';
        } else if (*norm) {
            const RadialField u = read_field_csv(field_path, cfg.cross_section.build(), cfg.max_modes);
            Json norms = Json::object();
            for (int s : orders) {
                const double v = mellin_norm(u, s, cfg.gamma);
                norms[std::to_string(s)] = v;
                std::cout << "H^{" << s << "," << fmt17(cfg.gamma) << "} norm: " << fmt17(v) << '\n';
            }
            const fs::path dir = output_dir(cfg, out_flag);
            write_json(dir / "norm.json", {{"field", field_path}, {"gamma", cfg.gamma}, {"norms", norms}});
            write_manifest(dir, "norm", cfg, {{"field", field_path}, {"outputs", {"norm.json"}}}, seconds_since(t0));
        } else if (*heat) {
            if (!cfg.source.contains("heat")) throw ConfigError("solve-heat needs a 'heat' block in the config");
            const RadialField u0 = builtin_or_file(u0_arg, cfg);
            const HeatTrajectory tr = solve_heat(u0, {}, cfg.heat);
            const fs::path dir = output_dir(cfg, out_flag);
            write_trajectory(dir, tr, cfg, seconds_since(t0));
            std::cout << "solve-heat: " << tr.snapshots.size() << " snapshots -> " << dir.string() << '\n';
        } else if (*fit) {
            const HeatTrajectory tr = read_trajectory(traj_dir);
            std::ifstream in(fs::path(traj_dir) / "manifest.json");
            cfg = parse_config(Json::parse(in).at("config"));
            const AsymptoticsBasis b = read_basis_json(basis_path);
            const auto track = decomposition_track(tr, b, cfg.fit_window(tr.config.grid), cfg.fit.options);
            {
                auto out = detail::open_out(fits_path);
                write_fits_csv(out, track.fits);
            }
            for (const auto& w : track.warnings) std::cerr << "warning: " << w << '\n';
            const fs::path dir = fs::path(fits_path).parent_path().empty() ? fs::path(".") : fs::path(fits_path).parent_path();
            const bool shared = fs::exists(dir / "manifest.json") && fs::equivalent(dir, traj_dir);
            const Json extra = {{"trajectory", traj_dir},
                                {"basis", basis_path},
                                {"outputs", {fs::path(fits_path).filename().string()}},
                                {"max_jump", track.max_jump},
                                {"warnings", track.warnings}};
            if (shared) write_json(dir / "fit_manifest.json", extra);
            else write_manifest(dir, "fit-tip", cfg, extra, seconds_since(t0));
            std::cout << "fit-tip: " << track.fits.size() << " fits -> " << fits_path << '\n';
        } else if (*pw) {
            const auto& p = cfg.powers;
            const TridiagonalOperator L = mode_operator(cfg, cfg.heat.outer_bc);
            double c = 0.0;
            Json ladder = Json::object();
            if (p.shift) {
                c = *p.shift;
            } else {
                const auto lr = shift_ladder(L, p.theta_probe, p.shift_start, p.shift_steps, p.samples, p.lambda_max);
                c = lr.shift;
                ladder = {{"tried", lr.tried}, {"K", lr.report.K}};
            }
            const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(L.size());
            Json results = Json::array();
            for (const Complex z : p.z) {
                DunfordQuadrature q;
                const Eigen::VectorXcd v = dunford_apply(L, c, z, ones, p.contour, &q);
                Json nodes = Json::array();
                for (const auto& nd : q.nodes) nodes.push_back(detail::complex_json(nd));
                results.push_back({{"z", detail::complex_json(z)},
                                   {"experimental", z.real() == 0.0 && z.imag() != 0.0},
                                   {"applied_to", "ones"},
                                   {"result_norm", v.norm()},
                                   {"result_at_tip", detail::complex_json(v(0))},
                                   {"quadrature",
                                    {{"rho", q.rho}, {"theta", q.theta}, {"r_max", q.r_max},
                                     {"tail_bound", q.tail_bound}, {"n_quad", q.n_quad}, {"panels", q.panels},
                                     {"nodes", nodes}}}});
            }
            const fs::path dir = output_dir(cfg, out_flag);
            write_json(dir / "powers.json", {{"mode", p.mode}, {"shift", c}, {"ladder", ladder}, {"powers", results}});
            write_manifest(dir, "powers", cfg, {{"outputs", {"powers.json"}}}, seconds_since(t0));
            std::cout << "powers: " << results.size() << " powers at shift " << c << " -> "
                      << (dir / "powers.json").string() << '\n';
        } else if (*sect) {
            const auto& p = cfg.powers;
            const TridiagonalOperator L = mode_operator(cfg, cfg.heat.outer_bc);
            ShiftLadderResult lr;
            if (p.shift) {
                lr.shift = *p.shift;
                lr.tried = {*p.shift};
                lr.report = sectorial_probe(shifted_mode_matrix(L, *p.shift), p.theta_probe, p.samples, p.lambda_max);
            } else {
                lr = shift_ladder(L, p.theta_probe, p.shift_start, p.shift_steps, p.samples, p.lambda_max);
            }
            const RBoundReport rb = r_bound_estimate(shifted_mode_matrix(L, lr.shift), p.theta_probe, p.rbound_N,
                                                     p.rbound_trials, cfg.seed);
            const fs::path dir = output_dir(cfg, out_flag);
            write_json(dir / "sectorial.json",
                       {{"mode", p.mode},
                        {"shift", lr.shift},
                        {"tried", lr.tried},
                        {"report", sectorial_json(lr.report)},
                        {"r_bound",
                         {{"estimate", rb.estimate}, {"lower_bound", rb.lower_bound}, {"disclaimer", rb.disclaimer},
                          {"N", rb.N}, {"trials", rb.trials}, {"seed", rb.seed}}}});
            write_manifest(dir, "sectorial-probe", cfg, {{"outputs", {"sectorial.json"}}}, seconds_since(t0));
            std::cout << "sectorial-probe: shift " << lr.shift << ", K = " << fmt17(lr.report.K) << '\n';
        } else if (*ver) {
            const auto results = run_suite(suite);
            print_results(std::cout, results);
            const auto failed =
                std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.passed; });
            std::cout << results.size() - failed << '/' << results.size() << " criteria passed\n";
            return failed == 0 ? 0 : 1;
        }
        return 0;
    } catch (const NumericalError& e) {
        std::cerr << "conelab: numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "conelab: " << e.what() << '\n';
        return 2;
    }
}
