#pragma once

// Run configuration: a single JSON document with one block per module.
// Every numerical tolerance has a key; missing keys take the module defaults.

#include "conelab/power_calculus.hpp"
#include "conelab/tip_analysis.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>

namespace conelab {

using Json = nlohmann::json;

struct CrossSectionConfig {
    std::string type = "circle";  // circle | sphere | explicit
    std::optional<Rational> length_over_pi = Rational(2);
    double length = 2 * pi;
    int n = 1;
    std::vector<std::pair<double, int>> eigenvalues;
    double volume = 1.0;

    CrossSection build() const {
        if (type == "circle") return length_over_pi ? CrossSection::circle_pi(*length_over_pi) : CrossSection::circle(length);
        if (type == "sphere") return CrossSection::sphere(n);
        if (type == "explicit") return CrossSection::explicit_spectrum(eigenvalues, n, volume);
        throw ConfigError("cross_section.type must be circle, sphere or explicit (got '" + type + "')");
    }
};

struct OperatorConfig {
    std::string preset = "laplacian";  // laplacian | warped | explicit
    int mu = 2;
    std::vector<std::vector<double>> base, eig;  // explicit: a_k(x) = base[k](x) + lambda eig[k](x)
};

struct GridConfig {
    double tau_min = -8.0;
    int points = 513;
    LogGrid build() const { return LogGrid(tau_min, points); }
};

struct FitConfig {
    std::optional<double> x_a;  // default 4 x_min
    double x_b = 0.125;
    FitOptions options;
    int basis_power = 1;
};

struct PowersConfig {
    std::vector<Complex> z{Complex(-0.5, 0.0)};
    ContourSpec contour;
    double theta_probe = 3 * pi / 4;
    int samples = 200;
    double lambda_max = 1e6;
    double shift_start = 1.0 / 16;
    int shift_steps = 40;
    std::size_t mode = 0;
    std::optional<double> shift;  // fixed shift instead of the ladder
    int levels = 3;
    double extend = 2.0;
    double stabilize = 1.2;
    double blow_up = 5.0;
    int rbound_N = 4;
    int rbound_trials = 100;
};

struct RunConfig {
    CrossSectionConfig cross_section;
    int max_modes = 5;
    OperatorConfig op;
    double gamma = -0.5;
    bool exact = true;
    double tol_pole = 1e-9;
    double tol_membership = 1e-9;
    std::vector<std::string> realizations{"min", "DD", "max"};
    GridConfig grid;
    HeatConfig heat;
    std::string realization = "DD";
    FitConfig fit;
    PowersConfig powers;
    std::string output = "out";
    std::uint64_t seed = 1;
    int threads = 1;
    Json source;  // the parsed document, echoed into manifests

    FitWindow fit_window(const LogGrid& g) const { return {fit.x_a.value_or(4.0 * g.x_min()), fit.x_b}; }
};

namespace detail {

template <class T>
void read(const Json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

inline OuterBC parse_bc(const std::string& s) {
    if (s == "dirichlet") return OuterBC::dirichlet;
    if (s == "neumann") return OuterBC::neumann;
    throw ConfigError("outer_bc must be dirichlet or neumann (got '" + s + "')");
}

inline Complex parse_complex(const Json& v) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2) return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError("complex values are numbers or [re, im] pairs");
}

inline Json complex_json(Complex c) { return Json::array({c.real(), c.imag()}); }

}  // namespace detail

namespace detail {

inline RunConfig parse_config_document(const Json& j) {
    using detail::read;
    if (!j.is_object()) throw ConfigError("config root must be an object");
    RunConfig c;
    c.source = j;
    if (j.contains("cross_section")) {
        const auto& b = j.at("cross_section");
        read(b, "type", c.cross_section.type);
        if (b.contains("length_over_pi")) {
            const auto v = b.at("length_over_pi");
            if (v.is_string()) {
                try {
                    c.cross_section.length_over_pi = Rational(v.get<std::string>());
                } catch (const std::exception&) {
                    throw ConfigError("cross_section.length_over_pi: not a rational '" + v.get<std::string>() + "'");
                }
            } else {
                c.cross_section.length_over_pi = recognize_rational(v.get<double>(), 1000, 1e-13);
                c.cross_section.length = v.get<double>() * pi;
            }
        } else if (b.contains("length")) {
            read(b, "length", c.cross_section.length);
            c.cross_section.length_over_pi.reset();
        }
        read(b, "n", c.cross_section.n);
        read(b, "volume", c.cross_section.volume);
        if (b.contains("eigenvalues"))
            for (const auto& e : b.at("eigenvalues")) {
                if (!e.is_array() || e.size() != 2) throw ConfigError("eigenvalues entries are [value, multiplicity]");
                c.cross_section.eigenvalues.emplace_back(e[0].get<double>(), e[1].get<int>());
            }
    }
    read(j, "max_modes", c.max_modes);
    if (c.max_modes < 1) throw ConfigError("max_modes must be >= 1");
    if (j.contains("operator")) {
        const auto& b = j.at("operator");
        read(b, "preset", c.op.preset);
        read(b, "mu", c.op.mu);
        read(b, "base", c.op.base);
        read(b, "eig", c.op.eig);
        if (c.op.preset != "laplacian" && c.op.preset != "warped" && c.op.preset != "explicit")
            throw ConfigError("operator.preset must be laplacian, warped or explicit");
    }
    read(j, "gamma", c.gamma);
    if (j.contains("arithmetic")) {
        const auto a = j.at("arithmetic").get<std::string>();
        if (a != "exact" && a != "float") throw ConfigError("arithmetic must be exact or float");
        c.exact = a == "exact";
    }
    if (j.contains("tolerances")) {
        const auto& b = j.at("tolerances");
        read(b, "pole", c.tol_pole);
        read(b, "membership", c.tol_membership);
    }
    read(j, "realizations", c.realizations);
    if (j.contains("grid")) {
        read(j.at("grid"), "tau_min", c.grid.tau_min);
        read(j.at("grid"), "points", c.grid.points);
    }
    c.heat.grid = c.grid.build();
    if (j.contains("heat")) {
        const auto& b = j.at("heat");
        read(b, "T", c.heat.T);
        read(b, "dt", c.heat.dt);
        if (b.contains("outer_bc")) c.heat.outer_bc = detail::parse_bc(b.at("outer_bc").get<std::string>());
        read(b, "theta", c.heat.theta);
        read(b, "startup_steps", c.heat.startup_steps);
        read(b, "output_times", c.heat.output_times);
        read(b, "output_stride", c.heat.output_stride);
        read(b, "realization", c.realization);
        c.heat.closure = c.realization;
        c.heat.validate();
    }
    if (j.contains("fit")) {
        const auto& b = j.at("fit");
        if (b.contains("x_a")) c.fit.x_a = b.at("x_a").get<double>();
        read(b, "x_b", c.fit.x_b);
        read(b, "max_points", c.fit.options.max_points);
        read(b, "guard_terms", c.fit.options.guard_terms);
        read(b, "max_condition", c.fit.options.max_condition);
        read(b, "relative_weighting", c.fit.options.relative_weighting);
        read(b, "basis_power", c.fit.basis_power);
    }
    if (j.contains("powers")) {
        const auto& b = j.at("powers");
        auto& p = c.powers;
        if (b.contains("z")) {
            p.z.clear();
            for (const auto& v : b.at("z")) p.z.push_back(detail::parse_complex(v));
        }
        read(b, "theta", p.contour.theta);
        read(b, "n_quad", p.contour.n_quad);
        read(b, "panel_width", p.contour.panel_width);
        read(b, "rho", p.contour.rho);
        read(b, "r_max", p.contour.r_max);
        read(b, "tail_tol", p.contour.tail_tol);
        read(b, "theta_probe", p.theta_probe);
        read(b, "samples", p.samples);
        read(b, "lambda_max", p.lambda_max);
        read(b, "shift_start", p.shift_start);
        read(b, "shift_steps", p.shift_steps);
        read(b, "mode", p.mode);
        if (b.contains("shift")) p.shift = b.at("shift").get<double>();
        read(b, "levels", p.levels);
        read(b, "extend", p.extend);
        read(b, "stabilize", p.stabilize);
        read(b, "blow_up", p.blow_up);
        read(b, "rbound_N", p.rbound_N);
        read(b, "rbound_trials", p.rbound_trials);
    }
    read(j, "output", c.output);
    read(j, "seed", c.seed);
    read(j, "threads", c.threads);

    const CrossSection cs = c.cross_section.build();
    if (j.contains("heat") && c.realization == "DD") {
        const WeightWindow w = weight_window(cs);
        if (!w.contains(c.gamma))
            throw ConfigError("gamma = " + fmt17(c.gamma) + " lies outside the weight window (" + fmt17(w.lo) + ", " +
                              fmt17(w.hi) + ") required by the DD realization");
    }
    return c;
}

}  // namespace detail

/// Parses and validates a config document.
inline RunConfig parse_config(const Json& j) {
    try {
        return detail::parse_config_document(j);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    Json j;
    try {
        j = Json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config file '" + path.string() + "' does not parse: " + e.what());
    }
    return parse_config(j);
}

/// Operator spec in the requested arithmetic.
template <class T>
ConeOperatorSpec<T> build_operator(const RunConfig& c) {
    const CrossSection cs = c.cross_section.build();
    auto modes = make_modes(cs, c.max_modes);
    const int n = cs.dimension();
    if (c.op.preset == "laplacian") return laplacian_spec<T>(std::move(modes), n);
    if (c.op.preset == "warped") return warped_laplacian_spec<T>(std::move(modes), n);
    auto convert = [](const std::vector<std::vector<double>>& v) {
        std::vector<std::vector<T>> out;
        for (const auto& row : v) {
            std::vector<T> r;
            for (double x : row) {
                if constexpr (field_traits<T>::exact) r.push_back(rational_from_double(x));
                else r.emplace_back(x, 0.0);
            }
            out.push_back(std::move(r));
        }
        return out;
    };
    return explicit_spec<T>(std::move(modes), n, c.op.mu, convert(c.op.base), convert(c.op.eig));
}

}  // namespace conelab
