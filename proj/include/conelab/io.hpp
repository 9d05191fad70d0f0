#pragma once

// CSV / JSON hand-off formats and run manifests. Numbers are written with 17
// significant digits so identical inputs give byte-identical files.

#include "conelab/config.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>

#include <chrono>
#include <sstream>

namespace conelab {

namespace fs = std::filesystem;

inline constexpr const char* version = "1.0.0";

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

inline double parse_number(const std::string& s, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size() && s.find_first_not_of(" \r", used) != std::string::npos) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        throw DataError(where + ": cannot parse number '" + s + "'");
    }
}

inline std::ofstream open_out(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw ConfigError("cannot write '" + p.string() + "'");
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Fields: tau,mode,re,im

inline void write_field_csv(std::ostream& out, const RadialField& f) {
    out << "tau,mode,re,im\n";
    for (std::size_t m = 0; m < f.mode_count(); ++m)
        for (int j = 0; j < f.grid.size(); ++j)
            out << fmt17(f.grid.tau(j)) << ',' << m << ',' << fmt17(f.values[m](j).real()) << ','
                << fmt17(f.values[m](j).imag()) << '\n';
}

inline void write_field_csv(const fs::path& p, const RadialField& f) {
    auto out = detail::open_out(p);
    write_field_csv(out, f);
}

/// Reads a field; the grid is recovered from the tau column (uniform, ending at 0).
/// Modes absent from the file are zero.
inline RadialField read_field_csv(const fs::path& p, const CrossSection& cs, int max_modes) {
    std::ifstream in(p);
    if (!in) throw ConfigError("cannot open field file '" + p.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line.rfind("tau,mode,re,im", 0) != 0)
        throw DataError(p.string() + ": expected header tau,mode,re,im");
    std::map<std::size_t, std::vector<std::pair<double, Complex>>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto cells = detail::split_csv(line);
        const std::string where = p.string() + ":" + std::to_string(lineno);
        if (cells.size() != 4) throw DataError(where + ": expected 4 columns");
        const double mode = detail::parse_number(cells[1], where);
        if (mode < 0 || mode != std::floor(mode)) throw DataError(where + ": mode must be a non-negative integer");
        rows[static_cast<std::size_t>(mode)].emplace_back(
            detail::parse_number(cells[0], where),
            Complex(detail::parse_number(cells[2], where), detail::parse_number(cells[3], where)));
    }
    if (rows.empty()) throw DataError(p.string() + ": no data rows");
    const auto& first = rows.begin()->second;
    const int J = static_cast<int>(first.size());
    if (J < 3) throw DataError(p.string() + ": need at least 3 grid points per mode");
    const LogGrid g(first.front().first, J);
    for (int j = 0; j < J; ++j)
        if (std::abs(first[static_cast<std::size_t>(j)].first - g.tau(j)) > 1e-9 * std::max(1.0, std::abs(g.tau_min())))
            throw DataError(p.string() + ": tau column is not a uniform grid ending at 0");
    RadialField f = RadialField::zeros(g, cs, max_modes);
    for (const auto& [m, vals] : rows) {
        if (m >= f.mode_count())
            throw DataError(p.string() + ": mode " + std::to_string(m) + " exceeds the configured " +
                            std::to_string(f.mode_count()) + " modes");
        if (static_cast<int>(vals.size()) != J) throw DataError(p.string() + ": modes have different row counts");
        for (int j = 0; j < J; ++j) f.values[m](j) = vals[static_cast<std::size_t>(j)].second;
    }
    f.check_finite();
    return f;
}

// ---------------------------------------------------------------------------
// Poles: mode,label,re_rho,im_rho,max_log_power,in_strip

inline void write_poles_csv(std::ostream& out, const PoleSet& ps) {
    out << "mode,label,re_rho,im_rho,max_log_power,in_strip\n";
    for (const auto& e : ps.entries)
        out << e.mode << ',' << e.label << ',' << fmt17(e.rho.real()) << ',' << fmt17(e.rho.imag()) << ','
            << e.max_log_power << ',' << (e.in_strip ? 1 : 0) << '\n';
}

// ---------------------------------------------------------------------------
// Asymptotics basis JSON

inline Json basis_to_json(const AsymptoticsBasis& b) {
    Json terms = Json::array();
    for (const auto& t : b.terms)
        terms.push_back({{"rho", detail::complex_json(t.rho)},
                         {"exact", t.exact ? Json(to_string(*t.exact)) : Json(nullptr)},
                         {"m", t.m},
                         {"mode", t.mode},
                         {"label", t.label}});
    const auto& ps = b.provenance;
    return {{"terms", terms},
            {"strip", {ps.left, ps.right}},
            {"gamma", ps.gamma},
            {"power", ps.power},
            {"n", ps.n},
            {"mu", ps.mu},
            {"convention_pending", ps.convention_pending}};
}

inline AsymptoticsBasis basis_from_json(const Json& j) {
    AsymptoticsBasis b;
    try {
        for (const auto& t : j.at("terms")) {
            BasisTriple bt;
            bt.rho = detail::parse_complex(t.at("rho"));
            if (t.contains("exact") && !t.at("exact").is_null()) bt.exact = Rational(t.at("exact").get<std::string>());
            bt.m = t.at("m").get<int>();
            bt.mode = t.at("mode").get<std::size_t>();
            bt.label = t.value("label", std::string());
            b.terms.push_back(bt);
        }
        b.provenance.gamma = j.value("gamma", 0.0);
        b.provenance.power = j.value("power", 1);
        b.provenance.n = j.value("n", 1);
        b.provenance.mu = j.value("mu", 2);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed basis JSON: ") + e.what());
    }
    return b;
}

inline AsymptoticsBasis read_basis_json(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw ConfigError("cannot open basis file '" + p.string() + "'");
    try {
        return basis_from_json(Json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(p.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Tip fits: t,rho_re,rho_im,m,mode,c_re,c_im,residual,decay_exp

inline void write_fits_csv(std::ostream& out, const std::vector<TipFit>& fits) {
    out << "t,rho_re,rho_im,m,mode,c_re,c_im,residual,decay_exp\n";
    for (const auto& f : fits)
        for (const auto& mf : f.modes) {
            if (mf.coeffs.empty()) {
                out << fmt17(f.t) << ",nan,nan,-1," << mf.mode << ",nan,nan," << fmt17(mf.residual) << ','
                    << fmt17(mf.decay_exponent) << '\n';
                continue;
            }
            for (const auto& c : mf.coeffs)
                out << fmt17(f.t) << ',' << fmt17(c.rho.real()) << ',' << fmt17(c.rho.imag()) << ',' << c.m << ','
                    << mf.mode << ',' << fmt17(c.c.real()) << ',' << fmt17(c.c.imag()) << ',' << fmt17(mf.residual)
                    << ',' << fmt17(mf.decay_exponent) << '\n';
        }
}

// ---------------------------------------------------------------------------
// Trajectories: snapshot_NNNNN.csv plus manifest.json

inline std::string snapshot_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%05zu.csv", i);
    return buf;
}

inline Json versions_json() {
    return {{"conelab", version},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"boost", std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) + "." +
                          std::to_string(BOOST_VERSION % 100)},
            {"compiler", __VERSION__}};
}

/// manifest.json: enough to re-run the job.
inline void write_manifest(const fs::path& dir, const std::string& command, const RunConfig& cfg, Json extra,
                           double wall_seconds) {
    Json m = {{"command", command},
              {"config", cfg.source},
              {"seed", cfg.seed},
              {"threads", cfg.threads},
              {"versions", versions_json()},
              {"wall_time_s", wall_seconds}};
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    auto out = detail::open_out(dir / "manifest.json");
    out << m.dump(2) << '\n';
}

inline Json heat_scheme_json(const HeatConfig& h) {
    return {{"theta", h.theta},
            {"dt", h.step_size()},
            {"T", h.T},
            {"steps", h.step_count()},
            {"startup_steps", h.startup_steps},
            {"outer_bc", to_string(h.outer_bc)},
            {"closure", h.closure},
            {"grid", {{"tau_min", h.grid.tau_min()}, {"points", h.grid.size()}, {"h", h.grid.h()}}}};
}

/// Snapshots plus a manifest with times, scheme and the config echo.
inline void write_trajectory(const fs::path& dir, const HeatTrajectory& tr, const RunConfig& cfg,
                             double wall_seconds) {
    fs::create_directories(dir);
    Json files = Json::array();
    for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
        write_field_csv(dir / snapshot_name(i), tr.snapshots[i]);
        files.push_back(snapshot_name(i));
    }
    write_manifest(dir, "solve-heat", cfg,
                   {{"times", tr.times}, {"snapshots", files}, {"scheme", heat_scheme_json(tr.config)}}, wall_seconds);
}

/// Reads a trajectory written by `solve-heat`; the manifest's config echo
/// supplies the cross-section.
inline HeatTrajectory read_trajectory(const fs::path& dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw ConfigError("trajectory directory '" + dir.string() + "' has no manifest.json");
    Json m;
    try {
        m = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError((dir / "manifest.json").string() + ": " + e.what());
    }
    const RunConfig cfg = parse_config(m.at("config"));
    const CrossSection cs = cfg.cross_section.build();
    HeatTrajectory tr;
    tr.config = cfg.heat;
    const auto times = m.at("times").get<std::vector<double>>();
    const auto files = m.at("snapshots").get<std::vector<std::string>>();
    if (times.size() != files.size()) throw DataError("manifest: times and snapshots differ in length");
    for (std::size_t i = 0; i < files.size(); ++i) {
        tr.times.push_back(times[i]);
        tr.snapshots.push_back(read_field_csv(dir / files[i], cs, cfg.max_modes));
    }
    return tr;
}

}  // namespace conelab
