#pragma once

// Near-tip expansion fits of radial fields against a predicted asymptotics
// basis, and their tracking along a heat trajectory.

#include "conelab/heat_solver.hpp"

namespace conelab {

struct FitWindow {
    double x_a = 0.0;
    double x_b = 0.125;

    static FitWindow default_for(const LogGrid& g) { return {4.0 * g.x_min(), 0.125}; }
};

struct FitOptions {
    int max_points = 200;
    int guard_terms = 2;       // extra x^{-(rho_min - mu j)} columns, not part of the reported fit
    int mu = 2;
    double max_condition = 1e10;
    bool relative_weighting = true;
};

struct TipCoefficient {
    Complex rho;
    std::optional<Rational> exact;
    int m = 0;
    std::size_t mode = 0;
    std::string label;
    Complex c;
};

struct ModeFit {
    std::size_t mode = 0;
    std::string label;
    std::vector<TipCoefficient> coeffs;
    double residual = 0.0;        // RMS of data minus basis part over the window points
    double decay_exponent = std::numeric_limits<double>::quiet_NaN();
    double condition = 1.0;
    int points = 0;
};

struct TipFit {
    double t = 0.0;
    double x_a = 0.0, x_b = 0.0;
    std::vector<ModeFit> modes;

    const ModeFit& mode(std::size_t m) const {
        for (const auto& f : modes)
            if (f.mode == m) return f;
        throw LookupError("tip fit has no mode " + std::to_string(m));
    }

    /// Fitted coefficient of (rho, m) on a mode; zero when the term is not in the basis.
    Complex coefficient(Complex rho, int m, std::size_t mode_index, double tol = 1e-9) const {
        for (const auto& c : mode(mode_index).coeffs)
            if (c.m == m && std::abs(c.rho - rho) <= tol * std::max(1.0, std::abs(rho))) return c.c;
        return 0.0;
    }
};

namespace detail {

inline Complex basis_value(Complex rho, int m, double x) {
    const double L = std::log(x);
    return std::exp(-rho * L) * std::pow(L, m);
}

// Slope of log|r| against log x (least squares), NaN with fewer than 3 usable points.
inline double log_log_slope(const std::vector<double>& x, const std::vector<Complex>& r) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    double peak = 0.0;
    for (const auto& v : r) peak = std::max(peak, std::abs(v));
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = std::abs(r[i]);
        if (!(a > 1e-300) || a < 1e-15 * peak) continue;
        const double lx = std::log(x[i]), ly = std::log(a);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++count;
    }
    if (count < 3) return std::numeric_limits<double>::quiet_NaN();
    const double den = count * sxx - sx * sx;
    if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (count * sxy - sx * sy) / den;
}

inline std::vector<int> window_indices(const LogGrid& g, const FitWindow& w, int max_points) {
    std::vector<int> all;
    for (int j = 0; j < g.size(); ++j)
        if (g.x(j) >= w.x_a * (1 - 1e-12) && g.x(j) <= w.x_b * (1 + 1e-12)) all.push_back(j);
    if (static_cast<int>(all.size()) <= max_points) return all;
    // grid is uniform in log x, so evenly spaced indices are log-spaced points
    std::vector<int> pick;
    for (int i = 0; i < max_points; ++i) {
        const auto k = static_cast<std::size_t>(std::lround(double(i) * (all.size() - 1) / (max_points - 1)));
        if (pick.empty() || pick.back() != all[k]) pick.push_back(all[k]);
    }
    return pick;
}

}  // namespace detail

/// Per-mode least-squares fit of sum c x^{-rho} log^m x over the window. Guard
/// columns x^{-(rho_min - mu j)} absorb the next regular terms during the solve
/// and are not part of the reported fit. Rows are weighted by x^{-a}, where x^a
/// is a power-law envelope of the data, so the whole window counts in relative
/// terms. The residual is data minus the basis part; its decay exponent is the
/// log-log slope over the inner (log) half of the window.
inline TipFit fit_tip_expansion(const RadialField& snap, const AsymptoticsBasis& basis, const FitWindow& window,
                                const FitOptions& opt = {}, double t = 0.0) {
    snap.check_finite();
    const auto& g = snap.grid;
    if (!(window.x_a > g.x_min() && window.x_a < window.x_b && window.x_b <= 0.25))
        throw PreconditionError("fit window [" + fmt17(window.x_a) + ", " + fmt17(window.x_b) +
                                "] must lie inside the grid (x_min = " + fmt17(g.x_min()) + ")");
    for (const auto& b : basis.terms)
        if (b.mode >= snap.mode_count())
            throw PreconditionError("basis term for mode " + b.label + " is not carried by the snapshot");
    const auto idx = detail::window_indices(g, window, opt.max_points);
    std::vector<double> xs;
    for (int j : idx) xs.push_back(g.x(j));
    const double x_split = std::sqrt(window.x_a * window.x_b);

    TipFit fit;
    fit.t = t;
    fit.x_a = window.x_a;
    fit.x_b = window.x_b;
    fit.modes.resize(snap.mode_count());

    parallel_for(snap.mode_count(), [&](std::size_t m) {
        ModeFit& mf = fit.modes[m];
        mf.mode = m;
        mf.label = snap.modes[m].label;
        mf.points = static_cast<int>(idx.size());
        std::vector<BasisTriple> terms = basis.for_mode(m);
        const int P = static_cast<int>(idx.size());
        std::vector<Complex> data(static_cast<std::size_t>(P));
        for (int i = 0; i < P; ++i) data[static_cast<std::size_t>(i)] = snap.values[m](idx[static_cast<std::size_t>(i)]);

        std::vector<Complex> resid = data;
        if (!terms.empty()) {
            std::vector<std::pair<Complex, int>> cols;
            for (const auto& b : terms) cols.emplace_back(b.rho, b.m);
            double rho_min = terms.front().rho.real();
            for (const auto& b : terms) rho_min = std::min(rho_min, b.rho.real());
            for (int j = 1; j <= opt.guard_terms; ++j) cols.emplace_back(Complex(rho_min - opt.mu * j, 0.0), 0);
            const int K = static_cast<int>(cols.size());
            if (P < K + 2) throw PreconditionError("fit window holds too few grid points for the basis");

            double a_env = 0.0;
            if (opt.relative_weighting) {
                const double s = detail::log_log_slope(xs, data);
                if (std::isfinite(s)) a_env = s;
            }
            Eigen::MatrixXcd A(P, K);
            Eigen::VectorXcd b(P);
            for (int i = 0; i < P; ++i) {
                const double w = std::pow(xs[static_cast<std::size_t>(i)], -a_env);
                for (int k = 0; k < K; ++k)
                    A(i, k) = w * detail::basis_value(cols[static_cast<std::size_t>(k)].first,
                                                      cols[static_cast<std::size_t>(k)].second,
                                                      xs[static_cast<std::size_t>(i)]);
                b(i) = w * data[static_cast<std::size_t>(i)];
            }
            Eigen::VectorXd colscale(K);
            for (int k = 0; k < K; ++k) {
                colscale(k) = A.col(k).norm();
                if (colscale(k) == 0.0) colscale(k) = 1.0;
                A.col(k) /= colscale(k);
            }
            const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
            const auto& sv = svd.singularValues();
            mf.condition = sv(0) / std::max(sv(sv.size() - 1), 1e-300);
            if (mf.condition > opt.max_condition)
                throw NumericalError("ill-conditioned tip fit on mode " + mf.label + " (condition " +
                                     fmt17(mf.condition) + "); choose a wider or shifted window");
            const Eigen::VectorXcd c = A.colPivHouseholderQr().solve(b);
            for (std::size_t k = 0; k < terms.size(); ++k) {
                const Complex ck = c(static_cast<Eigen::Index>(k)) / colscale(static_cast<Eigen::Index>(k));
                mf.coeffs.push_back(TipCoefficient{terms[k].rho, terms[k].exact, terms[k].m, m, terms[k].label, ck});
                for (int i = 0; i < P; ++i)
                    resid[static_cast<std::size_t>(i)] -=
                        ck * detail::basis_value(terms[k].rho, terms[k].m, xs[static_cast<std::size_t>(i)]);
            }
        }
        double ss = 0.0;
        for (const auto& r : resid) ss += std::norm(r);
        mf.residual = P > 0 ? std::sqrt(ss / P) : 0.0;
        std::vector<double> xin;
        std::vector<Complex> rin;
        for (int i = 0; i < P; ++i)
            if (xs[static_cast<std::size_t>(i)] <= x_split) {
                xin.push_back(xs[static_cast<std::size_t>(i)]);
                rin.push_back(resid[static_cast<std::size_t>(i)]);
            }
        mf.decay_exponent = detail::log_log_slope(xin, rin);
    });
    return fit;
}

struct DecompositionTrack {
    std::vector<TipFit> fits;
    double max_jump = 0.0;           // over all coefficients and consecutive fits
    std::vector<std::string> warnings;

    /// Time series of one coefficient.
    std::vector<Complex> path(Complex rho, int m, std::size_t mode) const {
        std::vector<Complex> p;
        for (const auto& f : fits) p.push_back(f.coefficient(rho, m, mode));
        return p;
    }
};

/// Fits every snapshot and reports continuity diagnostics: a jump above
/// 10 (dt ||f|| + dt * fitted scale) between consecutive fits raises a warning.
inline DecompositionTrack decomposition_track(const HeatTrajectory& traj, const AsymptoticsBasis& basis,
                                              const FitWindow& window, const FitOptions& opt = {},
                                              double forcing_norm = 0.0) {
    DecompositionTrack tr;
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s)
        tr.fits.push_back(fit_tip_expansion(traj.snapshots[s], basis, window, opt, traj.times[s]));
    for (std::size_t s = 1; s < tr.fits.size(); ++s) {
        const double dt = traj.times[s] - traj.times[s - 1];
        double jump = 0.0, scale = 0.0;
        for (std::size_t m = 0; m < tr.fits[s].modes.size(); ++m) {
            const auto& a = tr.fits[s - 1].modes[m].coeffs;
            const auto& b = tr.fits[s].modes[m].coeffs;
            for (std::size_t k = 0; k < b.size(); ++k) {
                jump = std::max(jump, std::abs(b[k].c - a[k].c));
                scale = std::max(scale, std::abs(b[k].c));
            }
        }
        tr.max_jump = std::max(tr.max_jump, jump);
        const double threshold = 10.0 * (dt * forcing_norm + dt * scale);
        if (jump > threshold)
            tr.warnings.push_back("coefficient jump " + fmt17(jump) + " between t=" + fmt17(traj.times[s - 1]) +
                                  " and t=" + fmt17(traj.times[s]) + " exceeds " + fmt17(threshold));
    }
    return tr;
}

}  // namespace conelab
