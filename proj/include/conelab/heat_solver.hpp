#pragma once

// Per-mode radial heat evolution u' - Delta u = f on the straight model cone
// (0,1] x cross-section, discretized in tau = log x.

#include "conelab/bessel.hpp"
#include "conelab/mellin_sobolev.hpp"

#include <functional>

namespace conelab {

/// Tridiagonal complex operator; lower(i) couples row i to i-1, upper(i) to i+1.
struct TridiagonalOperator {
    Eigen::VectorXcd lower, diag, upper;

    // provenance
    std::string mode_label;
    double eigenvalue = 0.0;
    int n = 1;
    OuterBC outer_bc = OuterBC::dirichlet;
    double shift = 0.0;
    LogGrid grid;

    int size() const { return static_cast<int>(diag.size()); }

    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const {
        const int N = size();
        if (v.size() != N) throw PreconditionError("operator/vector size mismatch");
        Eigen::VectorXcd out(N);
        for (int i = 0; i < N; ++i) {
            Complex acc = diag(i) * v(i);
            if (i > 0) acc += lower(i) * v(i - 1);
            if (i + 1 < N) acc += upper(i) * v(i + 1);
            out(i) = acc;
        }
        return out;
    }

    Eigen::MatrixXcd dense() const {
        const int N = size();
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(N, N);
        for (int i = 0; i < N; ++i) {
            m(i, i) = diag(i);
            if (i > 0) m(i, i - 1) = lower(i);
            if (i + 1 < N) m(i, i + 1) = upper(i);
        }
        return m;
    }

    /// alpha I + beta * this
    TridiagonalOperator affine(Complex alpha, Complex beta) const {
        TridiagonalOperator r = *this;
        r.lower *= beta;
        r.upper *= beta;
        r.diag = (beta * diag).array() + alpha;
        return r;
    }

    /// Solves (this) x = rhs by Thomas elimination.
    Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const {
        const int N = size();
        Eigen::VectorXcd c(N), d(N);
        Complex b = diag(0);
        auto check = [&](Complex piv, int row) {
            const double row_scale = std::abs(diag(row)) + std::abs(lower(row)) + std::abs(upper(row));
            if (!(std::abs(piv) > 1e-13 * row_scale) || !std::isfinite(std::abs(piv)))
                throw NumericalError("singular tridiagonal solve at row " + std::to_string(row) + " (mode " +
                                     mode_label + ")");
        };
        check(b, 0);
        c(0) = N > 1 ? upper(0) / b : 0.0;
        d(0) = rhs(0) / b;
        for (int i = 1; i < N; ++i) {
            b = diag(i) - lower(i) * c(i - 1);
            check(b, i);
            c(i) = i + 1 < N ? upper(i) / b : 0.0;
            d(i) = (rhs(i) - lower(i) * d(i - 1)) / b;
        }
        for (int i = N - 2; i >= 0; --i) d(i) -= c(i) * d(i + 1);
        return d;
    }
};

/// Number of unknowns carried by the operator for a grid (Dirichlet pins x = 1).
inline int unknown_count(const LogGrid& g, OuterBC bc) { return bc == OuterBC::dirichlet ? g.size() - 1 : g.size(); }

/// Radial Laplacian e^{-2 tau}(D_tt + (n-1) D_t + lambda) on one mode. The
/// three-point stencil is exponentially fitted to the indicial roots
/// s_pm = -(n-1)/2 +- nu, so that discrete x^{s_pm} are annihilated exactly;
/// it reduces to (1,-2,1)/h^2 for n = 1, lambda = 0. The inner row uses the
/// ghost value u_{-1} = e^{-s_+ h} u_0 of the regular root (a Neumann-in-tau
/// closure on the zero mode). Dirichlet pins u = 0 at x = 1; Neumann uses the
/// ghost u_J = u_{J-2}.
inline TridiagonalOperator assemble_mode_operator(int n, double eigenvalue, const LogGrid& grid, OuterBC bc,
                                                  const std::string& label = "") {
    if (eigenvalue > 0.0) throw PreconditionError("mode eigenvalue must be <= 0");
    const double h = grid.h();
    const double nu = bessel_order(n, eigenvalue);
    const double c = 0.5 * (n - 1);
    const double s_plus = -c + nu, s_minus = -c - nu;
    const double z1 = std::exp(s_plus * h), z2 = std::exp(s_minus * h);
    const double C = std::exp(c * h) / (h * h);  // e^{-h (s_+ + s_-)/2} / h^2
    const int N = unknown_count(grid, bc);
    TridiagonalOperator op;
    op.lower = Eigen::VectorXcd::Zero(N);
    op.diag = Eigen::VectorXcd::Zero(N);
    op.upper = Eigen::VectorXcd::Zero(N);
    op.mode_label = label;
    op.eigenvalue = eigenvalue;
    op.n = n;
    op.outer_bc = bc;
    op.grid = grid;
    for (int j = 0; j < N; ++j) {
        const double w = C * std::exp(-2.0 * grid.tau(j));
        const double lo = w * (z1 * z2), di = -w * (z1 + z2), up = w;
        op.diag(j) = di;
        if (j == 0) op.diag(j) += lo * std::exp(-s_plus * h);
        else op.lower(j) = lo;
        if (j + 1 < N) op.upper(j) = up;
        else if (bc == OuterBC::neumann) op.lower(j) += up;
        // Dirichlet: the neighbour at x = 1 is zero and drops out.
    }
    return op;
}

/// Evaluates the discrete operator on every mode of a field (pinned nodes give 0).
inline RadialField apply_cone_laplacian(const RadialField& u, OuterBC bc) {
    RadialField out = RadialField::zeros(u.grid, u.modes, u.n, u.volume);
    parallel_for(u.mode_count(), [&](std::size_t m) {
        const auto op = assemble_mode_operator(u.n, u.modes[m].eigenvalue, u.grid, bc, u.modes[m].label);
        const Eigen::VectorXcd r = op.apply(u.values[m].head(op.size()));
        out.values[m].head(op.size()) = r;
    });
    return out;
}

// ---------------------------------------------------------------------------

/// Per-mode forcing on the full grid; an empty function means f = 0.
using ForcingProvider = std::function<Eigen::VectorXcd(std::size_t mode, double t)>;

struct HeatConfig {
    LogGrid grid;
    double T = 0.1;
    double dt = 1e-4;
    OuterBC outer_bc = OuterBC::dirichlet;
    std::string closure = "DD";  // inner closure: regular indicial root, constants admitted
    double theta = 0.5;
    int startup_steps = 0;       // implicit Euler half-steps replacing the first steps
    std::vector<double> output_times;  // empty: every `output_stride` steps
    int output_stride = 100;

    void validate() const {
        if (!(T > 0.0)) throw ConfigError("heat: T must be > 0");
        if (!(dt > 0.0) || dt > 1.0) throw ConfigError("heat: dt must lie in (0, 1]");
        if (theta < 0.5 || theta > 1.0) throw ConfigError("heat: theta must lie in [1/2, 1]");
        if (closure != "DD") throw ConfigError("heat: only the DD inner closure is implemented");
        if (output_stride < 1) throw ConfigError("heat: output_stride must be >= 1");
        if (startup_steps < 0) throw ConfigError("heat: startup_steps must be >= 0");
        for (double t : output_times)
            if (t < 0.0 || t > T * (1 + 1e-12)) throw ConfigError("heat: output time outside [0, T]");
    }

    int step_count() const { return std::max(1, static_cast<int>(std::lround(T / dt))); }
    double step_size() const { return T / step_count(); }
};

struct HeatTrajectory {
    std::vector<double> times;
    std::vector<RadialField> snapshots;
    HeatConfig config;
};

namespace detail {

struct ModeStepper {
    TridiagonalOperator L;
    int N = 0;

    Eigen::VectorXcd step(const Eigen::VectorXcd& u, double dt, double theta, const Eigen::VectorXcd* f_old,
                          const Eigen::VectorXcd* f_new) const {
        Eigen::VectorXcd rhs = u + (1.0 - theta) * dt * L.apply(u);
        if (f_old) rhs += (1.0 - theta) * dt * f_old->head(N);
        if (f_new) rhs += theta * dt * f_new->head(N);
        return L.affine(1.0, -theta * dt).solve(rhs);
    }
};

}  // namespace detail

/// One theta step of size dt on every mode:
/// (I - theta dt L) u_new = (I + (1-theta) dt L) u_old + dt (theta f(t+dt) + (1-theta) f(t)).
inline RadialField step(const RadialField& state, double t, double dt, const ForcingProvider& f, OuterBC bc,
                        double theta = 0.5) {
    RadialField out = state;
    parallel_for(state.mode_count(), [&](std::size_t m) {
        detail::ModeStepper s{assemble_mode_operator(state.n, state.modes[m].eigenvalue, state.grid, bc,
                                                     state.modes[m].label),
                              0};
        s.N = s.L.size();
        Eigen::VectorXcd fo, fn;
        if (f) {
            fo = f(m, t);
            fn = f(m, t + dt);
        }
        out.values[m].head(s.N) = s.step(state.values[m].head(s.N), dt, theta, f ? &fo : nullptr, f ? &fn : nullptr);
        if (bc == OuterBC::dirichlet) out.values[m](state.grid.size() - 1) = 0.0;
    });
    return out;
}

/// Evolves u0 to cfg.T, recording snapshots (t = 0 included). Modes evolve
/// independently; the result is linear in (u0, f).
inline HeatTrajectory solve_heat(const RadialField& u0, const ForcingProvider& f, const HeatConfig& cfg) {
    cfg.validate();
    u0.check_finite();
    if (u0.grid.size() != cfg.grid.size() || u0.grid.tau_min() != cfg.grid.tau_min())
        throw ConfigError("heat: initial field grid differs from the configured grid");
    const int steps = cfg.step_count();
    const double dt = cfg.step_size();
    std::vector<int> record;
    if (cfg.output_times.empty()) {
        for (int s = 0; s <= steps; s += cfg.output_stride) record.push_back(s);
        if (record.back() != steps) record.push_back(steps);
    } else {
        record.push_back(0);
        for (double t : cfg.output_times) record.push_back(static_cast<int>(std::lround(t / dt)));
        std::sort(record.begin(), record.end());
        record.erase(std::unique(record.begin(), record.end()), record.end());
    }

    HeatTrajectory traj;
    traj.config = cfg;
    std::vector<std::vector<Eigen::VectorXcd>> per_mode(u0.mode_count());
    const int startup = std::min(cfg.startup_steps, steps);

    parallel_for(u0.mode_count(), [&](std::size_t m) {
        detail::ModeStepper s{assemble_mode_operator(u0.n, u0.modes[m].eigenvalue, cfg.grid, cfg.outer_bc,
                                                     u0.modes[m].label),
                              0};
        s.N = s.L.size();
        const TridiagonalOperator half_be = s.L.affine(1.0, -0.5 * dt);
        const TridiagonalOperator lhs = s.L.affine(1.0, -cfg.theta * dt);
        Eigen::VectorXcd u = u0.values[m];
        if (cfg.outer_bc == OuterBC::dirichlet) u(u.size() - 1) = 0.0;
        std::size_t next = 0;
        auto maybe_record = [&](int k) {
            while (next < record.size() && record[next] == k) {
                per_mode[m].push_back(u);
                ++next;
            }
        };
        maybe_record(0);
        for (int k = 0; k < steps; ++k) {
            const double t = k * dt;
            Eigen::VectorXcd core = u.head(s.N);
            if (k < startup) {
                for (int half = 0; half < 2; ++half) {
                    Eigen::VectorXcd rhs = core;
                    if (f) rhs += 0.5 * dt * f(m, t + 0.5 * dt * (half + 1)).head(s.N);
                    core = half_be.solve(rhs);
                }
            } else {
                Eigen::VectorXcd rhs = core + (1.0 - cfg.theta) * dt * s.L.apply(core);
                if (f) {
                    rhs += (1.0 - cfg.theta) * dt * f(m, t).head(s.N);
                    rhs += cfg.theta * dt * f(m, t + dt).head(s.N);
                }
                core = lhs.solve(rhs);
            }
            if (!core.allFinite())
                throw NumericalError("heat step produced non-finite values in mode " + u0.modes[m].label);
            u.head(s.N) = core;
            maybe_record(k + 1);
        }
    });

    for (std::size_t r = 0; r < record.size(); ++r) {
        traj.times.push_back(record[r] * dt);
        RadialField snap = RadialField::zeros(cfg.grid, u0.modes, u0.n, u0.volume);
        for (std::size_t m = 0; m < u0.mode_count(); ++m) snap.values[m] = per_mode[m][r];
        traj.snapshots.push_back(std::move(snap));
    }
    return traj;
}

}  // namespace conelab
