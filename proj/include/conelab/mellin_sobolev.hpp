#pragma once

// Log-radial grids, per-mode radial fields and weighted Mellin-Sobolev norms
// H^{s,gamma}_p for integer s on the model cone.

#include "conelab/asymptotics.hpp"

#include <Eigen/Dense>

namespace conelab {

/// Uniform grid in tau = log x on [tau_min, 0]; J points, the last at x = 1.
class LogGrid {
public:
    LogGrid() = default;
    LogGrid(double tau_min, int points) : tau_min_(tau_min), J_(points) {
        if (!(tau_min < 0.0)) throw ConfigError("log grid needs tau_min < 0");
        if (points < 3) throw ConfigError("log grid needs at least 3 points");
        h_ = -tau_min / (points - 1);
    }

    /// Grid with spacing close to `h` on [tau_min, 0].
    static LogGrid with_spacing(double tau_min, double h) {
        const int J = static_cast<int>(std::lround(-tau_min / h)) + 1;
        return LogGrid(tau_min, J);
    }

    int size() const { return J_; }
    double h() const { return h_; }
    double tau_min() const { return tau_min_; }
    double tau(int j) const { return j == J_ - 1 ? 0.0 : tau_min_ + h_ * j; }
    double x(int j) const { return std::exp(tau(j)); }
    double x_min() const { return std::exp(tau_min_); }

    /// Half the spacing, with tau_min moved further out by `extend`.
    LogGrid refined(double extend = 0.0) const { return with_spacing(tau_min_ - extend, 0.5 * h_); }

    Eigen::VectorXd x_values() const {
        Eigen::VectorXd v(J_);
        for (int j = 0; j < J_; ++j) v(j) = x(j);
        return v;
    }

private:
    double tau_min_ = -8.0;
    int J_ = 257;
    double h_ = 8.0 / 256;
};

/// C^infinity cut-off: 1 for x <= 1/2, 0 for x >= 1.
inline double smooth_cutoff(double x) {
    auto f = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
    if (x <= 0.5) return 1.0;
    if (x >= 1.0) return 0.0;
    const double s = 2.0 * x - 1.0;
    return f(1.0 - s) / (f(s) + f(1.0 - s));
}

inline double sharp_cutoff(double x) { return x <= 0.5 ? 1.0 : 0.0; }

enum class CutoffKind { smooth, sharp };

inline double cutoff(CutoffKind k, double x) { return k == CutoffKind::smooth ? smooth_cutoff(x) : sharp_cutoff(x); }

/// Per-mode complex samples on a shared log grid. Mode values are coefficients
/// against cross-section eigenfunctions normalized to ||phi||^2 = vol(cross-section).
struct RadialField {
    LogGrid grid;
    std::vector<Mode> modes;
    int n = 1;
    double volume = 2.0 * pi;
    std::vector<Eigen::VectorXcd> values;

    static RadialField zeros(const LogGrid& g, std::vector<Mode> modes, int n, double volume) {
        RadialField f;
        f.grid = g;
        f.modes = std::move(modes);
        f.n = n;
        f.volume = volume;
        f.values.assign(f.modes.size(), Eigen::VectorXcd::Zero(g.size()));
        return f;
    }

    static RadialField zeros(const LogGrid& g, const CrossSection& cs, int max_modes) {
        return zeros(g, make_modes(cs, max_modes), cs.dimension(), cs.volume());
    }

    std::size_t mode_count() const { return modes.size(); }

    void check_finite() const {
        for (std::size_t m = 0; m < values.size(); ++m)
            if (!values[m].allFinite())
                throw DataError("radial field has non-finite values in mode " + modes[m].label);
    }

    RadialField& operator+=(const RadialField& o) {
        for (std::size_t m = 0; m < values.size(); ++m) values[m] += o.values[m];
        return *this;
    }
    RadialField& operator*=(Complex c) {
        for (auto& v : values) v *= c;
        return *this;
    }
    friend RadialField operator+(RadialField a, const RadialField& b) { return a += b; }
    friend RadialField operator*(Complex c, RadialField a) { return a *= c; }

    double max_abs_difference(const RadialField& o) const {
        double d = 0.0;
        for (std::size_t m = 0; m < values.size(); ++m) d = std::max(d, (values[m] - o.values[m]).cwiseAbs().maxCoeff());
        return d;
    }
};

/// Samples sum_t c_t x^{-rho_t} log^{m_t} x (times a cut-off) onto a field.
template <class T>
void add_terms(RadialField& f, const Expansion<T>& terms, CutoffKind ck = CutoffKind::smooth, bool with_cutoff = true) {
    for (const auto& t : terms) {
        if (t.mode >= f.values.size()) throw LookupError("term mode outside the field's mode table");
        const Complex rho = field_traits<T>::to_complex(t.rho);
        const Complex c = field_traits<T>::to_complex(t.c);
        for (int j = 0; j < f.grid.size(); ++j) {
            const double tau = f.grid.tau(j);
            const double w = with_cutoff ? cutoff(ck, f.grid.x(j)) : 1.0;
            if (w == 0.0) continue;
            f.values[t.mode](j) += w * c * std::exp(-rho * tau) * std::pow(tau, t.m);
        }
    }
}

// ---------------------------------------------------------------------------

namespace detail {

// Second-order d/dtau: central inside, one-sided at the ends.
inline Eigen::VectorXcd d_tau(const Eigen::VectorXcd& v, double h) {
    const Eigen::Index J = v.size();
    Eigen::VectorXcd d(J);
    for (Eigen::Index j = 1; j + 1 < J; ++j) d(j) = (v(j + 1) - v(j - 1)) / (2.0 * h);
    d(0) = (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * h);
    d(J - 1) = (3.0 * v(J - 1) - 4.0 * v(J - 2) + v(J - 3)) / (2.0 * h);
    return d;
}

inline double trapezoid(const Eigen::VectorXd& f, double h) {
    if (f.size() < 2) return 0.0;
    return h * (f.sum() - 0.5 * (f(0) + f(f.size() - 1)));
}

}  // namespace detail

struct MellinOptions {
    CutoffKind cutoff = CutoffKind::smooth;
};

/// Weighted L^2 norm (s = 0, p = 2) of one mode vector, cross-section volume included.
inline double weighted_l2(const Eigen::VectorXcd& v, const LogGrid& g, int n, double gamma, double volume) {
    const double w = 0.5 * (n + 1) - gamma;
    Eigen::VectorXd f(g.size());
    for (int j = 0; j < g.size(); ++j) f(j) = std::exp(2.0 * w * g.tau(j)) * std::norm(v(j));
    return std::sqrt(volume * detail::trapezoid(f, g.h()));
}

/// ||u||_{H^{s,gamma}_p}: collar part ||omega u|| plus interior part ||(1-omega) u||,
/// each as sum_{k+a<=s} int |x^{(n+1)/2-gamma} (x d_x)^k u_m|^2 |lambda_m|^a dx/x.
/// (x d_x) is d/dtau by second-order differences; y-derivatives enter spectrally.
inline double mellin_norm(const RadialField& u, int s, double gamma, double p = 2.0, const MellinOptions& opt = {}) {
    if (s < 0) throw PreconditionError("mellin_norm: s must be >= 0");
    if (!(p > 1.0) || !std::isfinite(p)) throw PreconditionError("mellin_norm: p must lie in (1, inf)");
    u.check_finite();
    const auto& g = u.grid;
    const double w = 0.5 * (u.n + 1) - gamma;
    const bool l2 = p == 2.0;
    if (!l2) {
        if (s >= 1) throw UnsupportedError("mellin_norm: p != 2 is supported for s = 0 only");
        for (std::size_t m = 1; m < u.values.size(); ++m)
            if (u.values[m].cwiseAbs().maxCoeff() > 0.0)
                throw UnsupportedError("mellin_norm: p != 2 needs a field carried by the constant mode only");
    }
    auto part_norm = [&](bool collar) {
        double total = 0.0;
        for (std::size_t m = 0; m < u.values.size(); ++m) {
            Eigen::VectorXcd v = u.values[m];
            for (int j = 0; j < g.size(); ++j) {
                const double om = cutoff(opt.cutoff, g.x(j));
                v(j) *= collar ? om : 1.0 - om;
            }
            const double lam = std::abs(u.modes[m].eigenvalue);
            Eigen::VectorXcd dk = v;
            for (int k = 0; k <= s; ++k) {
                if (k > 0) dk = detail::d_tau(dk, g.h());
                Eigen::VectorXd f(g.size());
                for (int j = 0; j < g.size(); ++j)
                    f(j) = std::pow(std::exp(w * g.tau(j)) * std::abs(dk(j)), p);
                const double integral = detail::trapezoid(f, g.h());
                for (int a = 0; k + a <= s; ++a) total += integral * std::pow(lam, a);
            }
        }
        return u.volume * total;
    };
    return std::pow(part_norm(true) + part_norm(false), 1.0 / p);
}

/// Analytic criterion: x^{-rho} log^m x (cut off) lies in H^{s,gamma}_p iff
/// Re(-rho) + (n+1)/2 - gamma > 0. Log factors and p do not change the strict
/// inequality; equality is reported as a critical exponent.
template <class T>
Membership membership_probe(const AsymptoticsTerm<T>& term, int n, double gamma) {
    using V = Membership::Verdict;
    const Rational edge = Rational(n + 1) / 2 - rational_from_double(gamma);
    const int c = detail::compare_re(term.rho, edge, 1e-12);
    if (c < 0) return {V::member, "Re(-rho) + (n+1)/2 - gamma > 0"};
    if (c == 0) return {V::boundary, "critical exponent: Re(-rho) + (n+1)/2 - gamma = 0"};
    return {V::non_member, "Re(-rho) + (n+1)/2 - gamma < 0: weighted integral diverges at the tip"};
}

}  // namespace conelab
