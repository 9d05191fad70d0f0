#pragma once

// Cone differential operators in collar form x^{-mu} sum_k a_k(x) (-x d/dx)^k,
// acting diagonally on cross-section modes; their conormal symbols, Taylor
// symbols, the recursive symbol family and the pole sets inside weight strips.

#include "conelab/cone_geometry.hpp"
#include "conelab/polynomial.hpp"

#include <map>

namespace conelab {

/// Per-mode collar coefficients a_k(x) as polynomials in x (Taylor data at 0).
template <class T>
struct ConeOperatorSpec {
    int mu = 2;
    int n = 1;
    int n_taylor = 0;
    std::string preset;
    std::vector<Mode> modes;
    // coeff[mode][k] = a_k(x) restricted to the mode's eigenspace
    std::vector<std::vector<Polynomial<T>>> coeff;

    const Mode& mode(std::size_t m) const {
        if (m >= modes.size())
            throw LookupError("unknown mode " + std::to_string(m) + " (operator has " +
                              std::to_string(modes.size()) + " modes)");
        return modes[m];
    }

    const Polynomial<T>& a(std::size_t m, int k) const {
        mode(m);
        return coeff[m][static_cast<std::size_t>(k)];
    }

    /// True when every coefficient is x-independent.
    bool straight() const {
        for (const auto& per_mode : coeff)
            for (const auto& p : per_mode)
                if (p.degree() > 0) return false;
        return true;
    }

    std::vector<std::size_t> all_modes() const {
        std::vector<std::size_t> v(modes.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = i;
        return v;
    }
};

/// Eigenvalue of a mode as a field element. Exact fields need exact eigenvalues.
template <class T>
T mode_eigenvalue(const Mode& m) {
    if constexpr (field_traits<T>::exact) {
        if (!m.exact)
            throw UnsupportedError("mode " + m.label + " has no exact eigenvalue; use floating mode");
        return *m.exact;
    } else {
        return Complex(m.eigenvalue, 0.0);
    }
}

/// Straight-cone Laplacian: a_2 = 1, a_1 = -(n-1), a_0 = lambda_mode.
template <class T>
ConeOperatorSpec<T> laplacian_spec(std::vector<Mode> modes, int n) {
    using F = field_traits<T>;
    ConeOperatorSpec<T> s;
    s.mu = 2;
    s.n = n;
    s.n_taylor = 1;
    s.preset = "laplacian";
    s.modes = std::move(modes);
    for (const auto& m : s.modes) {
        s.coeff.push_back({Polynomial<T>::constant(mode_eigenvalue<T>(m)),
                           Polynomial<T>::constant(F::from_int(-(n - 1))),
                           Polynomial<T>::constant(F::from_int(1))});
    }
    return s;
}

/// Laplacian with a_0(x) = lambda_mode (1 + x); other coefficients straight.
template <class T>
ConeOperatorSpec<T> warped_laplacian_spec(std::vector<Mode> modes, int n) {
    ConeOperatorSpec<T> s = laplacian_spec<T>(std::move(modes), n);
    s.preset = "warped";
    for (std::size_t i = 0; i < s.modes.size(); ++i) {
        const T lam = mode_eigenvalue<T>(s.modes[i]);
        s.coeff[i][0] = Polynomial<T>(std::vector<T>{lam, lam});
    }
    return s;
}

/// a_k(x) = base[k](x) + lambda_mode * eig[k](x) for every mode.
template <class T>
ConeOperatorSpec<T> explicit_spec(std::vector<Mode> modes, int n, int mu,
                                  const std::vector<std::vector<T>>& base,
                                  const std::vector<std::vector<T>>& eig) {
    if (mu < 1) throw ConfigError("operator order mu must be >= 1");
    ConeOperatorSpec<T> s;
    s.mu = mu;
    s.n = n;
    s.preset = "explicit";
    s.modes = std::move(modes);
    int deg = 0;
    for (const auto& m : s.modes) {
        const T lam = mode_eigenvalue<T>(m);
        std::vector<Polynomial<T>> per_k;
        for (int k = 0; k <= mu; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            Polynomial<T> p = ku < base.size() ? Polynomial<T>(base[ku]) : Polynomial<T>();
            if (ku < eig.size()) p += lam * Polynomial<T>(eig[ku]);
            deg = std::max(deg, p.degree());
            per_k.push_back(std::move(p));
        }
        s.coeff.push_back(std::move(per_k));
    }
    s.n_taylor = std::max(deg, mu - 1);
    return s;
}

/// sigma_M(lambda) = sum_k a_k(0) lambda^k on the mode.
template <class T>
Polynomial<T> conormal_symbol(const ConeOperatorSpec<T>& spec, std::size_t mode) {
    std::vector<T> c;
    for (int k = 0; k <= spec.mu; ++k) c.push_back(spec.a(mode, k).coeff(0));
    return Polynomial<T>(std::move(c));
}

/// f_nu(lambda) = (1/nu!) sum_i (d_x^nu a_i)(0) lambda^i, nu = 0..mu-1. The
/// factorial cancels against the Taylor coefficient of x^nu.
template <class T>
std::vector<Polynomial<T>> taylor_symbols(const ConeOperatorSpec<T>& spec, std::size_t mode) {
    if (spec.n_taylor < spec.mu - 1)
        throw PreconditionError("taylor_symbols: Taylor data of order " + std::to_string(spec.mu - 1) +
                                " is missing (operator carries order " +
                                std::to_string(spec.n_taylor) + ")");
    std::vector<Polynomial<T>> f;
    for (int nu = 0; nu < spec.mu; ++nu) {
        std::vector<T> c;
        for (int i = 0; i <= spec.mu; ++i) c.push_back(spec.a(mode, i).coeff(nu));
        f.emplace_back(std::move(c));
    }
    return f;
}

/// g_0 = 1/f_0,  g_k = -(T^{-k} f_0^{-1}) sum_{i<k} (T^{-i} f_{k-i}) g_i.
template <class T>
std::vector<RationalFamily<T>> recursive_symbols(const ConeOperatorSpec<T>& spec, std::size_t mode) {
    using F = field_traits<T>;
    const auto f = taylor_symbols(spec, mode);
    if (f[0].is_zero()) throw NumericalError("degenerate conormal symbol: f_0 vanishes identically");
    std::vector<RationalFamily<T>> g;
    g.push_back(RationalFamily<T>::reciprocal(f[0]));
    for (int k = 1; k < spec.mu; ++k) {
        RationalFamily<T> sum;
        for (int i = 0; i < k; ++i) {
            const RationalFamily<T> fi(f[static_cast<std::size_t>(k - i)].shifted(F::from_int(-i)));
            sum = sum + fi * g[static_cast<std::size_t>(i)];
        }
        const auto inv_shift = RationalFamily<T>::reciprocal(f[0].shifted(F::from_int(-k)));
        g.push_back(-(inv_shift * sum));
    }
    return g;
}

// ---------------------------------------------------------------------------
// Pole sets

struct PoleOptions {
    double tol_pole = 1e-9;
};

/// One pole rho of a mode's symbol family; terms x^{-rho} log^m x with
/// m <= max_log_power belong to the asymptotics.
struct PoleEntry {
    Complex rho;
    std::optional<Rational> exact;
    int order = 1;
    int max_log_power = 0;
    std::size_t mode = 0;
    std::string label;
    bool in_strip = false;
    bool on_edge = false;  // Re rho within tolerance of a strip endpoint (floating roots only)
};

/// A pole together with every mode it occurs in.
struct PoleGroup {
    Complex rho;
    std::optional<Rational> exact;
    int max_log_power = 0;
    std::vector<std::size_t> modes;
};

struct PoleSet {
    int n = 1;
    int mu = 2;
    int power = 1;
    double gamma = 0.0;
    double left = 0.0;   // closed
    double right = 0.0;  // open
    bool convention_pending = false;
    std::vector<std::size_t> modes;
    std::vector<std::string> labels;  // indexed like `modes`
    std::vector<PoleEntry> entries;   // every root of the selected modes, flagged

    std::vector<PoleEntry> in_strip() const {
        std::vector<PoleEntry> v;
        for (const auto& e : entries)
            if (e.in_strip) v.push_back(e);
        return v;
    }

    /// In-strip poles merged across modes (M = max over contributing modes).
    std::vector<PoleGroup> grouped(double tol = 1e-9) const {
        std::vector<PoleGroup> groups;
        for (const auto& e : entries) {
            if (!e.in_strip) continue;
            auto it = std::find_if(groups.begin(), groups.end(), [&](const PoleGroup& g) {
                if (g.exact && e.exact) return *g.exact == *e.exact;
                return std::abs(g.rho - e.rho) <= tol * std::max(1.0, std::abs(e.rho));
            });
            if (it == groups.end()) {
                groups.push_back(PoleGroup{e.rho, e.exact, e.max_log_power, {e.mode}});
            } else {
                it->max_log_power = std::max(it->max_log_power, e.max_log_power);
                it->modes.push_back(e.mode);
            }
        }
        std::sort(groups.begin(), groups.end(), [](const PoleGroup& a, const PoleGroup& b) {
            return a.rho.real() != b.rho.real() ? a.rho.real() < b.rho.real() : a.rho.imag() < b.rho.imag();
        });
        return groups;
    }
};

namespace detail {

struct StripBounds {
    Rational left_exact, right_exact;
    double left, right;
};

inline StripBounds strip_bounds(int n, double gamma, int width) {
    StripBounds b;
    b.right_exact = Rational(n + 1) / 2 - rational_from_double(gamma);
    b.left_exact = b.right_exact - Rational(width);
    b.left = to_double(b.left_exact);
    b.right = to_double(b.right_exact);
    return b;
}

inline void classify(PoleEntry& e, const StripBounds& b, double tol) {
    if (e.exact) {
        e.in_strip = b.left_exact <= *e.exact && *e.exact < b.right_exact;
        e.on_edge = false;
        return;
    }
    const double re = e.rho.real();
    const double s = tol * std::max(1.0, std::abs(re));
    const bool at_left = std::abs(re - b.left) <= s;
    const bool at_right = std::abs(re - b.right) <= s;
    e.on_edge = at_left || at_right;
    if (at_left) e.in_strip = true;
    else if (at_right) e.in_strip = false;
    else e.in_strip = b.left < re && re < b.right;
}

// Merges roots (with orders) into an accumulator keyed by value; keeps max order.
inline void merge_max(std::vector<Root>& acc, const Root& r, double tol) {
    for (auto& a : acc) {
        const bool same = (a.exact && r.exact) ? *a.exact == *r.exact
                                               : std::abs(a.value - r.value) <= tol * std::max(1.0, std::abs(r.value));
        if (same) {
            a.multiplicity = std::max(a.multiplicity, r.multiplicity);
            return;
        }
    }
    acc.push_back(r);
}

inline void merge_add(std::vector<Root>& acc, const Root& r, double tol) {
    for (auto& a : acc) {
        const bool same = (a.exact && r.exact) ? *a.exact == *r.exact
                                               : std::abs(a.value - r.value) <= tol * std::max(1.0, std::abs(r.value));
        if (same) {
            a.multiplicity += r.multiplicity;
            return;
        }
    }
    acc.push_back(r);
}

inline void sort_roots(std::vector<Root>& v) {
    std::sort(v.begin(), v.end(), [](const Root& a, const Root& b) {
        return a.value.real() != b.value.real() ? a.value.real() < b.value.real()
                                                : a.value.imag() < b.value.imag();
    });
}

template <class T>
PoleSet make_pole_set(const ConeOperatorSpec<T>& spec, double gamma, int power,
                      const std::vector<std::size_t>& modes) {
    if (modes.empty()) throw PreconditionError("pole set: no modes selected");
    PoleSet ps;
    ps.n = spec.n;
    ps.mu = spec.mu;
    ps.power = power;
    ps.gamma = gamma;
    ps.modes = modes;
    for (auto m : modes) ps.labels.push_back(spec.mode(m).label);
    const auto b = strip_bounds(spec.n, gamma, power * spec.mu);
    ps.left = b.left;
    ps.right = b.right;
    return ps;
}

template <class T>
void push_entries(PoleSet& ps, const ConeOperatorSpec<T>& spec, std::size_t mode,
                  std::vector<Root> roots, double tol) {
    sort_roots(roots);
    const auto b = strip_bounds(spec.n, ps.gamma, ps.power * spec.mu);
    for (const auto& r : roots) {
        PoleEntry e;
        e.rho = r.value;
        e.exact = r.exact;
        e.order = r.multiplicity;
        e.max_log_power = r.multiplicity - 1;
        e.mode = mode;
        e.label = spec.mode(mode).label;
        classify(e, b, tol);
        ps.entries.push_back(e);
    }
}

}  // namespace detail

/// Poles of g_0..g_{mu-1} per mode, flagged against the strip
/// [(n+1)/2 - gamma - mu, (n+1)/2 - gamma). Warped operators report unshifted
/// poles and are marked convention-pending.
template <class T>
PoleSet pole_set(const ConeOperatorSpec<T>& spec, double gamma, const std::vector<std::size_t>& modes,
                 const PoleOptions& opt = {}) {
    PoleSet ps = detail::make_pole_set(spec, gamma, 1, modes);
    ps.convention_pending = !spec.straight();
    for (auto m : modes) {
        std::vector<Root> acc;
        for (const auto& g : recursive_symbols(spec, m)) {
            if (g.is_zero() || g.denominator().degree() < 1) continue;
            for (const auto& r : find_roots(g.denominator(), opt.tol_pole)) detail::merge_max(acc, r, opt.tol_pole);
        }
        detail::push_entries(ps, spec, m, std::move(acc), opt.tol_pole);
    }
    return ps;
}

/// Poles for the k-th power: per mode the roots of prod_{j<k} sigma_M(lambda + j mu),
/// i.e. the roots of sigma_M shifted by -j mu, with multiplicities added.
template <class T>
PoleSet pole_set_power(const ConeOperatorSpec<T>& spec, double gamma, int k,
                       const std::vector<std::size_t>& modes, const PoleOptions& opt = {}) {
    if (k < 1) throw PreconditionError("pole_set_power: k must be >= 1");
    if (k == 1) return pole_set(spec, gamma, modes, opt);
    if (!spec.straight())
        throw UnsupportedError("pole sets of powers of x-dependent operators are unsupported in v1");
    PoleSet ps = detail::make_pole_set(spec, gamma, k, modes);
    for (auto m : modes) {
        const Polynomial<T> p = conormal_symbol(spec, m);
        if (p.is_zero()) throw NumericalError("degenerate conormal symbol: f_0 vanishes identically");
        std::vector<Root> base = p.degree() >= 1 ? find_roots(p, opt.tol_pole) : std::vector<Root>{};
        std::vector<Root> acc;
        for (int j = 0; j < k; ++j) {
            for (auto r : base) {
                const double shift = static_cast<double>(j * spec.mu);
                r.value -= shift;
                if (r.exact) *r.exact -= Rational(j * spec.mu);
                detail::merge_add(acc, r, opt.tol_pole);
            }
        }
        detail::push_entries(ps, spec, m, std::move(acc), opt.tol_pole);
    }
    return ps;
}

/// Warning-level ellipticity diagnostic: for spectrum-only coefficients the
/// rescaled symbol reduces to a_mu(0) != 0 on every mode.
template <class T>
std::vector<std::string> ellipticity_warnings(const ConeOperatorSpec<T>& spec) {
    std::vector<std::string> w;
    for (std::size_t m = 0; m < spec.modes.size(); ++m) {
        const T top = spec.a(m, spec.mu).coeff(0);
        if (field_traits<T>::is_zero(top, 1.0))
            w.push_back("mode " + spec.modes[m].label + ": leading coefficient a_mu(0) vanishes");
    }
    return w;
}

}  // namespace conelab
