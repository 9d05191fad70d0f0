#pragma once

// Asymptotics bases, an exact power-log calculus for cone operators, and
// symbolic membership of power-log terms in realization domains.

#include "conelab/symbol_algebra.hpp"

#include <variant>

namespace conelab {

/// c * x^{-rho} log^m(x) on one cross-section mode (implicitly cut off near the tip).
template <class T>
struct AsymptoticsTerm {
    T rho{};
    int m = 0;
    std::size_t mode = 0;
    T c{};
};

template <class T>
using Expansion = std::vector<AsymptoticsTerm<T>>;

struct BasisTriple {
    Complex rho;
    std::optional<Rational> exact;
    int m = 0;
    std::size_t mode = 0;
    std::string label;
};

struct AsymptoticsBasis {
    std::vector<BasisTriple> terms;
    PoleSet provenance;

    std::vector<BasisTriple> for_mode(std::size_t mode) const {
        std::vector<BasisTriple> v;
        for (const auto& t : terms)
            if (t.mode == mode) v.push_back(t);
        return v;
    }
};

/// One (rho, m, mode) per in-strip pole entry and 0 <= m <= M_rho.
inline AsymptoticsBasis enumerate_asymptotics(const PoleSet& ps) {
    AsymptoticsBasis b;
    b.provenance = ps;
    for (const auto& e : ps.entries) {
        if (!e.in_strip) continue;
        for (int m = 0; m <= e.max_log_power; ++m)
            b.terms.push_back(BasisTriple{e.rho, e.exact, m, e.mode, e.label});
    }
    return b;
}

namespace detail {

template <class T>
bool same_rho(const T& a, const T& b, double tol) {
    if constexpr (field_traits<T>::exact) return a == b;
    else return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

}  // namespace detail

/// Merges terms with equal (rho, m, mode), drops zero coefficients and sorts
/// by mode, decreasing Re rho, decreasing m.
template <class T>
Expansion<T> canonicalize(const Expansion<T>& in, double tol = 1e-9) {
    using F = field_traits<T>;
    Expansion<T> out;
    double scale = 0.0;
    for (const auto& t : in) scale = std::max(scale, F::magnitude(t.c));
    for (const auto& t : in) {
        auto it = std::find_if(out.begin(), out.end(), [&](const AsymptoticsTerm<T>& o) {
            return o.mode == t.mode && o.m == t.m && detail::same_rho(o.rho, t.rho, tol);
        });
        if (it == out.end()) out.push_back(t);
        else it->c = it->c + t.c;
    }
    std::erase_if(out, [&](const AsymptoticsTerm<T>& t) {
        if constexpr (F::exact) return F::is_zero(t.c);
        else return std::abs(t.c) <= 1e3 * F::eps * std::max(scale, 1e-300);
    });
    std::sort(out.begin(), out.end(), [](const AsymptoticsTerm<T>& a, const AsymptoticsTerm<T>& b) {
        if (a.mode != b.mode) return a.mode < b.mode;
        const double ra = F::to_complex(a.rho).real(), rb = F::to_complex(b.rho).real();
        if (ra != rb) return ra > rb;
        return a.m > b.m;
    });
    return out;
}

/// Applies x^{-mu} sum_k a_k(x) (-x d/dx)^k to one term, using
/// (-x d/dx)(x^{-rho} log^m x) = rho x^{-rho} log^m x - m x^{-rho} log^{m-1} x.
/// Output exponents are rho + mu - d for the x^d Taylor terms of a_k.
template <class T>
Expansion<T> apply_operator_symbolic(const ConeOperatorSpec<T>& spec, const AsymptoticsTerm<T>& term) {
    using F = field_traits<T>;
    spec.mode(term.mode);
    if (term.m < 0) throw PreconditionError("log power must be >= 0");
    const auto len = static_cast<std::size_t>(term.m) + 1;
    std::vector<T> v(len, F::from_int(0));
    v[len - 1] = term.c;
    Expansion<T> out;
    for (int k = 0; k <= spec.mu; ++k) {
        if (k > 0) {
            std::vector<T> w(len, F::from_int(0));
            for (std::size_t j = 0; j < len; ++j) {
                w[j] = term.rho * v[j];
                if (j + 1 < len) w[j] = w[j] - F::from_int(static_cast<long long>(j + 1)) * v[j + 1];
            }
            v = std::move(w);
        }
        const auto& a = spec.a(term.mode, k);
        for (int d = 0; d <= a.degree(); ++d) {
            const T ad = a.coeff(d);
            if (F::is_zero(ad, a.scale())) continue;
            for (std::size_t j = 0; j < len; ++j) {
                if (F::is_zero(v[j], 0.0)) continue;
                out.push_back(AsymptoticsTerm<T>{term.rho + F::from_int(spec.mu - d), static_cast<int>(j),
                                                 term.mode, ad * v[j]});
            }
        }
    }
    return canonicalize(out);
}

template <class T>
Expansion<T> apply_operator_symbolic(const ConeOperatorSpec<T>& spec, const Expansion<T>& terms) {
    Expansion<T> out;
    for (const auto& t : terms) {
        auto part = apply_operator_symbolic(spec, t);
        out.insert(out.end(), part.begin(), part.end());
    }
    return canonicalize(out);
}

template <class T>
Expansion<T> apply_operator_power(const ConeOperatorSpec<T>& spec, Expansion<T> terms, int k) {
    for (int i = 0; i < k; ++i) terms = apply_operator_symbolic(spec, terms);
    return terms;
}

/// Builds a term of field T from a basis triple (exact fields need an exact rho).
template <class T>
AsymptoticsTerm<T> make_term(const BasisTriple& b, const T& c) {
    if constexpr (field_traits<T>::exact) {
        if (!b.exact) throw UnsupportedError("basis term has no exact exponent");
        return {*b.exact, b.m, b.mode, c};
    } else {
        return {b.rho, b.m, b.mode, c};
    }
}

// ---------------------------------------------------------------------------
// Realizations and membership

struct Realization {
    enum class Kind { min, dd, max, power_max, power_dd };
    Kind kind = Kind::dd;
    int k = 1;

    static Realization minimal() { return {Kind::min, 1}; }
    static Realization constants_extended() { return {Kind::dd, 1}; }
    static Realization maximal() { return {Kind::max, 1}; }
    /// Maximal extension of A^k (asymptotics from the k-th power pole set).
    static Realization power_of_max(int k) { return {Kind::power_max, k}; }
    /// Domain of the k-th power of the constants-extended realization.
    static Realization power_of_dd(int k) { return {Kind::power_dd, k}; }

    std::string name() const {
        switch (kind) {
            case Kind::min: return "min";
            case Kind::dd: return "DD";
            case Kind::max: return "max";
            case Kind::power_max: return "power(" + std::to_string(k) + ")";
            case Kind::power_dd: return "DD^" + std::to_string(k);
        }
        return "?";
    }
};

struct Membership {
    enum class Verdict { member, non_member, boundary };
    Verdict verdict = Verdict::non_member;
    std::string explanation;
    bool member() const { return verdict == Verdict::member; }
};

namespace detail {

// Sign of Re(rho) - edge, exact where possible; 0 means "on the edge".
template <class T>
int compare_re(const T& rho, const Rational& edge, double tol) {
    if constexpr (field_traits<T>::exact) {
        return rho < edge ? -1 : (rho == edge ? 0 : 1);
    } else {
        const double e = to_double(edge);
        const double d = rho.real() - e;
        if (std::abs(d) <= tol * std::max(1.0, std::abs(e))) return 0;
        return d < 0 ? -1 : 1;
    }
}

template <class T>
bool is_constant_term(const ConeOperatorSpec<T>& spec, const AsymptoticsTerm<T>& t, double tol) {
    const auto& mode = spec.mode(t.mode);
    const bool zero_mode = mode.exact ? *mode.exact == 0 : std::abs(mode.eigenvalue) <= tol;
    if (!zero_mode || t.m != 0) return false;
    if constexpr (field_traits<T>::exact) return t.rho == 0;
    else return std::abs(t.rho) <= tol;
}

template <class T>
Membership membership_in_max(const ConeOperatorSpec<T>& spec, const AsymptoticsTerm<T>& t, double gamma,
                             int k, double tol, const std::string& name) {
    using V = Membership::Verdict;
    const Rational right = Rational(spec.n + 1) / 2 - rational_from_double(gamma);
    const Rational left = right - Rational(k * spec.mu);
    const int cr = compare_re(t.rho, right, tol);
    if (cr == 0) return {V::boundary, name + ": Re rho on the right strip edge (critical weight); boundary case"};
    if (cr > 0) return {V::non_member, name + ": term is not in the base Mellin-Sobolev space (Re rho >= right edge)"};
    const int cl = compare_re(t.rho, left, tol);
    if (cl < 0) return {V::member, name + ": minimal-domain regularity (Re rho below the strip)"};
    const PoleSet ps = k == 1 ? pole_set(spec, gamma, {t.mode}) : pole_set_power(spec, gamma, k, {t.mode});
    for (const auto& e : ps.entries) {
        if (!e.in_strip) continue;
        bool same;
        if constexpr (field_traits<T>::exact) same = e.exact && *e.exact == t.rho;
        else same = std::abs(e.rho - t.rho) <= tol * std::max(1.0, std::abs(e.rho));
        if (same && t.m <= e.max_log_power) {
            std::string msg = name + ": pole rho admitted with log powers 0.." + std::to_string(e.max_log_power);
            if (cl == 0) msg += " (pole on the closed left strip edge)";
            return {V::member, msg};
        }
        if (same)
            return {V::non_member, name + ": log power " + std::to_string(t.m) + " exceeds M_rho = " +
                                       std::to_string(e.max_log_power)};
    }
    if (cl == 0)
        return {V::boundary, name + ": Re rho on the left strip edge without a pole; boundary case"};
    return {V::non_member, name + ": rho is not a pole inside the strip"};
}

template <class T>
Membership membership_in_dd(const ConeOperatorSpec<T>& spec, const AsymptoticsTerm<T>& t, double gamma,
                            double tol) {
    using V = Membership::Verdict;
    if (is_constant_term(spec, t, tol)) return {V::member, "DD: constant term"};
    const Rational left = Rational(spec.n + 1) / 2 - rational_from_double(gamma) - Rational(spec.mu);
    const int cl = compare_re(t.rho, left, tol);
    if (cl < 0) return {V::member, "DD: minimal-domain regularity (Re rho below the strip)"};
    if (cl == 0) return {V::boundary, "DD: Re rho on the left strip edge; boundary case"};
    return {V::non_member, "DD: neither a constant nor of minimal-domain regularity"};
}

template <class T>
Membership membership_in_dd_power(const ConeOperatorSpec<T>& spec, const AsymptoticsTerm<T>& t, double gamma,
                                  int k, double tol) {
    using V = Membership::Verdict;
    Expansion<T> current{t};
    for (int level = 0; level < k; ++level) {
        for (const auto& term : current) {
            const auto r = membership_in_dd(spec, term, gamma, tol);
            if (!r.member()) {
                Membership out = r;
                out.explanation = "DD^" + std::to_string(k) + ": after " + std::to_string(level) +
                                  " application(s), " + r.explanation;
                return out;
            }
        }
        if (level + 1 < k) current = apply_operator_symbolic(spec, current);
        if (current.empty())
            return {V::member, "DD^" + std::to_string(k) + ": annihilated after " + std::to_string(level + 1) +
                                   " application(s)"};
    }
    return {V::member, "DD^" + std::to_string(k) + ": every intermediate image lies in DD"};
}

}  // namespace detail

/// Symbolic membership of a power-log term in a realization domain. Terms are
/// implicitly cut off near the tip; interior commutator terms are ignored.
template <class T>
Membership domain_membership(const AsymptoticsTerm<T>& term, const Realization& r, double gamma,
                             const ConeOperatorSpec<T>& spec, double tol = 1e-9) {
    using V = Membership::Verdict;
    switch (r.kind) {
        case Realization::Kind::min: {
            const Rational left = Rational(spec.n + 1) / 2 - rational_from_double(gamma) - Rational(spec.mu);
            const int cl = detail::compare_re(term.rho, left, tol);
            if (cl < 0) return {V::member, "min: Re rho below the strip"};
            if (cl == 0) return {V::boundary, "min: Re rho on the left strip edge; boundary case"};
            return {V::non_member, "min: Re rho inside or above the strip"};
        }
        case Realization::Kind::dd: return detail::membership_in_dd(spec, term, gamma, tol);
        case Realization::Kind::max: return detail::membership_in_max(spec, term, gamma, 1, tol, "max");
        case Realization::Kind::power_max:
            if (r.k < 1) throw PreconditionError("power realization needs k >= 1");
            return detail::membership_in_max(spec, term, gamma, r.k, tol, r.name());
        case Realization::Kind::power_dd:
            if (r.k < 1) throw PreconditionError("power realization needs k >= 1");
            return detail::membership_in_dd_power(spec, term, gamma, r.k, tol);
    }
    return {V::non_member, "unknown realization"};
}

// ---------------------------------------------------------------------------

struct PowerPoleCheck {
    bool ok = true;
    std::vector<std::string> failures;
    std::size_t checked = 0;
};

/// Cross-checks a k-th power pole set against literal k-fold application: every
/// basis term of maximal admitted log power must be annihilated, and one more
/// log power must not be.
template <class T>
PowerPoleCheck validate_power_poles(const ConeOperatorSpec<T>& spec, const PoleSet& ps) {
    using F = field_traits<T>;
    PowerPoleCheck out;
    for (const auto& e : ps.entries) {
        if (!e.in_strip) continue;
        BasisTriple b{e.rho, e.exact, e.max_log_power, e.mode, e.label};
        const auto top = make_term<T>(b, F::from_int(1));
        const auto image = apply_operator_power(spec, Expansion<T>{top}, ps.power);
        ++out.checked;
        if (!image.empty()) {
            out.ok = false;
            out.failures.push_back("mode " + e.label + " rho=" + fmt17(e.rho.real()) + ": m=" +
                                   std::to_string(e.max_log_power) + " not annihilated");
        }
        auto beyond = top;
        beyond.m += 1;
        if (apply_operator_power(spec, Expansion<T>{beyond}, ps.power).empty()) {
            out.ok = false;
            out.failures.push_back("mode " + e.label + " rho=" + fmt17(e.rho.real()) +
                                   ": multiplicity too small (m+1 also annihilated)");
        }
    }
    return out;
}

}  // namespace conelab
