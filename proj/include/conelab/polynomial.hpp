#pragma once

// Dense univariate polynomials and rational families over an exact or a
// floating field, plus companion-matrix root extraction.

#include "conelab/core.hpp"

#include <Eigen/Dense>

#include <initializer_list>
#include <ostream>
#include <utility>

namespace conelab {

template <class T>
class Polynomial {
public:
    using value_type = T;
    using traits = field_traits<T>;

    Polynomial() = default;
    explicit Polynomial(std::vector<T> ascending) : c_(std::move(ascending)) { trim(); }
    Polynomial(std::initializer_list<T> ascending) : c_(ascending) { trim(); }

    static Polynomial constant(const T& v) { return Polynomial(std::vector<T>{v}); }
    static Polynomial monomial(int degree, const T& coeff = traits::from_int(1)) {
        std::vector<T> c(static_cast<std::size_t>(degree) + 1, traits::from_int(0));
        c.back() = coeff;
        return Polynomial(std::move(c));
    }
    /// (lambda - root)
    static Polynomial linear_factor(const T& root) {
        return Polynomial(std::vector<T>{-root, traits::from_int(1)});
    }

    bool is_zero() const { return c_.empty(); }
    /// Degree; -1 for the zero polynomial.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<T>& coefficients() const { return c_; }

    T coeff(int i) const {
        if (i < 0 || i > degree()) return traits::from_int(0);
        return c_[static_cast<std::size_t>(i)];
    }
    T leading() const { return is_zero() ? traits::from_int(0) : c_.back(); }

    double scale() const {
        double s = 0.0;
        for (const auto& v : c_) s = std::max(s, traits::magnitude(v));
        return s;
    }

    T operator()(const T& x) const {
        T acc = traits::from_int(0);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    Complex eval_complex(Complex x) const {
        Complex acc{0.0, 0.0};
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + traits::to_complex(*it);
        return acc;
    }

    Polynomial<Complex> to_complex() const {
        std::vector<Complex> c;
        c.reserve(c_.size());
        for (const auto& v : c_) c.push_back(traits::to_complex(v));
        return Polynomial<Complex>(std::move(c));
    }

    Polynomial derivative() const {
        if (degree() < 1) return {};
        std::vector<T> d;
        for (int i = 1; i <= degree(); ++i) d.push_back(c_[static_cast<std::size_t>(i)] * traits::from_int(i));
        return Polynomial(std::move(d));
    }

    /// (T^sigma p)(lambda) = p(lambda + sigma)
    Polynomial shifted(const T& sigma) const {
        Polynomial result;
        const Polynomial step = Polynomial(std::vector<T>{sigma, traits::from_int(1)});
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) result = result * step + constant(*it);
        return result;
    }

    /// Composition with lambda -> -lambda.
    Polynomial reflected() const {
        std::vector<T> c = c_;
        for (std::size_t i = 1; i < c.size(); i += 2) c[i] = -c[i];
        return Polynomial(std::move(c));
    }

    Polynomial monic() const {
        if (is_zero()) return {};
        const T lead = leading();
        std::vector<T> c = c_;
        for (auto& v : c) v = v / lead;
        c.back() = traits::from_int(1);
        return Polynomial(std::move(c));
    }

    Polynomial& operator+=(const Polynomial& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), traits::from_int(0));
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] = c_[i] + o.c_[i];
        trim();
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), traits::from_int(0));
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] = c_[i] - o.c_[i];
        trim();
        return *this;
    }
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator-(const Polynomial& a) { return Polynomial() - a; }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<T> c(a.c_.size() + b.c_.size() - 1, traits::from_int(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] = c[i + j] + a.c_[i] * b.c_[j];
        return Polynomial(std::move(c));
    }
    friend Polynomial operator*(const T& s, const Polynomial& p) {
        std::vector<T> c = p.c_;
        for (auto& v : c) v = s * v;
        return Polynomial(std::move(c));
    }

    /// Euclidean division: *this = q * d + r with deg r < deg d.
    std::pair<Polynomial, Polynomial> divmod(const Polynomial& d) const {
        if (d.is_zero()) throw NumericalError("polynomial division by zero");
        if (degree() < d.degree()) return {Polynomial(), *this};
        std::vector<T> r = c_;
        std::vector<T> q(static_cast<std::size_t>(degree() - d.degree() + 1), traits::from_int(0));
        const T lead = d.leading();
        const double tol_scale = scale();
        for (int k = degree() - d.degree(); k >= 0; --k) {
            const auto top = static_cast<std::size_t>(k + d.degree());
            const T factor = r[top] / lead;
            q[static_cast<std::size_t>(k)] = factor;
            for (int j = 0; j <= d.degree(); ++j) {
                auto idx = static_cast<std::size_t>(k + j);
                r[idx] = r[idx] - factor * d.c_[static_cast<std::size_t>(j)];
            }
            r[top] = traits::from_int(0);
        }
        Polynomial rem(std::move(r));
        rem.trim(tol_scale);
        return {Polynomial(std::move(q)), rem};
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        if (a.c_.size() != b.c_.size()) return false;
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            if (!(a.c_[i] == b.c_[i])) return false;
        return true;
    }

    /// Drops leading coefficients that are zero (exactly, or relative to
    /// `ref_scale` for floating fields).
    void trim(double ref_scale = -1.0) {
        const double s = ref_scale > 0 ? ref_scale : scale();
        while (!c_.empty() && traits::is_zero(c_.back(), s)) c_.pop_back();
    }

    friend std::ostream& operator<<(std::ostream& os, const Polynomial& p) {
        if (p.is_zero()) return os << "0";
        bool first = true;
        for (int i = p.degree(); i >= 0; --i) {
            const T& v = p.c_[static_cast<std::size_t>(i)];
            if (traits::is_zero(v, p.scale())) continue;
            if (!first) os << " + ";
            os << "(" << v << ")";
            if (i > 0) os << "*l^" << i;
            first = false;
        }
        return os;
    }

private:
    std::vector<T> c_;
};

/// Monic greatest common divisor (Euclid). For floating fields remainders are
/// truncated relative to the operand scale.
template <class T>
Polynomial<T> gcd(Polynomial<T> a, Polynomial<T> b) {
    using traits = field_traits<T>;
    const double s = std::max(a.scale(), b.scale());
    while (!b.is_zero()) {
        auto [q, r] = a.divmod(b);
        if constexpr (!traits::exact) {
            // Relative truncation against the running scale.
            r.trim(std::max(s, 1.0) * 1e6);
        }
        a = std::move(b);
        b = std::move(r);
    }
    if (a.is_zero()) return {};
    return a.monic();
}

// ---------------------------------------------------------------------------

/// num/den in lowest terms with a monic denominator.
template <class T>
class RationalFamily {
public:
    using traits = field_traits<T>;

    RationalFamily() : num_(), den_(Polynomial<T>::constant(traits::from_int(1))) {}
    RationalFamily(Polynomial<T> num, Polynomial<T> den) : num_(std::move(num)), den_(std::move(den)) {
        if (den_.is_zero()) throw NumericalError("rational family with zero denominator");
        normalize();
    }
    explicit RationalFamily(Polynomial<T> poly)
        : RationalFamily(std::move(poly), Polynomial<T>::constant(traits::from_int(1))) {}

    static RationalFamily reciprocal(const Polynomial<T>& p) {
        if (p.is_zero()) throw NumericalError("reciprocal of the zero polynomial");
        return RationalFamily(Polynomial<T>::constant(traits::from_int(1)), p);
    }

    const Polynomial<T>& numerator() const { return num_; }
    const Polynomial<T>& denominator() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }

    Complex eval_complex(Complex x) const { return num_.eval_complex(x) / den_.eval_complex(x); }

    RationalFamily shifted(const T& sigma) const {
        return RationalFamily(num_.shifted(sigma), den_.shifted(sigma));
    }

    friend RationalFamily operator*(const RationalFamily& a, const RationalFamily& b) {
        return RationalFamily(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend RationalFamily operator/(const RationalFamily& a, const RationalFamily& b) {
        if (b.is_zero()) throw NumericalError("division by the zero rational family");
        return RationalFamily(a.num_ * b.den_, a.den_ * b.num_);
    }
    friend RationalFamily operator+(const RationalFamily& a, const RationalFamily& b) {
        return RationalFamily(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RationalFamily operator-(const RationalFamily& a, const RationalFamily& b) {
        return RationalFamily(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RationalFamily operator-(const RationalFamily& a) { return RationalFamily(-a.num_, a.den_); }

    friend bool operator==(const RationalFamily& a, const RationalFamily& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }

    friend std::ostream& operator<<(std::ostream& os, const RationalFamily& r) {
        return os << "[" << r.num_ << "] / [" << r.den_ << "]";
    }

private:
    void normalize() {
        if (num_.is_zero()) {
            den_ = Polynomial<T>::constant(traits::from_int(1));
            return;
        }
        const Polynomial<T> g = gcd(num_, den_);
        if (g.degree() > 0) {
            num_ = num_.divmod(g).first;
            den_ = den_.divmod(g).first;
        }
        const T lead = den_.leading();
        den_ = den_.monic();
        std::vector<T> c = num_.coefficients();
        for (auto& v : c) v = v / lead;
        num_ = Polynomial<T>(std::move(c));
    }

    Polynomial<T> num_;
    Polynomial<T> den_;
};

// ---------------------------------------------------------------------------
// Root extraction

struct Root {
    Complex value;
    std::optional<Rational> exact;  // set when the root is rational and verified exactly
    int multiplicity = 1;
};

namespace detail {

// Parlett-Reinsch style diagonal balancing, in place.
inline void balance(Eigen::MatrixXcd& a) {
    const Eigen::Index n = a.rows();
    constexpr double radix = 2.0;
    bool done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double c = 0.0, r = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix, f = 1.0;
            const double s = c + r;
            while (c < g) { f *= radix; c *= radix * radix; }
            g = r * radix;
            while (c > g) { f /= radix; c /= radix * radix; }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

inline std::vector<Complex> companion_eigenvalues(const Polynomial<Complex>& p) {
    const int deg = p.degree();
    std::vector<Complex> roots;
    if (deg < 1) return roots;
    const Polynomial<Complex> m = p.monic();
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -m.coeff(i);
    balance(comp);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(comp, false);
    if (solver.info() != Eigen::Success) {
        std::ostringstream os;
        os << "root finder did not converge for polynomial " << p;
        throw NumericalError(os.str());
    }
    const Polynomial<Complex> dp = p.derivative();
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        Complex r = solver.eigenvalues()(i);
        const Complex d = dp.eval_complex(r);
        if (std::abs(d) > 0.0) {
            const Complex step = p.eval_complex(r) / d;
            // One Newton polish; skipped when it would move a clustered root far.
            if (std::abs(step) < 1e-3 * std::max(1.0, std::abs(r))) r -= step;
        }
        roots.push_back(r);
    }
    return roots;
}

// |p^{(k)}(c)| / k! relative to the coefficient scale, used to confirm clusters.
inline double taylor_coeff_rel(const Polynomial<Complex>& p, Complex c, int k) {
    Polynomial<Complex> d = p;
    double fact = 1.0;
    for (int i = 0; i < k; ++i) {
        d = d.derivative();
        fact *= (i + 1);
    }
    const double s = std::max(p.scale(), 1e-300) * std::pow(std::max(1.0, std::abs(c)), p.degree());
    return std::abs(d.eval_complex(c)) / fact / s;
}

inline std::vector<Root> cluster_roots(const Polynomial<Complex>& p, std::vector<Complex> raw,
                                       double tol_pole) {
    std::sort(raw.begin(), raw.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    std::vector<bool> used(raw.size(), false);
    std::vector<Root> out;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (used[i]) continue;
        std::vector<std::size_t> members{i};
        used[i] = true;
        // Tight merge at tol_pole, then a looser candidate radius confirmed by
        // vanishing Taylor coefficients (eigenvalue perturbation of a k-fold
        // root scales like eps^(1/k)).
        const double loose = 1e-4 * std::max(1.0, std::abs(raw[i]));
        for (std::size_t j = i + 1; j < raw.size(); ++j) {
            if (used[j]) continue;
            const double dist = std::abs(raw[j] - raw[i]);
            if (dist <= tol_pole * std::max(1.0, std::abs(raw[i]))) {
                members.push_back(j);
                used[j] = true;
            } else if (dist <= loose) {
                Complex c = raw[i];
                std::size_t k = members.size() + 1;
                c = (c * static_cast<double>(members.size()) + raw[j]) / static_cast<double>(k);
                bool ok = true;
                for (std::size_t d = 1; d < k && ok; ++d)
                    ok = taylor_coeff_rel(p, c, static_cast<int>(d)) < 1e-9;
                if (ok) {
                    members.push_back(j);
                    used[j] = true;
                }
            }
        }
        Complex centroid{0.0, 0.0};
        for (auto m : members) centroid += raw[m];
        centroid /= static_cast<double>(members.size());
        out.push_back(Root{centroid, std::nullopt, static_cast<int>(members.size())});
    }
    return out;
}

}  // namespace detail

/// Roots with multiplicities of a floating polynomial (companion matrix with
/// balancing, one Newton polish per root, clusters merged within tol_pole).
inline std::vector<Root> find_roots(const Polynomial<Complex>& p, double tol_pole = 1e-9) {
    if (p.is_zero()) throw NumericalError("roots of the zero polynomial are undefined");
    return detail::cluster_roots(p, detail::companion_eigenvalues(p), tol_pole);
}

/// Roots of a rational polynomial. Rational roots are recognised and their
/// multiplicities established by exact division; the rest stay floating.
inline std::vector<Root> find_roots(const Polynomial<Rational>& p, double tol_pole = 1e-9) {
    if (p.is_zero()) throw NumericalError("roots of the zero polynomial are undefined");
    std::vector<Root> out;
    Polynomial<Rational> rest = p;
    bool progress = true;
    while (progress && rest.degree() >= 1) {
        progress = false;
        const auto numeric = find_roots(rest.to_complex(), tol_pole);
        for (const auto& r : numeric) {
            if (std::abs(r.value.imag()) > 1e-6 * std::max(1.0, std::abs(r.value))) continue;
            // Multiple roots come back perturbed by ~eps^(1/k); candidates are
            // verified exactly, so looser recognition tolerances are safe.
            std::optional<Rational> cand;
            for (double tol : {1e-12, 1e-9, 1e-7, 1e-5, 1e-4}) {
                auto c = recognize_rational(r.value.real(), 100000, tol);
                if (c && rest(*c) == 0) {
                    cand = c;
                    break;
                }
            }
            if (!cand) continue;
            int mult = 0;
            const auto factor = Polynomial<Rational>::linear_factor(*cand);
            while (rest.degree() >= 1 && rest(*cand) == 0) {
                rest = rest.divmod(factor).first;
                ++mult;
            }
            out.push_back(Root{Complex(to_double(*cand), 0.0), *cand, mult});
            progress = true;
            break;
        }
    }
    if (rest.degree() >= 1) {
        for (auto& r : find_roots(rest.to_complex(), tol_pole)) out.push_back(r);
    }
    std::sort(out.begin(), out.end(), [](const Root& a, const Root& b) {
        return a.value.real() != b.value.real() ? a.value.real() < b.value.real()
                                                : a.value.imag() < b.value.imag();
    });
    return out;
}

}  // namespace conelab
