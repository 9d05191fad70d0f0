#pragma once

// Model cross-sections of the cone: Laplacian spectra, Bessel orders and the
// admissible weight window for the constants-extended Laplacian realization.

#include "conelab/core.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <utility>
#include <variant>

namespace conelab {

/// One distinct eigenvalue of the cross-section Laplacian.
struct EigenLevel {
    double value = 0.0;
    std::optional<Rational> exact;
    int multiplicity = 1;
    int level = 0;  // k for circles, l for spheres, list position otherwise
};

/// One eigenfunction slot: a level together with an index inside its
/// eigenspace. Cross-sections are spectrum-only, so a mode carries no
/// eigenfunction samples.
struct Mode {
    std::size_t index = 0;
    int level = 0;
    int sub = 0;
    double eigenvalue = 0.0;
    std::optional<Rational> exact;
    std::string label;
};

class CrossSection {
public:
    enum class Kind { circle, sphere, explicit_list };

    static CrossSection circle(double length) {
        if (!(length > 0.0)) throw ConfigError("circle circumference must be positive");
        CrossSection cs;
        cs.kind_ = Kind::circle;
        cs.length_ = length;
        cs.length_over_pi_ = recognize_rational(length / pi, 1000, 1e-13);
        cs.n_ = 1;
        return cs;
    }
    /// Circle of circumference `ratio` * pi, kept exact.
    static CrossSection circle_pi(const Rational& ratio) {
        if (ratio <= 0) throw ConfigError("circle circumference must be positive");
        CrossSection cs;
        cs.kind_ = Kind::circle;
        cs.length_ = to_double(ratio) * pi;
        cs.length_over_pi_ = ratio;
        cs.n_ = 1;
        return cs;
    }
    /// Unit round S^n, n >= 2.
    static CrossSection sphere(int n) {
        if (n < 2) throw ConfigError("sphere cross-section needs dimension n >= 2");
        CrossSection cs;
        cs.kind_ = Kind::sphere;
        cs.n_ = n;
        return cs;
    }
    /// Explicit spectrum (eigenvalue <= 0, multiplicity >= 1) of an
    /// n-dimensional cross-section.
    static CrossSection explicit_spectrum(std::vector<std::pair<double, int>> eigs, int n,
                                          double volume = 1.0) {
        if (n < 1) throw ConfigError("cross-section dimension must be >= 1");
        if (eigs.empty()) throw ConfigError("explicit spectrum is empty");
        for (const auto& [v, m] : eigs) {
            if (v > 0.0)
                throw ConfigError("explicit spectrum has a positive eigenvalue " + fmt17(v) +
                                  "; the Laplacian must be non-positive");
            if (m < 1) throw ConfigError("eigenvalue multiplicity must be >= 1");
        }
        std::stable_sort(eigs.begin(), eigs.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        CrossSection cs;
        cs.kind_ = Kind::explicit_list;
        cs.eigs_ = std::move(eigs);
        cs.n_ = n;
        cs.volume_ = volume;
        return cs;
    }

    Kind kind() const { return kind_; }
    /// Cross-section dimension n; the cone has dimension n + 1.
    int dimension() const { return n_; }
    double length() const { return length_; }
    const std::optional<Rational>& length_over_pi() const { return length_over_pi_; }
    const std::vector<std::pair<double, int>>& explicit_eigs() const { return eigs_; }

    double volume() const {
        switch (kind_) {
            case Kind::circle: return length_;
            case Kind::sphere:
                return 2.0 * std::pow(pi, 0.5 * (n_ + 1)) / std::tgamma(0.5 * (n_ + 1));
            case Kind::explicit_list: return volume_;
        }
        return 1.0;
    }

    bool connected() const {
        if (kind_ != Kind::explicit_list) return true;
        return !eigs_.empty() && eigs_.front().first == 0.0 && eigs_.front().second == 1;
    }

private:
    Kind kind_ = Kind::circle;
    double length_ = 2.0 * pi;
    std::optional<Rational> length_over_pi_;
    std::vector<std::pair<double, int>> eigs_;
    int n_ = 1;
    double volume_ = 1.0;
};

namespace detail {

inline long long binomial(long long n, long long k) {
    if (k < 0 || n < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long long r = 1;
    for (long long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace detail

/// Dimension of the degree-l spherical harmonics on S^n.
inline long long spherical_harmonic_dimension(int n, int l) {
    return detail::binomial(n + l, n) - detail::binomial(n + l - 2, n);
}

/// First `max_modes` distinct eigenvalues, sorted non-increasing.
inline std::vector<EigenLevel> eigen_data(const CrossSection& cs, int max_modes) {
    if (max_modes < 1) throw PreconditionError("eigen_data: max_modes must be >= 1");
    std::vector<EigenLevel> out;
    switch (cs.kind()) {
        case CrossSection::Kind::circle: {
            const double w = 2.0 * pi / cs.length();
            for (int k = 0; k < max_modes; ++k) {
                EigenLevel e;
                e.level = k;
                e.multiplicity = k == 0 ? 1 : 2;
                if (cs.length_over_pi()) {
                    // (2 pi k / L)^2 = 4 k^2 / (L/pi)^2
                    const Rational r = *cs.length_over_pi();
                    e.exact = -Rational(4LL * k * k) / (r * r);
                    e.value = to_double(*e.exact);
                } else {
                    e.value = -(w * k) * (w * k);
                }
                out.push_back(e);
            }
            break;
        }
        case CrossSection::Kind::sphere: {
            const int n = cs.dimension();
            for (int l = 0; l < max_modes; ++l) {
                EigenLevel e;
                e.level = l;
                e.exact = Rational(-static_cast<long long>(l) * (l + n - 1));
                e.value = to_double(*e.exact);
                e.multiplicity = static_cast<int>(spherical_harmonic_dimension(n, l));
                out.push_back(e);
            }
            break;
        }
        case CrossSection::Kind::explicit_list: {
            const auto& eigs = cs.explicit_eigs();
            const auto count = std::min<std::size_t>(eigs.size(), static_cast<std::size_t>(max_modes));
            for (std::size_t i = 0; i < count; ++i) {
                EigenLevel e;
                e.level = static_cast<int>(i);
                e.value = eigs[i].first;
                e.multiplicity = eigs[i].second;
                e.exact = recognize_rational(e.value, 1000, 0.0);
                if (!e.exact) e.exact = rational_from_double(e.value);
                out.push_back(e);
            }
            break;
        }
    }
    return out;
}

/// Flattens eigen levels into individual modes (one per eigenfunction slot).
inline std::vector<Mode> make_modes(const CrossSection& cs, int max_modes) {
    std::vector<Mode> modes;
    for (const auto& e : eigen_data(cs, max_modes)) {
        for (int s = 0; s < e.multiplicity; ++s) {
            Mode m;
            m.index = modes.size();
            m.level = e.level;
            m.sub = s;
            m.eigenvalue = e.value;
            m.exact = e.exact;
            switch (cs.kind()) {
                case CrossSection::Kind::circle:
                    m.label = e.level == 0 ? "k=0"
                                           : (s == 0 ? "k=+" : "k=-") + std::to_string(e.level);
                    break;
                case CrossSection::Kind::sphere:
                    m.label = "l=" + std::to_string(e.level) + ",j=" + std::to_string(s);
                    break;
                case CrossSection::Kind::explicit_list:
                    m.label = "i=" + std::to_string(e.level) + ",j=" + std::to_string(s);
                    break;
            }
            modes.push_back(std::move(m));
        }
    }
    return modes;
}

struct WeightWindow {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double gamma) const { return lo < gamma && gamma < hi; }
};

/// sqrt(((n-1)/2)^2 - eigenvalue)
inline double bessel_order(int n, double eigenvalue) {
    const double half = 0.5 * (n - 1);
    return std::sqrt(half * half - eigenvalue);
}

/// Exact Bessel order when the radicand is a perfect rational square.
inline std::optional<Rational> bessel_order_exact(int n, const Rational& eigenvalue) {
    using boost::multiprecision::cpp_int;
    const Rational half = Rational(n - 1) / 2;
    const Rational rad = half * half - eigenvalue;
    if (rad < 0) return std::nullopt;
    const cpp_int num = boost::multiprecision::numerator(rad);
    const cpp_int den = boost::multiprecision::denominator(rad);
    const cpp_int sn = boost::multiprecision::sqrt(num);
    const cpp_int sd = boost::multiprecision::sqrt(den);
    if (sn * sn != num || sd * sd != den) return std::nullopt;
    return Rational(sn) / Rational(sd);
}

/// Open interval ((n-3)/2, min{-1 + sqrt(((n-1)/2)^2 - lambda_1), (n+1)/2})
/// where lambda_1 is the greatest non-zero eigenvalue.
inline WeightWindow weight_window(const CrossSection& cs) {
    if (!cs.connected())
        throw UnsupportedError("weight window is defined for connected cross-sections only");
    const auto levels = eigen_data(cs, 64);
    std::optional<double> lambda1;
    for (const auto& e : levels)
        if (e.value != 0.0) {
            lambda1 = e.value;
            break;
        }
    if (!lambda1) throw PreconditionError("weight window: cross-section has no non-zero eigenvalue");
    const int n = cs.dimension();
    WeightWindow w;
    w.lo = 0.5 * (n - 3);
    w.hi = std::min(-1.0 + bessel_order(n, *lambda1), 0.5 * (n + 1));
    if (!(w.lo < w.hi))
        throw NumericalError("no admissible weight: window (" + fmt17(w.lo) + ", " + fmt17(w.hi) +
                             ") is empty");
    return w;
}

}  // namespace conelab
