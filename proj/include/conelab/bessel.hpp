#pragma once

// Separation-of-variables oracle for the heat equation on the straight model
// cone (0,1] x cross-section: radial eigenfunctions x^{-(n-1)/2} J_nu(k x) with
// k fixed by the outer boundary condition at x = 1.

#include "conelab/cone_geometry.hpp"
#include "conelab/quadrature.hpp"

#include <cmath>
#include <functional>

namespace conelab {

enum class OuterBC { dirichlet, neumann };

inline std::string to_string(OuterBC bc) { return bc == OuterBC::dirichlet ? "dirichlet" : "neumann"; }

inline double bessel_j(double nu, double x) { return std::cyl_bessel_j(nu, x); }

inline double bessel_j_prime(double nu, double x) {
    if (x == 0.0) return nu == 1.0 ? 0.5 : 0.0;
    return nu / x * bessel_j(nu, x) - bessel_j(nu + 1.0, x);
}

/// One radial eigenfunction phi(x) = x^{-c} J_nu(k x), c = (n-1)/2. k = 0 marks the
/// constant eigenfunction of the zero mode under a Neumann condition.
struct RadialEigen {
    double k = 0.0;
    double nu = 0.0;
    double c = 0.0;
    int n = 1;

    double operator()(double x) const {
        if (k == 0.0) return 1.0;
        return std::pow(x, -c) * bessel_j(nu, k * x);
    }

    /// int_0^1 phi^2 x^n dx.
    double norm2() const {
        if (k == 0.0) return 1.0 / (n + 1);
        const double j = bessel_j(nu, k), jp = bessel_j_prime(nu, k);
        return 0.5 * (jp * jp + (1.0 - nu * nu / (k * k)) * j * j);
    }

    double decay_rate() const { return k * k; }
};

namespace detail {

// Boundary function whose zeros are the admissible k.
inline double outer_condition(OuterBC bc, double nu, double c, double k) {
    if (bc == OuterBC::dirichlet) return bessel_j(nu, k);
    return -c * bessel_j(nu, k) + k * bessel_j_prime(nu, k);
}

inline double outer_condition_dk(OuterBC bc, double nu, double c, double k) {
    const double j = bessel_j(nu, k), jp = bessel_j_prime(nu, k);
    if (bc == OuterBC::dirichlet) return jp;
    const double jpp = -jp / k - (1.0 - nu * nu / (k * k)) * j;
    return -c * jp + jp + k * jpp;
}

}  // namespace detail

/// First `count` positive k solving the outer condition, bracketed by a scan on
/// (0, k_max] and polished by Newton.
inline std::vector<double> bessel_roots(int n, double eigenvalue, OuterBC bc, int count, double k_max = 400.0) {
    if (count < 0) throw PreconditionError("bessel_roots: count must be >= 0");
    const double nu = bessel_order(n, eigenvalue);
    const double c = 0.5 * (n - 1);
    std::vector<double> roots;
    const double step = 0.05;
    double a = 1e-3;
    double fa = detail::outer_condition(bc, nu, c, a);
    while (static_cast<int>(roots.size()) < count && a < k_max) {
        const double b = a + step;
        const double fb = detail::outer_condition(bc, nu, c, b);
        if (fa == 0.0 || fa * fb < 0.0) {
            double lo = a, hi = b, flo = fa;
            for (int it = 0; it < 60 && hi - lo > 1e-10; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = detail::outer_condition(bc, nu, c, mid);
                if (flo * fm <= 0.0) hi = mid;
                else { lo = mid; flo = fm; }
            }
            double k = 0.5 * (lo + hi);
            for (int it = 0; it < 4; ++it) {
                const double d = detail::outer_condition_dk(bc, nu, c, k);
                if (d == 0.0) break;
                const double dk = detail::outer_condition(bc, nu, c, k) / d;
                if (std::abs(dk) > 1e-6) break;
                k -= dk;
            }
            roots.push_back(k);
        }
        a = b;
        fa = fb;
    }
    if (static_cast<int>(roots.size()) < count)
        throw NumericalError("bessel_roots: only " + std::to_string(roots.size()) + " of " + std::to_string(count) +
                             " roots bracketed below k_max = " + fmt17(k_max));
    return roots;
}

/// Eigenfunctions of one mode in increasing decay order; the Neumann zero mode
/// starts with the constant.
inline std::vector<RadialEigen> radial_eigenfunctions(int n, double eigenvalue, OuterBC bc, int count) {
    std::vector<RadialEigen> out;
    const double nu = bessel_order(n, eigenvalue);
    const double c = 0.5 * (n - 1);
    int positive = count;
    if (bc == OuterBC::neumann && eigenvalue == 0.0 && count > 0) {
        out.push_back(RadialEigen{0.0, nu, c, n});
        --positive;
    }
    for (double k : bessel_roots(n, eigenvalue, bc, positive)) out.push_back(RadialEigen{k, nu, c, n});
    return out;
}

/// Coefficients a_j = int u phi_j x^n dx / int phi_j^2 x^n dx.
inline std::vector<double> bessel_project(const std::function<double(double)>& u, const std::vector<RadialEigen>& basis,
                                          int panels = 64, int order = 24) {
    const GaussRule rule = GaussRule::legendre(order);
    std::vector<double> a;
    for (const auto& phi : basis) {
        const double num = rule.integrate_composite(
            [&](double x) { return u(x) * phi(x) * std::pow(x, phi.n); }, 0.0, 1.0, panels);
        a.push_back(num / phi.norm2());
    }
    return a;
}

/// sum_j a_j exp(-k_j^2 t) phi_j(x) at the requested points.
inline std::vector<double> bessel_series_solution(const std::vector<double>& coeffs, int n, double eigenvalue, double t,
                                                  const std::vector<double>& x_points, OuterBC bc, int n_terms) {
    if (n_terms > static_cast<int>(coeffs.size()))
        throw PreconditionError("bessel_series_solution: fewer coefficients than terms");
    const auto basis = radial_eigenfunctions(n, eigenvalue, bc, n_terms);
    std::vector<double> out(x_points.size(), 0.0);
    for (int j = 0; j < n_terms; ++j) {
        const auto& phi = basis[static_cast<std::size_t>(j)];
        const double damp = coeffs[static_cast<std::size_t>(j)] * std::exp(-phi.decay_rate() * t);
        for (std::size_t i = 0; i < x_points.size(); ++i) out[i] += damp * phi(x_points[i]);
    }
    return out;
}

}  // namespace conelab
