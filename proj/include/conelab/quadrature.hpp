#pragma once

// Gauss-Legendre rules of runtime order, built from Boost's Legendre zeros.

#include "conelab/core.hpp"

#include <boost/math/special_functions/legendre.hpp>

namespace conelab {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1], ascending
    std::vector<double> weights;

    static GaussRule legendre(int n) {
        if (n < 1) throw PreconditionError("Gauss-Legendre rule needs n >= 1");
        GaussRule r;
        const auto zeros = boost::math::legendre_p_zeros<double>(n);  // non-negative half
        for (double z : zeros) {
            const double dp = boost::math::legendre_p_prime<double>(n, z);
            const double w = 2.0 / ((1.0 - z * z) * dp * dp);
            r.nodes.push_back(z);
            r.weights.push_back(w);
            if (z != 0.0) {
                r.nodes.push_back(-z);
                r.weights.push_back(w);
            }
        }
        std::vector<std::size_t> idx(r.nodes.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return r.nodes[a] < r.nodes[b]; });
        GaussRule sorted;
        for (auto i : idx) {
            sorted.nodes.push_back(r.nodes[i]);
            sorted.weights.push_back(r.weights[i]);
        }
        return sorted;
    }

    std::size_t size() const { return nodes.size(); }

    /// int_a^b f with the rule mapped affinely.
    template <class F>
    auto integrate(F&& f, double a, double b) const {
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        decltype(f(mid)) acc{};
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(mid + half * nodes[i]);
        return acc * half;
    }

    /// Composite rule over `panels` equal sub-intervals.
    template <class F>
    auto integrate_composite(F&& f, double a, double b, int panels) const {
        const double step = (b - a) / panels;
        decltype(f(a)) acc{};
        for (int p = 0; p < panels; ++p) acc += integrate(f, a + p * step, a + (p + 1) * step);
        return acc;
    }
};

}  // namespace conelab
