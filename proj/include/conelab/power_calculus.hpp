#pragma once

// Desk-scale operator calculus on discretized modes: sectorial bounds,
// randomized R-bound estimates, complex powers by the Dunford integral and
// grid-refinement membership probes for power domains.

#include "conelab/heat_solver.hpp"

#include <Eigen/Eigenvalues>

#include <random>

namespace conelab {

/// Dense operator together with where it came from.
struct OperatorMatrix {
    Eigen::MatrixXcd a;
    std::string mode_label;
    double shift = 0.0;
    std::string provenance;

    int dim() const { return static_cast<int>(a.rows()); }

    static OperatorMatrix dense(Eigen::MatrixXcd m, std::string provenance = "dense") {
        if (m.rows() != m.cols()) throw PreconditionError("operator matrix must be square");
        if (!m.allFinite()) throw DataError("operator matrix has non-finite entries");
        OperatorMatrix op;
        op.a = std::move(m);
        op.provenance = std::move(provenance);
        return op;
    }
};

/// Diagonal d with D L D^{-1} symmetric, for tridiagonals whose off-diagonal
/// products are real and positive; empty otherwise.
inline Eigen::VectorXd symmetrizer(const TridiagonalOperator& L) {
    const int N = L.size();
    Eigen::VectorXd d(N);
    d(0) = 1.0;
    for (int i = 1; i < N; ++i) {
        const Complex q = L.upper(i - 1) / L.lower(i);
        if (std::abs(q.imag()) > 1e-14 * std::abs(q) || !(q.real() > 0.0)) return {};
        d(i) = d(i - 1) * std::sqrt(q.real());
    }
    return d;
}

/// M = c I - L for a discretized mode operator L. With `symmetrize`, M is
/// returned in the diagonal similarity that makes it Hermitian (the discrete
/// analogue of the weighted space where the Laplacian is self-adjoint).
inline OperatorMatrix shifted_mode_matrix(const TridiagonalOperator& L, double c, bool symmetrize = true) {
    OperatorMatrix op;
    op.a = L.affine(c, -1.0).dense();
    op.mode_label = L.mode_label;
    op.shift = c;
    op.provenance = "cI - L, mode " + L.mode_label + ", J=" + std::to_string(L.grid.size()) +
                    ", tau_min=" + fmt17(L.grid.tau_min()) + ", outer=" + to_string(L.outer_bc);
    if (symmetrize) {
        const Eigen::VectorXd d = symmetrizer(L);
        if (d.size() == 0) throw NumericalError("mode operator is not symmetrizable by a diagonal similarity");
        for (int i = 0; i < op.dim(); ++i)
            for (int j = 0; j < op.dim(); ++j)
                if (op.a(i, j) != 0.0) op.a(i, j) *= d(i) / d(j);
        op.a = 0.5 * (op.a + op.a.adjoint()).eval();
        op.provenance += ", symmetrized";
    }
    return op;
}

// ---------------------------------------------------------------------------
// Sectorial probe

struct SectorialReport {
    double K = 0.0;
    double theta = 0.0;
    std::vector<Complex> lambdas;
    std::vector<double> values;  // (1 + |lambda|) ||(M + lambda)^{-1}||
    Complex argmax;
    bool normal = false;         // resolvent norms taken from the spectrum
};

namespace detail {

inline bool is_normal(const Eigen::MatrixXcd& a) {
    const double s = a.norm();
    if (s == 0.0) return true;
    return (a * a.adjoint() - a.adjoint() * a).norm() <= 1e-12 * s * s;
}

inline Eigen::VectorXcd spectrum(const Eigen::MatrixXcd& a) {
    if ((a - a.adjoint()).norm() <= 1e-14 * a.norm()) {
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cast<Complex>();
    }
    const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(a, false);
    return es.eigenvalues();
}

// Distance from w to the closed sector {|arg| <= theta} (a ray for theta = 0).
inline double distance_to_sector(Complex w, double theta) {
    const double r = std::abs(w);
    if (r == 0.0) return 0.0;
    const double a = std::abs(std::arg(w));
    if (a <= theta) return 0.0;
    if (a - theta >= pi / 2) return r;
    return r * std::sin(a - theta);
}

inline std::vector<Complex> sector_samples(double theta, int samples, double r_max) {
    std::vector<Complex> lam{0.0};
    std::vector<double> radii;
    const double lo = -6.0, hi = std::log10(r_max);
    for (int i = 0; i < samples; ++i) radii.push_back(std::pow(10.0, lo + (hi - lo) * i / std::max(1, samples - 1)));
    for (double r : radii) lam.emplace_back(r, 0.0);
    if (theta > 0.0)
        for (double r : radii) {
            lam.push_back(std::polar(r, theta));
            lam.push_back(std::polar(r, -theta));
        }
    return lam;
}

}  // namespace detail

/// Spectrum test: -M's spectrum must keep a distance above the eigenvalue
/// accuracy (64 eps ||M||) from the closed sector S_theta.
inline void check_sectorial(const Eigen::VectorXcd& eig, double theta, double scale) {
    const double tol = 64 * std::numeric_limits<double>::epsilon() * std::max(1.0, scale);
    for (Eigen::Index i = 0; i < eig.size(); ++i)
        if (detail::distance_to_sector(-eig(i), theta) <= tol)
            throw NumericalError("not sectorial at angle theta = " + fmt17(theta) + ": eigenvalue " +
                                 fmt17(eig(i).real()) + (eig(i).imag() >= 0 ? "+" : "") + fmt17(eig(i).imag()) +
                                 "i of M lies in -S_theta");
}

/// K = max over sampled lambda in S_theta of (1 + |lambda|) ||W (M + lambda)^{-1} W^{-1}||_2,
/// lambda = 0 plus log-spaced |lambda| in [1e-6, r_max] on the real axis and the
/// rays +-theta. `weight` (W) defaults to the identity.
inline SectorialReport sectorial_probe(const OperatorMatrix& M, double theta, int samples = 200, double r_max = 1e6,
                                       const Eigen::MatrixXcd* weight = nullptr) {
    if (!(theta >= 0.0 && theta < pi)) throw PreconditionError("sectorial_probe: theta must lie in [0, pi)");
    if (samples < 2) throw PreconditionError("sectorial_probe: need at least 2 samples per ray");
    const auto& a = M.a;
    const Eigen::VectorXcd eig = detail::spectrum(a);
    check_sectorial(eig, theta, eig.cwiseAbs().maxCoeff());
    SectorialReport rep;
    rep.theta = theta;
    rep.lambdas = detail::sector_samples(theta, samples, r_max);
    rep.values.assign(rep.lambdas.size(), 0.0);
    rep.normal = weight == nullptr && detail::is_normal(a);
    Eigen::MatrixXcd winv;
    if (weight) {
        if (weight->rows() != a.rows() || weight->cols() != a.cols())
            throw PreconditionError("sectorial_probe: weight has the wrong shape");
        winv = weight->partialPivLu().inverse();
    }
    const Eigen::Index N = a.rows();
    parallel_for(rep.lambdas.size(), [&](std::size_t i) {
        const Complex lam = rep.lambdas[i];
        double rnorm;
        if (rep.normal) {
            double dmin = std::numeric_limits<double>::infinity();
            for (Eigen::Index k = 0; k < eig.size(); ++k) dmin = std::min(dmin, std::abs(eig(k) + lam));
            rnorm = 1.0 / dmin;
        } else {
            Eigen::MatrixXcd shifted = a;
            shifted.diagonal().array() += lam;
            Eigen::MatrixXcd R = shifted.partialPivLu().solve(Eigen::MatrixXcd::Identity(N, N));
            if (weight) R = (*weight) * R * winv;
            const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(R);
            rnorm = svd.singularValues()(0);
        }
        rep.values[i] = (1.0 + std::abs(lam)) * rnorm;
    });
    for (std::size_t i = 0; i < rep.values.size(); ++i)
        if (rep.values[i] > rep.K) {
            rep.K = rep.values[i];
            rep.argmax = rep.lambdas[i];
        }
    if (!std::isfinite(rep.K)) throw NumericalError("not sectorial at angle theta: unbounded resolvent sample");
    return rep;
}

struct ShiftLadderResult {
    double shift = 0.0;
    SectorialReport report;
    std::vector<double> tried;
};

/// First c in {0, c0, 2 c0, 4 c0, ...} for which c I - L passes sectorial_probe.
inline ShiftLadderResult shift_ladder(const TridiagonalOperator& L, double theta, double c0 = 1.0 / 16,
                                      int max_steps = 40, int samples = 200, double r_max = 1e6) {
    ShiftLadderResult out;
    for (int i = -1; i < max_steps; ++i) {
        const double c = i < 0 ? 0.0 : c0 * std::ldexp(1.0, i);
        out.tried.push_back(c);
        try {
            out.report = sectorial_probe(shifted_mode_matrix(L, c), theta, samples, r_max);
            out.shift = c;
            return out;
        } catch (const NumericalError&) {
        }
    }
    throw NumericalError("shift ladder: no sectorial shift up to c = " + fmt17(c0 * std::ldexp(1.0, max_steps - 1)));
}

// ---------------------------------------------------------------------------
// R-bound estimate

struct RBoundReport {
    double estimate = 0.0;
    bool lower_bound = true;
    std::string disclaimer = "Monte-Carlo lower estimate of the R-bound, not a proof of R-sectoriality";
    double K = 0.0;
    int N = 0;
    int trials = 0;
    std::uint64_t seed = 0;
};

/// Family T_k = lambda_k (M + lambda_k)^{-1}; per trial the ratio
/// (E||sum eps_k T_k x_k||^2)^{1/2} / (E||sum eps_k x_k||^2)^{1/2}, exact over all
/// 2^N sign patterns. Returns the maximum over trials.
inline double r_ratio(const Eigen::MatrixXcd& M, const std::vector<Complex>& lambdas,
                      const std::vector<Eigen::VectorXcd>& xs) {
    const int N = static_cast<int>(lambdas.size());
    if (N < 1 || N > 12) throw UnsupportedError("exact Rademacher expectation supports 1 <= N <= 12");
    const Eigen::Index d = M.rows();
    std::vector<Eigen::VectorXcd> ys;
    for (int k = 0; k < N; ++k) {
        Eigen::MatrixXcd s = M;
        s.diagonal().array() += lambdas[static_cast<std::size_t>(k)];
        ys.push_back(lambdas[static_cast<std::size_t>(k)] * s.partialPivLu().solve(xs[static_cast<std::size_t>(k)]));
    }
    double num = 0.0, den = 0.0;
    for (unsigned pattern = 0; pattern < (1u << N); ++pattern) {
        Eigen::VectorXcd a = Eigen::VectorXcd::Zero(d), b = Eigen::VectorXcd::Zero(d);
        for (int k = 0; k < N; ++k) {
            const double eps = (pattern >> k) & 1u ? -1.0 : 1.0;
            a += eps * ys[static_cast<std::size_t>(k)];
            b += eps * xs[static_cast<std::size_t>(k)];
        }
        num += a.squaredNorm();
        den += b.squaredNorm();
    }
    if (den == 0.0) return 0.0;
    return std::sqrt(num / den);
}

inline RBoundReport r_bound_estimate(const OperatorMatrix& M, double theta, int N, int trials, std::uint64_t seed) {
    if (N > 12) throw UnsupportedError("r_bound_estimate: exact sign expectation needs N <= 12 (got " +
                                       std::to_string(N) + ")");
    if (N < 1 || trials < 1) throw PreconditionError("r_bound_estimate: N and trials must be >= 1");
    const SectorialReport sp = sectorial_probe(M, theta);
    RBoundReport rep;
    rep.K = sp.K;
    rep.N = N;
    rep.trials = trials;
    rep.seed = seed;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> logr(-3.0, 6.0), ang(-theta, theta), g(-1.0, 1.0);
    const Eigen::Index d = M.a.rows();
    for (int t = 0; t < trials; ++t) {
        std::vector<Complex> lam;
        std::vector<Eigen::VectorXcd> xs;
        for (int k = 0; k < N; ++k) {
            lam.push_back(std::polar(std::pow(10.0, logr(rng)), theta > 0.0 ? ang(rng) : 0.0));
            Eigen::VectorXcd x(d);
            for (Eigen::Index i = 0; i < d; ++i) x(i) = Complex(g(rng), g(rng));
            xs.push_back(x / x.norm());
        }
        rep.estimate = std::max(rep.estimate, r_ratio(M.a, lam, xs));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Dunford integral

struct ContourSpec {
    double rho = 0.0;          // 0: half the smallest |eigenvalue|
    double theta = 3 * pi / 4;
    int n_quad = 64;           // Gauss points per segment
    double panel_width = 2.0;  // segment length in log |lambda| along the rays
    double r_max = 0.0;        // 0: chosen from the tail bound
    double tail_tol = 1e-10;
};

/// Nodes mu_j and weights w_j with A^z ~ sum_j w_j mu_j^z (mu_j - A)^{-1}, for
/// -1 <= Re z < 0. The path is Gamma_{rho,theta} written in mu = -lambda: in
/// along arg mu = pi - theta, clockwise round |mu| = rho through arg 0, out
/// along arg mu = -(pi - theta). The branch cut of mu^z is the negative axis.
struct DunfordQuadrature {
    std::vector<Complex> nodes, weights;
    double rho = 0.0, theta = 0.0, r_max = 0.0, tail_bound = 0.0;
    int n_quad = 0, panels = 0;
};

inline DunfordQuadrature dunford_quadrature(Complex z, double min_abs_eig, double norm_bound, const ContourSpec& spec) {
    if (!(z.real() < 0.0)) throw PreconditionError("Dunford quadrature needs Re z < 0");
    if (!(spec.theta > 0.0 && spec.theta < pi)) throw PreconditionError("contour: 0 < theta < pi");
    if (spec.n_quad < 2) throw PreconditionError("contour: n_quad must be >= 2");
    DunfordQuadrature q;
    q.theta = spec.theta;
    q.rho = spec.rho > 0.0 ? spec.rho : 0.5 * min_abs_eig;
    if (!(q.rho > 0.0) || q.rho >= min_abs_eig)
        throw PreconditionError("contour radius must lie strictly below the smallest |eigenvalue|");
    const double phi = pi - spec.theta;
    const double grow = std::exp(std::abs(z.imag()) * phi);
    // Tail of both rays beyond R: (1/pi) C e^{|Im z| phi} R^{Re z} / |Re z|, C = R / (R - ||A||).
    auto tail = [&](double R) {
        const double C = R / (R - norm_bound);
        return C * grow * std::pow(R, z.real()) / (pi * std::abs(z.real()));
    };
    double R = spec.r_max;
    if (R <= 0.0) {
        R = std::max({2.0 * norm_bound, 10.0 * q.rho, 1.0});
        const double need = std::pow(spec.tail_tol * pi * std::abs(z.real()) / (2.0 * grow), 1.0 / z.real());
        R = std::max(R, need);
    }
    if (!(R > q.rho) || !(R > norm_bound)) throw NumericalError("contour: increase R_max (R_max below ||A||)");
    q.r_max = R;
    q.tail_bound = tail(R);
    if (!(q.tail_bound <= spec.tail_tol))
        throw NumericalError("contour tail bound " + fmt17(q.tail_bound) + " exceeds " + fmt17(spec.tail_tol) +
                             "; increase R_max");
    const double S = std::log(R / q.rho);
    if (S > 2000.0) throw NumericalError("contour: log(R_max / rho) too large; Re z too close to 0");
    q.panels = std::max(1, static_cast<int>(std::ceil(S / spec.panel_width)));
    q.n_quad = spec.n_quad;
    const GaussRule rule = GaussRule::legendre(spec.n_quad);
    const Complex two_pi_i(0.0, 2.0 * pi);
    const Complex up = std::polar(1.0, phi), down = std::polar(1.0, -phi);
    const double width = S / q.panels;
    for (int p = 0; p < q.panels; ++p) {
        const double a = p * width;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const double s = a + 0.5 * width * (rule.nodes[k] + 1.0);
            const double r = q.rho * std::exp(s);
            const double w = 0.5 * width * rule.weights[k] * r;  // dr = r ds
            // inward along the upper ray: -int_rho^R ... e^{i phi} dr
            q.nodes.push_back(r * up);
            q.weights.push_back(-w * up / two_pi_i);
            q.nodes.push_back(r * down);
            q.weights.push_back(w * down / two_pi_i);
        }
    }
    // arc mu = rho e^{i alpha}, alpha from phi down to -phi
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double alpha = phi * rule.nodes[k];
        const Complex mu = std::polar(q.rho, alpha);
        const Complex dmu = Complex(0.0, 1.0) * mu;
        q.nodes.push_back(mu);
        q.weights.push_back(-phi * rule.weights[k] * dmu / two_pi_i);
    }
    return q;
}

struct DunfordResult {
    Eigen::MatrixXcd matrix;
    Complex z;
    int integer_part = 0;       // A^z = A^q A^{z - q}
    bool experimental = false;  // Re z = 0 (imaginary power through A A^{it - 1})
    DunfordQuadrature quadrature;
};

namespace detail {

// z = q + w with q integer >= 0 and Re w < 0 (-1 <= Re w whenever q > 0).
inline std::pair<int, Complex> split_power(Complex z) {
    if (z.real() < 0.0) return {0, z};
    const int q = static_cast<int>(std::floor(z.real())) + 1;
    return {q, z - static_cast<double>(q)};
}

inline Complex principal_power(Complex mu, Complex z) { return std::exp(z * std::log(mu)); }

}  // namespace detail

/// A^z by the Dunford integral; Re z >= 0 goes through A^q A^{z-q}.
inline DunfordResult dunford_power(const OperatorMatrix& M, Complex z, const ContourSpec& spec = {}) {
    const auto& a = M.a;
    const Eigen::Index N = a.rows();
    const Eigen::VectorXcd eig = detail::spectrum(a);
    double min_abs = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < eig.size(); ++i) {
        min_abs = std::min(min_abs, std::abs(eig(i)));
        if (std::abs(std::arg(eig(i))) >= pi - spec.theta)
            throw NumericalError("dunford_power: spectrum leaves the sector |arg| < pi - theta");
    }
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
    const double norm = svd.singularValues()(0);
    const auto [q, w] = detail::split_power(z);
    DunfordResult res;
    res.z = z;
    res.integer_part = q;
    res.experimental = z.real() == 0.0 && z.imag() != 0.0;
    res.quadrature = dunford_quadrature(w, min_abs, norm, spec);
    const auto& Q = res.quadrature;
    // fixed chunking keeps the reduction order independent of the worker count
    constexpr std::size_t chunks = 16;
    Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Identity(N, N);
    for (int i = 0; i < q; ++i) rhs = a * rhs;
    std::vector<Eigen::MatrixXcd> partial(chunks, Eigen::MatrixXcd::Zero(N, N));
    parallel_for(chunks, [&](std::size_t c) {
        for (std::size_t j = c; j < Q.nodes.size(); j += chunks) {
            Eigen::MatrixXcd s = -a;
            s.diagonal().array() += Q.nodes[j];
            partial[c] += (Q.weights[j] * detail::principal_power(Q.nodes[j], w)) * s.partialPivLu().solve(rhs);
        }
    });
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(N, N);
    for (const auto& p : partial) out += p;
    res.matrix = out;
    return res;
}

/// M^z v for M = c I - L with L tridiagonal; resolvents by Thomas solves.
inline Eigen::VectorXcd dunford_apply(const TridiagonalOperator& L, double c, Complex z, const Eigen::VectorXcd& v,
                                      const ContourSpec& spec = {}, DunfordQuadrature* info = nullptr) {
    const TridiagonalOperator M = L.affine(c, -1.0);
    const Eigen::VectorXd d = symmetrizer(L);
    if (d.size() == 0) throw NumericalError("dunford_apply: mode operator is not symmetrizable");
    // Real symmetric tridiagonal form of M for the spectrum.
    const int N = M.size();
    Eigen::VectorXd diag(N), sub(std::max(N - 1, 0));
    for (int i = 0; i < N; ++i) diag(i) = M.diag(i).real();
    for (int i = 1; i < N; ++i) sub(i - 1) = std::sqrt((M.lower(i) * M.upper(i - 1)).real());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd eig = es.eigenvalues();
    if (!(eig(0) > 0.0)) throw NumericalError("dunford_apply: shifted operator is not positive (c too small)");
    const double norm = eig(N - 1);
    const auto [q, w] = detail::split_power(z);
    const DunfordQuadrature Q = dunford_quadrature(w, eig(0), norm, spec);
    if (info) *info = Q;
    // integer part first: the truncation error then scales with ||M^q v||, not ||M||^q ||v||
    Eigen::VectorXcd rhs = v;
    for (int i = 0; i < q; ++i) rhs = M.apply(rhs);
    constexpr std::size_t chunks = 16;
    std::vector<Eigen::VectorXcd> partial(chunks, Eigen::VectorXcd::Zero(N));
    parallel_for(chunks, [&](std::size_t ch) {
        for (std::size_t j = ch; j < Q.nodes.size(); j += chunks) {
            // (mu - M)^{-1} = ((mu - c) I + L)^{-1}
            const TridiagonalOperator s = L.affine(Q.nodes[j] - c, 1.0);
            partial[ch] += (Q.weights[j] * detail::principal_power(Q.nodes[j], w)) * s.solve(rhs);
        }
    });
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(N);
    for (const auto& p : partial) out += p;
    return out;
}

// ---------------------------------------------------------------------------
// Power-domain probe

enum class ProbeVerdict { member, non_member, inconclusive };

inline std::string to_string(ProbeVerdict v) {
    switch (v) {
        case ProbeVerdict::member: return "member";
        case ProbeVerdict::non_member: return "non-member";
        case ProbeVerdict::inconclusive: return "inconclusive";
    }
    return "?";
}

struct PowerProbeConfig {
    CrossSection cross_section = CrossSection::circle(2 * pi);
    int max_modes = 3;
    OuterBC outer_bc = OuterBC::neumann;
    double shift = 1.0;
    double gamma = -0.5;
    LogGrid base_grid{-6.0, 257};
    int levels = 3;
    double extend = 2.0;        // tau_min moves out by this much per level
    double stabilize = 1.2;     // member if every level ratio lies in [1/stabilize, stabilize]
    double blow_up = 5.0;       // non-member if every level ratio is >= blow_up
    ContourSpec contour;
    Realization realization = Realization::constants_extended();
};

struct PowerProbeResult {
    ProbeVerdict verdict = ProbeVerdict::inconclusive;
    Complex z;
    std::vector<double> norms, ratios, h, tau_min;
    double stabilize = 1.2, blow_up = 5.0;
};

using FieldSampler = std::function<RadialField(const LogGrid&)>;

/// Samples a cut-off power-log term on any grid.
template <class T>
FieldSampler term_sampler(const AsymptoticsTerm<T>& term, const CrossSection& cs, int max_modes) {
    return [term, cs, max_modes](const LogGrid& g) {
        RadialField f = RadialField::zeros(g, cs, max_modes);
        add_terms(f, Expansion<T>{term});
        return f;
    };
}

/// ||M_h^z u_h|| in H^{0,gamma} over a refinement ladder (h halves, tau_min
/// moves out). The discrete operator realizes DD: the inner closure selects the
/// regular root and constants are kept.
inline PowerProbeResult power_domain_probe(const FieldSampler& field, Complex z, const PowerProbeConfig& cfg) {
    if (cfg.realization.kind != Realization::Kind::dd && cfg.realization.kind != Realization::Kind::power_dd)
        throw UnsupportedError("power_domain_probe discretizes the DD realization only");
    if (!(z.real() > 0.0)) throw PreconditionError("power_domain_probe: need Re z > 0");
    if (cfg.levels < 2) throw PreconditionError("power_domain_probe: need at least 2 refinement levels");
    PowerProbeResult res;
    res.z = z;
    res.stabilize = cfg.stabilize;
    res.blow_up = cfg.blow_up;
    LogGrid g = cfg.base_grid;
    for (int level = 0; level < cfg.levels; ++level) {
        if (level > 0) g = g.refined(cfg.extend);
        const RadialField u = field(g);
        u.check_finite();
        double total = 0.0;
        for (std::size_t m = 0; m < u.mode_count(); ++m) {
            if (u.values[m].cwiseAbs().maxCoeff() == 0.0) continue;
            const auto L = assemble_mode_operator(u.n, u.modes[m].eigenvalue, g, cfg.outer_bc, u.modes[m].label);
            const Eigen::VectorXcd core = u.values[m].head(L.size());
            Eigen::VectorXcd out = Eigen::VectorXcd::Zero(g.size());
            out.head(L.size()) = dunford_apply(L, cfg.shift, z, core, cfg.contour);
            const double nm = weighted_l2(out, g, u.n, cfg.gamma, u.volume);
            total += nm * nm;
        }
        res.norms.push_back(std::sqrt(total));
        res.h.push_back(g.h());
        res.tau_min.push_back(g.tau_min());
    }
    bool stable = true, grows = true;
    for (std::size_t i = 1; i < res.norms.size(); ++i) {
        const double r = res.norms[i - 1] > 0.0 ? res.norms[i] / res.norms[i - 1] : (res.norms[i] > 0.0 ? INFINITY : 1.0);
        res.ratios.push_back(r);
        stable = stable && r <= cfg.stabilize && r >= 1.0 / cfg.stabilize;
        grows = grows && r >= cfg.blow_up;
    }
    res.verdict = stable ? ProbeVerdict::member : grows ? ProbeVerdict::non_member : ProbeVerdict::inconclusive;
    return res;
}

}  // namespace conelab
