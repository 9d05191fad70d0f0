#include "conelab/symbol_algebra.hpp"

#include <gtest/gtest.h>

using namespace conelab;

namespace {

using RPoly = Polynomial<Rational>;

RPoly rp(std::initializer_list<long long> c) {
    std::vector<Rational> v;
    for (auto x : c) v.emplace_back(x);
    return RPoly(v);
}

struct Expected {
    Rational rho;
    int max_log;
    std::string label;
};

void expect_in_strip(const PoleSet& ps, std::vector<Expected> want) {
    auto got = ps.in_strip();
    ASSERT_EQ(got.size(), want.size());
    for (const auto& w : want) {
        const auto it = std::find_if(got.begin(), got.end(), [&](const PoleEntry& e) {
            return e.exact && *e.exact == w.rho && e.label == w.label;
        });
        ASSERT_NE(it, got.end()) << "missing rho=" << w.rho << " in " << w.label;
        EXPECT_EQ(it->max_log_power, w.max_log) << "rho=" << w.rho << " " << w.label;
    }
}

}  // namespace

TEST(ConormalSymbol, LaplacianCircle) {
    const auto spec = laplacian_spec<Rational>(make_modes(CrossSection::circle(2 * pi), 3), 1);
    EXPECT_EQ(conormal_symbol(spec, 3), rp({-4, 0, 1}));  // k=+2
    EXPECT_THROW(conormal_symbol(spec, 99), LookupError);
}

TEST(ConormalSymbol, LaplacianSphere) {
    const auto spec = laplacian_spec<Rational>(make_modes(CrossSection::sphere(2), 2), 2);
    EXPECT_EQ(conormal_symbol(spec, 0), rp({0, -1, 1}));
}

TEST(ConormalSymbol, IdentityCoefficient) {
    const auto spec = explicit_spec<Rational>(make_modes(CrossSection::circle(2 * pi), 1), 1, 1,
                                              {{Rational(1)}}, {});
    EXPECT_EQ(conormal_symbol(spec, 0), rp({1}));
}

TEST(TaylorSymbols, StraightAndWarped) {
    const auto modes = make_modes(CrossSection::circle(2 * pi), 2);
    const auto straight = laplacian_spec<Rational>(modes, 1);
    auto f = taylor_symbols(straight, 1);
    EXPECT_EQ(f[0], conormal_symbol(straight, 1));
    EXPECT_TRUE(f[1].is_zero());
    const auto warped = warped_laplacian_spec<Rational>(modes, 1);
    f = taylor_symbols(warped, 1);
    EXPECT_EQ(f[1], rp({-1}));
}

TEST(TaylorSymbols, MissingOrderNamed) {
    auto spec = laplacian_spec<Rational>(make_modes(CrossSection::circle(2 * pi), 1), 1);
    spec.n_taylor = 0;
    try {
        taylor_symbols(spec, 0);
        FAIL();
    } catch (const PreconditionError& e) {
        EXPECT_NE(std::string(e.what()).find("order 1"), std::string::npos);
    }
}

TEST(RecursiveSymbols, StraightLaplacianHasZeroG1) {
    const auto spec = laplacian_spec<Rational>(make_modes(CrossSection::circle(2 * pi), 3), 1);
    const auto g = recursive_symbols(spec, 3);
    EXPECT_EQ(g[0], RationalFamily<Rational>::reciprocal(rp({-4, 0, 1})));
    EXPECT_TRUE(g[1].is_zero());
}

TEST(RecursiveSymbols, OrderOneReciprocal) {
    const auto spec = explicit_spec<Rational>(make_modes(CrossSection::circle(2 * pi), 1), 1, 1,
                                              {{Rational(0)}, {Rational(1)}}, {});
    const auto g = recursive_symbols(spec, 0);
    ASSERT_EQ(g.size(), 1u);
    EXPECT_EQ(g[0], RationalFamily<Rational>::reciprocal(rp({0, 1})));
}

TEST(RecursiveSymbols, WarpedHandOracle) {
    // f_0 = l^2 - 1, f_1 = -1 on mode k=+1. By hand:
    // g_1 = -(1/((l-1)^2 - 1)) * (-1) * 1/(l^2 - 1) = 1/(l (l-2) (l-1) (l+1)).
    const auto spec = warped_laplacian_spec<Rational>(make_modes(CrossSection::circle(2 * pi), 2), 1);
    const auto g = recursive_symbols(spec, 1);
    const RPoly den = rp({0, 1}) * rp({-2, 1}) * rp({-1, 1}) * rp({1, 1});
    EXPECT_EQ(den, rp({0, 2, -1, -2, 1}));
    EXPECT_EQ(g[1], RationalFamily<Rational>::reciprocal(den));
}

TEST(RecursiveSymbols, DegenerateRejected) {
    const auto spec = explicit_spec<Rational>(make_modes(CrossSection::circle(2 * pi), 1), 1, 2, {}, {});
    EXPECT_THROW(recursive_symbols(spec, 0), NumericalError);
}

TEST(PoleSet, CircleGammaMinusHalf) {
    const auto spec = laplacian_spec<Rational>(make_modes(CrossSection::circle(2 * pi), 3), 1);
    const auto ps = pole_set(spec, -0.5, spec.all_modes());
    EXPECT_DOUBLE_EQ(ps.left, -0.5);
    EXPECT_DOUBLE_EQ(ps.right, 1.5);
    expect_in_strip(ps, {{Rational(0), 1, "k=0"}, {Rational(1), 0, "k=+1"}, {Rational(1), 0, "k=-1"}});
    const auto groups = ps.grouped();
    ASSERT_EQ(groups.size(), 2u);
    EXPECT_EQ(groups[1].modes.size(), 2u);
}

TEST(PoleSet, SphereGammaZero) {
    const auto spec = laplacian_spec<Rational>(make_modes(CrossSection::sphere(2), 3), 2);
    const auto ps = pole_set(spec, 0.0, spec.all_modes());
    expect_in_strip(ps, {{Rational(0), 0, "l=0,j=0"}, {Rational(1), 0, "l=0,j=0"}});
}

TEST(PoleSet, ConstantSymbolHasNoPoles) {
    const auto spec = explicit_spec<Rational>(make_modes(CrossSection::circle(2 * pi), 1), 1, 1,
                                              {{Rational(1)}}, {});
    EXPECT_TRUE(pole_set(spec, 0.0, {0}).entries.empty());
}

TEST(PoleSet, MatchesClosedFormFloating) {
    for (double L : {2 * pi, pi, 4 * pi, 3.0}) {
        const auto cs = CrossSection::circle(L);
        const auto spec = laplacian_spec<Complex>(make_modes(cs, 6), 1);
        const auto ps = pole_set(spec, -0.5, spec.all_modes());
        for (const auto& e : ps.entries) {
            const double nu = bessel_order(1, spec.modes[e.mode].eigenvalue);
            const double d = std::min(std::abs(e.rho.real() - nu), std::abs(e.rho.real() + nu));
            EXPECT_LT(d, 1e-12);
        }
    }
}

TEST(PoleSet, StripTranslatesWithGamma) {
    const auto spec = laplacian_spec<Rational>(make_modes(CrossSection::circle(2 * pi), 4), 1);
    for (int i = 0; i <= 20; ++i) {
        const double gamma = -1.0 + 0.1 * i;
        const auto ps = pole_set(spec, gamma, spec.all_modes());
        const Rational right = Rational(1) - rational_from_double(gamma);
        EXPECT_EQ(ps.right, to_double(right));
        EXPECT_EQ(ps.left, to_double(right - 2));
        for (const auto& e : ps.entries)
            EXPECT_EQ(e.in_strip, *e.exact >= right - 2 && *e.exact < right);
    }
}

TEST(PoleSetPower, KOneIdentical) {
    const auto spec = laplacian_spec<Rational>(make_modes(CrossSection::sphere(2), 3), 2);
    const auto a = pole_set(spec, 0.0, spec.all_modes());
    const auto b = pole_set_power(spec, 0.0, 1, spec.all_modes());
    ASSERT_EQ(a.entries.size(), b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        EXPECT_EQ(a.entries[i].rho, b.entries[i].rho);
        EXPECT_EQ(a.entries[i].max_log_power, b.entries[i].max_log_power);
        EXPECT_EQ(a.entries[i].in_strip, b.entries[i].in_strip);
    }
}

TEST(PoleSetPower, CircleSquared) {
    const auto spec = laplacian_spec<Rational>(make_modes(CrossSection::circle(2 * pi), 4), 1);
    const auto ps = pole_set_power(spec, -0.5, 2, spec.all_modes());
    EXPECT_DOUBLE_EQ(ps.left, -2.5);
    expect_in_strip(ps, {{Rational(0), 1, "k=0"},  {Rational(-2), 1, "k=0"},
                         {Rational(1), 0, "k=+1"}, {Rational(-1), 1, "k=+1"},
                         {Rational(1), 0, "k=-1"}, {Rational(-1), 1, "k=-1"},
                         {Rational(0), 0, "k=+2"}, {Rational(-2), 0, "k=+2"},
                         {Rational(0), 0, "k=-2"}, {Rational(-2), 0, "k=-2"},
                         {Rational(1), 0, "k=+3"}, {Rational(1), 0, "k=-3"}});
}

TEST(PoleSetPower, SphereSquaredModeZero) {
    const auto spec = laplacian_spec<Rational>(make_modes(CrossSection::sphere(2), 1), 2);
    const auto ps = pole_set_power(spec, 0.0, 2, {0});
    expect_in_strip(ps, {{Rational(-2), 0, "l=0,j=0"}, {Rational(-1), 0, "l=0,j=0"},
                         {Rational(0), 0, "l=0,j=0"}, {Rational(1), 0, "l=0,j=0"}});
}

TEST(PoleSetPower, WarpedUnsupported) {
    const auto spec = warped_laplacian_spec<Rational>(make_modes(CrossSection::circle(2 * pi), 2), 1);
    EXPECT_THROW(pole_set_power(spec, -0.5, 2, spec.all_modes()), UnsupportedError);
    EXPECT_TRUE(pole_set(spec, -0.5, spec.all_modes()).convention_pending);
}

TEST(Ellipticity, WarnsOnVanishingLeadingCoefficient) {
    const auto spec = explicit_spec<Rational>(make_modes(CrossSection::circle(2 * pi), 1), 1, 2,
                                              {{Rational(1)}, {Rational(1)}}, {});
    EXPECT_EQ(ellipticity_warnings(spec).size(), 1u);
    const auto lap = laplacian_spec<Rational>(make_modes(CrossSection::circle(2 * pi), 2), 1);
    EXPECT_TRUE(ellipticity_warnings(lap).empty());
}
