#include "conelab/mellin_sobolev.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace conelab;

namespace {

RadialField power_field(const LogGrid& g, double a, CutoffKind ck, int n = 1) {
    const auto cs = n == 1 ? CrossSection::circle(2 * pi) : CrossSection::sphere(n);
    RadialField u = RadialField::zeros(g, cs, 2);
    add_terms(u, Expansion<Complex>{{Complex(-a, 0.0), 0, 0, 1.0}}, ck);
    return u;
}

}  // namespace

TEST(MellinNorm, ClosedFormPiOver32) {
    // node at tau = -log 2 so the sharp cut-off edge falls on the grid
    const LogGrid g(-20 * std::log(2.0), 20 * 1024 + 1);
    const auto u = power_field(g, 1.0, CutoffKind::sharp);
    MellinOptions opt;
    opt.cutoff = CutoffKind::sharp;
    const double expected = std::sqrt(pi / 32.0);
    EXPECT_NEAR(expected, 0.313329, 1e-6);
    EXPECT_NEAR(mellin_norm(u, 0, 0.0, 2.0, opt) / expected, 1.0, 1e-3);
}

TEST(MellinNorm, ZeroField) {
    const LogGrid g(-8.0, 257);
    EXPECT_EQ(mellin_norm(RadialField::zeros(g, CrossSection::circle(2 * pi), 3), 2, 0.0), 0.0);
}

TEST(MellinNorm, Scaling) {
    const LogGrid g(-8.0, 513);
    auto u = power_field(g, 0.7, CutoffKind::smooth);
    add_terms(u, Expansion<Complex>{{Complex(-1.0, 0.0), 0, 1, Complex(0.3, -0.2)}});
    const Complex c(-2.5, 1.25);
    for (int s = 0; s <= 2; ++s) {
        const double a = mellin_norm(u, s, -0.3);
        const double b = mellin_norm(c * u, s, -0.3);
        EXPECT_NEAR(b / (std::abs(c) * a), 1.0, 1e-13);
    }
}

TEST(MellinNorm, RejectsUnsupportedAndBadData) {
    const LogGrid g(-8.0, 129);
    auto u = power_field(g, 1.0, CutoffKind::smooth);
    EXPECT_THROW(mellin_norm(u, 1, 0.0, 3.0), UnsupportedError);
    EXPECT_NO_THROW(mellin_norm(u, 0, 0.0, 3.0));
    add_terms(u, Expansion<Complex>{{Complex(-1.0, 0.0), 0, 1, 1.0}});
    EXPECT_THROW(mellin_norm(u, 0, 0.0, 3.0), UnsupportedError);
    u.values[0](5) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(mellin_norm(u, 0, 0.0), DataError);
}

TEST(MellinNorm, LpNormMatchesClosedForm) {
    // sharp x^1, p = 3, n = 1, gamma = 0: norm^3 = 2 pi int_0^{1/2} x^{3 (1+1)} dx/x = 2 pi / (6 * 64)
    const LogGrid g(-12 * std::log(2.0), 12 * 1024 + 1);
    const auto u = power_field(g, 1.0, CutoffKind::sharp);
    MellinOptions opt;
    opt.cutoff = CutoffKind::sharp;
    EXPECT_NEAR(mellin_norm(u, 0, 0.0, 3.0, opt) / std::cbrt(2 * pi / 384.0), 1.0, 1e-3);
}

TEST(MellinNorm, SecondOrderGridConvergence) {
    std::vector<double> norms;
    for (int J : {401, 801, 1601}) norms.push_back(mellin_norm(power_field(LogGrid(-10.0, J), 0.5, CutoffKind::smooth), 1, 0.0));
    const double order = std::log2((norms[0] - norms[1]) / (norms[1] - norms[2]));
    EXPECT_GE(order, 1.7);
    EXPECT_LE(order, 2.3);
}

TEST(MellinNorm, MonotoneInGamma) {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> expo(0.2, 2.0), coef(-1.0, 1.0);
    const LogGrid g(-8.0, 513);
    for (int trial = 0; trial < 20; ++trial) {
        RadialField u = RadialField::zeros(g, CrossSection::circle(2 * pi), 2);
        for (int k = 0; k < 3; ++k)
            add_terms(u, Expansion<Complex>{{Complex(-expo(rng), 0.0), 0, 0, Complex(coef(rng), coef(rng))}},
                      CutoffKind::sharp);
        MellinOptions opt;
        opt.cutoff = CutoffKind::sharp;
        double prev = 0.0;
        for (int i = 0; i <= 10; ++i) {
            const double v = mellin_norm(u, 0, -1.0 + 0.2 * i, 2.0, opt);
            EXPECT_GE(v, prev * (1 - 1e-14));
            prev = v;
        }
    }
}

TEST(MellinNorm, NonMemberBlowsUpUnderDomainExtension) {
    // x^{-1}, n = 1, gamma = 1: Re(-rho) + (n+1)/2 - gamma = -1 < 0
    const AsymptoticsTerm<Complex> t{Complex(1.0, 0.0), 0, 0, 1.0};
    EXPECT_EQ(membership_probe(t, 1, 1.0).verdict, Membership::Verdict::non_member);
    double prev = 0.0;
    for (double tmin : {-4.0, -8.0, -16.0}) {
        const LogGrid g = LogGrid::with_spacing(tmin, 1.0 / 64);
        RadialField u = RadialField::zeros(g, CrossSection::circle(2 * pi), 1);
        add_terms(u, Expansion<Complex>{t});
        const double v = mellin_norm(u, 0, 1.0);
        if (prev > 0.0) {
            EXPECT_GE(v / prev, 10.0);
        }
        prev = v;
    }
}

TEST(MembershipProbe, Examples) {
    using V = Membership::Verdict;
    EXPECT_EQ(membership_probe(AsymptoticsTerm<Complex>{-0.2, 0, 0, 1.0}, 1, 0.5).verdict, V::member);
    EXPECT_EQ(membership_probe(AsymptoticsTerm<Complex>{1.0, 0, 0, 1.0}, 1, 0.5).verdict, V::non_member);
    EXPECT_EQ(membership_probe(AsymptoticsTerm<Rational>{0, 1, 0, 1}, 1, -0.5).verdict, V::member);
    EXPECT_EQ(membership_probe(AsymptoticsTerm<Rational>{make_rational(1, 2), 0, 0, 1}, 1, 0.5).verdict,
              V::boundary);
}

TEST(Cutoff, SmoothProfile) {
    EXPECT_EQ(smooth_cutoff(0.3), 1.0);
    EXPECT_EQ(smooth_cutoff(1.0), 0.0);
    EXPECT_NEAR(smooth_cutoff(0.75), 0.5, 1e-15);
    double prev = 1.0;
    for (int i = 0; i <= 100; ++i) {
        const double v = smooth_cutoff(0.5 + 0.005 * i);
        EXPECT_LE(v, prev);
        prev = v;
    }
}

TEST(Cutoff, NormChoiceIsEquivalent) {
    // Different cut-offs give comparable norms (equivalence, not equality).
    const LogGrid g(-10.0, 1001);
    RadialField u = RadialField::zeros(g, CrossSection::circle(2 * pi), 2);
    add_terms(u, Expansion<Complex>{{Complex(-0.5, 0.0), 0, 0, 1.0}, {Complex(-1.0, 0.0), 0, 1, 1.0}}, CutoffKind::smooth,
              false);
    MellinOptions sharp;
    sharp.cutoff = CutoffKind::sharp;
    const double a = mellin_norm(u, 0, 0.0), b = mellin_norm(u, 0, 0.0, 2.0, sharp);
    EXPECT_GT(a / b, 0.5);
    EXPECT_LT(a / b, 2.0);
}
