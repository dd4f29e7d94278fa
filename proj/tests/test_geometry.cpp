#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cmahk/geometry.hpp"
#include "cmahk/spectrum.hpp"
#include "support/oracles.hpp"
#include "support/points.hpp"

#include <cmath>

using namespace cmahk;

namespace {

ExpSumPotential fixture() { return expand(testsupport::two_mode_fixture()); }

// v = 1, v_p = v_pbar = 1, v_2 = i, v_2bar = -i at the origin, from two
// self-conjugate terms.
ExpSumPotential frozen_jet_potential() {
    ExpTerm t1;
    t1.amplitude = {0.5, 0.0};
    t1.lp = {2.0, 0.0};
    t1.lq = {2.0, 0.0};
    ExpTerm t2;
    t2.amplitude = {0.5, 0.0};
    t2.l2 = {0.0, 2.0};
    t2.lw = {0.0, -2.0};
    return ExpSumPotential({t1, t2});
}

ExpSumPotential constant_one() {
    ExpTerm t;
    t.amplitude = {1.0, 0.0};
    return ExpSumPotential({t});
}

} // namespace

TEST_CASE("translational characteristic derivatives") {
    const PhiDerivs d = phi_derivs(1.5);
    CHECK(d.p == 1.0);
    CHECK(d.pbar == 1.0);
    CHECK(d.z2 == 1.5);
    CHECK(d.z2bar == 1.5);
}

TEST_CASE("partner coefficients of the zero psi jet") {
    const auto pot = constant_one();
    for (double nu : {0.0, 2.0}) {
        const VJet psij = psi_jet(pot, {}, 1);
        const PartnerResult pr = partner_coeffs(phi_derivs(nu), psij);
        CHECK(std::abs(pr.coeffs.A - Complex{1.0, 0.0}) < 1e-15);
        CHECK(std::abs(pr.coeffs.C - Complex{nu, 0.0}) < 1e-15);
        CHECK(pr.coeffs.B == doctest::Approx(nu * nu).epsilon(1e-14));
        CHECK(pr.denominator == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(pr.identity_gap < 1e-14);
    }
}

TEST_CASE("partner coefficients tie to the metric data: A = a/c, C = conj(b)/c") {
    const auto pot = fixture();
    const double nu = 0.0;
    int checked = 0;
    Lcg64 rng(555);
    for (int k = 0; k < 200 && checked < 20; ++k) {
        RealChartPoint pt;
        for (int i = 0; i < 4; ++i) pt.x[i] = rng.uniform(-0.8, 0.8);
        const CoordPoint at = pt.to_coord();
        if (eval(pot, at) <= 1e-6 * term_scale(pot, at)) continue;
        const VJet vj = jet(pot, at, 1);
        const MetricABC m = abc(vj, nu);
        const PartnerResult pr = partner_coeffs(phi_derivs(nu), psi_jet_from(vj, 1));
        CHECK(std::abs(pr.coeffs.A - m.a / m.c) < 1e-10 * (1.0 + std::abs(pr.coeffs.A)));
        CHECK(std::abs(pr.coeffs.C - std::conj(m.b) / m.c) <
              1e-10 * (1.0 + std::abs(pr.coeffs.C)));
        CHECK(pr.identity_gap < 1e-10 * (1.0 + std::abs(pr.B_direct)));
        ++checked;
    }
    CHECK(checked == 20);
}

TEST_CASE("determining residual vanishes for the translational characteristic") {
    PartnerCoeffs pc;
    pc.A = {0.3, 0.1};
    pc.B = 0.7;
    pc.C = {-0.2, 0.4};
    CHECK(std::abs(determining_residual(pc)) == 0.0);

    PhiSecondDerivs phi2;
    phi2.ppbar = {1.0, 0.0};
    CHECK(std::abs(determining_residual(pc, phi2) + Complex{pc.B + 2.0, 0.0}) < 1e-15);
}

TEST_CASE("metric data frozen values") {
    const auto pot = frozen_jet_potential();
    const VJet vj = jet(pot, {}, 1);
    REQUIRE(std::abs(vj.at({0, 0, 0, 0}) - Complex{1.0, 0.0}) < 1e-15);
    REQUIRE(std::abs(vj.at({1, 0, 0, 0}) - Complex{1.0, 0.0}) < 1e-15);
    REQUIRE(std::abs(vj.at({0, 0, 1, 0}) - Complex{0.0, 1.0}) < 1e-15);

    const MetricABC m = abc(vj, 0.0);
    CHECK(std::abs(m.a - Complex{3.0, 0.0}) < 1e-14);
    CHECK(std::abs(m.b - Complex{0.0, 1.0}) < 1e-14);
    CHECK(m.c == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(singular_locus_value(vj, 0.0) == doctest::Approx(-5.0).epsilon(1e-14));

    // nu enters a and b linearly.
    const MetricABC m2 = abc(vj, 2.0);
    CHECK(std::abs(m2.a - (m.a - Complex{0.0, 1.0} * (-2.0))) < 1e-14);
    CHECK(std::abs(m2.b - (m.b + Complex{2.0, 0.0})) < 1e-14);
}

TEST_CASE("the singular family locus vanishes identically") {
    SingularFamily fam;
    fam.alpha = {1.2, 0.8};
    fam.F = {0.6, 0.4};
    fam.nu = 0.7;
    const auto pot = singular_family(fam);
    Lcg64 rng(909);
    for (int k = 0; k < 30; ++k) {
        const RealChartPoint pt{{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                                 rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)}};
        const VJet vj = jet(pot, pt.to_coord(), 1);
        const MetricABC m = abc(vj, fam.nu);
        CHECK(std::abs(singular_locus_value(vj, fam.nu)) < 1e-12 * m.c * m.c);
        const SingularityResidual sr = singularity_residual(vj, fam.nu);
        CHECK(sr.relative() < 1e-12);
    }
}

TEST_CASE("singularity residual at the two-mode origin is the frozen ratio") {
    const auto pot = fixture();
    const VJet vj = jet(pot, {}, 1);
    const SingularityResidual sr = singularity_residual(vj, 0.0);
    CHECK(sr.value == doctest::Approx(960.0).epsilon(1e-13));
    CHECK(sr.scale == doctest::Approx(2240.0).epsilon(1e-13));
    CHECK(sr.relative() == doctest::Approx(3.0 / 7.0).epsilon(1e-13));
}

TEST_CASE("guards reject inadmissible points") {
    const auto pot = fixture();
    // v(p = 0.9i) = cos(1.8) + 2 cos(3.6) < 0.
    CHECK_THROWS_AS(metric_at(pot, 0.0, RealChartPoint{{0.0, 0.9, 0.0, 0.0}}),
                    PositivityError);
    // The origin has v = 4 > 0 but locus = -3840: no coframe there.
    CHECK_THROWS_AS(coframe_at(pot, 0.0, RealChartPoint{{}}), SignatureError);
    CHECK(singular_locus_value(pot, 0.0, RealChartPoint{{}}) ==
          doctest::Approx(-3840.0).epsilon(1e-13));

    const auto sing = singular_family({});
    CHECK_THROWS_AS(metric_at(sing, 0.0, RealChartPoint{{0.1, 0.2, 0.3, 0.1}}),
                    NearLocusError);
}

TEST_CASE("two-form packing is antisymmetric") {
    TwoForm f;
    for (int k = 0; k < 6; ++k) f.comp[k] = static_cast<double>(k + 1);
    CHECK(TwoForm::index(0, 1) == 0);
    CHECK(TwoForm::index(1, 3) == 4);
    CHECK(TwoForm::index(2, 3) == 5);
    CHECK(f.at(0, 1) == 1.0);
    CHECK(f.at(1, 0) == -1.0);
    CHECK(f.at(2, 2) == 0.0);
    CHECK(f.at(3, 1) == -5.0);
}

TEST_CASE("admissible region geometry: signature, reconstruction, triple, Legendre") {
    const auto pot = fixture();
    const double nu = 0.0;
    Box search;
    search.lo = {-2.0, -2.0, -2.0, -2.0};
    search.hi = {2.0, 2.0, 2.0, 2.0};
    const auto pts = testsupport::admissible_points(pot, nu, search, 12);
    REQUIRE(pts.size() == 12);

    for (const auto& pt : pts) {
        const RealMetric4 g = metric_at(pot, nu, pt);
        const auto ev = g.eigenvalues();
        CHECK(ev[0] > 0.0);

        // Reconstruction from the coframe.
        const Coframe f = coframe_at(pot, nu, pt);
        const auto lr = f.l_real();
        const auto mr = f.m_real();
        double worst = 0.0, scale = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                const double rec = 2.0 * std::real(lr[i] * std::conj(lr[j])) +
                                   2.0 * std::real(mr[i] * std::conj(mr[j]));
                worst = std::max(worst, std::abs(rec - g.g[i][j]));
                scale = std::max(scale, std::abs(g.g[i][j]));
            }
        CHECK(worst < 1e-10 * scale);

        // Inverse really inverts; the residual floor grows with the
        // condition of g, so scale by |g| |g^-1|.
        const auto ginv = g.inverse();
        double gmax = 0.0, ginvmax = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                gmax = std::max(gmax, std::abs(g.g[i][j]));
                ginvmax = std::max(ginvmax, std::abs(ginv[i][j]));
            }
        const double cond_scale = std::max(1.0, gmax * ginvmax);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                double s = 0.0;
                for (int k = 0; k < 4; ++k) s += ginv[i][k] * g.g[k][j];
                CHECK(std::abs(s - (i == j ? 1.0 : 0.0)) < 1e-12 * cond_scale);
            }

        // 2-form triple: real, mutually orthogonal, norms (2, 1/2, 1/2).
        const KahlerTriple kt = kahler_triple(f);
        CHECK(kt.reality_residue < 1e-12);
        const auto inner = [&](const TwoForm& x, const TwoForm& y) {
            double s = 0.0;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    double yup = 0.0;
                    for (int a = 0; a < 4; ++a)
                        for (int b = 0; b < 4; ++b)
                            yup += ginv[i][a] * ginv[j][b] * y.at(a, b);
                    s += 0.5 * x.at(i, j) * yup;
                }
            return s;
        };
        const TwoForm* th[3] = {&kt.theta0, &kt.theta_plus, &kt.theta_minus};
        CHECK(inner(*th[0], *th[0]) == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(inner(*th[1], *th[1]) == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(inner(*th[2], *th[2]) == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(std::abs(inner(*th[0], *th[1])) < 1e-9);
        CHECK(std::abs(inner(*th[0], *th[2])) < 1e-9);
        CHECK(std::abs(inner(*th[1], *th[2])) < 1e-9);

        // In the admissible region |A| < 1, so the Legendre form is negative.
        const VJet psij = psi_jet(pot, pt.to_coord(), 2);
        const PartnerResult pr = partner_coeffs(phi_derivs(nu), psi_jet_from(jet(pot, pt.to_coord(), 1), 1));
        CHECK(std::abs(pr.coeffs.A) < 1.0);
        const LegendreExistence le = legendre_existence_residual(psij);
        CHECK(le.value < 0.0);
        CHECK(legendre_cross_gap(psij, pr.coeffs.A) < 1e-9);
    }
}

TEST_CASE("metric jet derivatives match finite differences") {
    const auto pot = expand(testsupport::gentle_fixture());
    const double nu = 0.0;
    Box search;
    search.lo = {-1.0, -1.0, -1.0, -1.0};
    search.hi = {1.0, 1.0, 1.0, 1.0};
    const auto pts = testsupport::tame_points(pot, nu, search, 3);
    REQUIRE(pts.size() == 3);

    for (const auto& pt : pts) {
        const MetricJet mj = metric_jet_at(pot, nu, pt);
        // Relative error is judged per derivative order.
        double gscale = 1.0, hscale = 1.0;
        for (int k = 0; k < 10; ++k) {
            for (int i = 0; i < 4; ++i) gscale = std::max(gscale, std::abs(mj.comp[k].grad[i]));
            for (int i = 0; i < 10; ++i) hscale = std::max(hscale, std::abs(mj.comp[k].hess[i]));
        }
        for (int mu = 0; mu < 4; ++mu)
            for (int eta = mu; eta < 4; ++eta) {
                const auto field = [&](const RealChartPoint& x) {
                    return Complex{metric_at(pot, nu, x).g[mu][eta], 0.0};
                };
                const FdDerivs fd = fd_oracle(field, pt, 1e-4);
                const Jet2& comp = mj.at(mu, eta);
                for (int i = 0; i < 4; ++i)
                    CHECK(std::abs(comp.grad[i] - fd.grad[i]) < 1e-6 * gscale);
                for (int k = 0; k < 10; ++k)
                    CHECK(std::abs(comp.hess[k] - fd.hess[k]) < 1e-6 * hscale);
            }
    }
}

TEST_CASE("metric is invariant under rescaling of v") {
    const auto pot = fixture();
    std::vector<ExpTerm> scaled = pot.terms();
    for (auto& t : scaled) t.amplitude *= 3.7;
    const ExpSumPotential pot2{scaled};

    Box search;
    search.lo = {-2.0, -2.0, -2.0, -2.0};
    search.hi = {2.0, 2.0, 2.0, 2.0};
    const auto pts = testsupport::admissible_points(pot, 0.0, search, 3);
    REQUIRE(pts.size() == 3);
    for (const auto& pt : pts) {
        const RealMetric4 g1 = metric_at(pot, 0.0, pt);
        const RealMetric4 g2 = metric_at(pot2, 0.0, pt);
        double scale = 0.0, worst = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                scale = std::max(scale, std::abs(g1.g[i][j]));
                worst = std::max(worst, std::abs(g1.g[i][j] - g2.g[i][j]));
            }
        CHECK(worst < 1e-11 * scale);
    }
}
