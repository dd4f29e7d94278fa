#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cmahk/jets.hpp"
#include "cmahk/spectrum.hpp"
#include "support/oracles.hpp"

#include <cmath>

using namespace cmahk;

namespace {

double max_jet_gap(const TaylorScalar& ts, const FdDerivs& fd, double scale) {
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(ts.grad(i) - fd.grad[i]));
    for (int k = 0; k < 10; ++k)
        worst = std::max(worst, std::abs(ts.hess_packed(k) - fd.hess[k]));
    return worst / scale;
}

ExpSumPotential fixture() { return expand(testsupport::two_mode_fixture()); }

} // namespace

TEST_CASE("fd_oracle reproduces an analytic gradient and Hessian") {
    const auto field = [](const RealChartPoint& x) {
        return Complex{std::sin(x.x[0]) * std::cos(x.x[1]) + x.x[2] * x.x[2] * x.x[3], 0.0};
    };
    const RealChartPoint at{{0.3, -0.2, 0.5, 0.7}};
    const FdDerivs fd = fd_oracle(field, at, 1e-4);
    CHECK(std::abs(fd.grad[0] - std::cos(0.3) * std::cos(-0.2)) < 1e-7);
    CHECK(std::abs(fd.grad[2] - 2.0 * 0.5 * 0.7) < 1e-7);
    CHECK(std::abs(fd.grad[3] - 0.25) < 1e-7);
    CHECK(std::abs(fd.hess[sym4_index(0, 1)] + std::cos(0.3) * std::sin(-0.2)) < 1e-7);
    CHECK(std::abs(fd.hess[sym4_index(2, 3)] - 1.0) < 1e-7);
    CHECK(std::abs(fd.hess[sym4_index(1, 3)]) < 1e-7);
}

TEST_CASE("coordinate lifts and arithmetic match finite differences") {
    const RealChartPoint at{{0.4, -0.1, 0.2, 0.3}};
    const TaylorScalar x1 = lift_coordinate(0, at);
    CHECK(x1.value() == Complex{0.4, 0.0});
    CHECK(x1.grad(0) == Complex{1.0, 0.0});
    CHECK(x1.grad(1) == Complex{0.0, 0.0});

    // f = exp(x1 x2) / (2 + x3) + sqrt(1 + x4^2), assembled in jet arithmetic.
    const TaylorScalar x2 = lift_coordinate(1, at);
    const TaylorScalar x3 = lift_coordinate(2, at);
    const TaylorScalar x4 = lift_coordinate(3, at);
    const TaylorScalar f = exp(x1 * x2) / (TaylorScalar::constant({2.0, 0.0}) + x3) +
                           sqrt(TaylorScalar::constant({1.0, 0.0}) + x4 * x4);

    const auto field = [](const RealChartPoint& x) {
        return Complex{std::exp(x.x[0] * x.x[1]) / (2.0 + x.x[2]) +
                           std::sqrt(1.0 + x.x[3] * x.x[3]),
                       0.0};
    };
    const FdDerivs fd = fd_oracle(field, at, 1e-4);
    CHECK(std::abs(f.value() - field(at)) < 1e-14);
    CHECK(max_jet_gap(f, fd, 1.0) < 1e-7);
}

TEST_CASE("log then exp round-trips a positive jet") {
    const RealChartPoint at{{0.4, -0.1, 0.2, 0.3}};
    const TaylorScalar u = TaylorScalar::constant({3.0, 0.0}) + lift_coordinate(0, at) +
                           lift_coordinate(2, at) * lift_coordinate(1, at);
    const TaylorScalar back = exp(log(u));
    TaylorScalar diff = back - u;
    CHECK(diff.max_abs() < 1e-14 * u.max_abs());
    TaylorScalar sq = sqrt(u) * sqrt(u) - u;
    CHECK(sq.max_abs() < 1e-14 * u.max_abs());
}

TEST_CASE("lifted v derivatives agree with the finite-difference oracle") {
    const auto pot = fixture();
    const RealChartPoint at{{0.12, -0.31, 0.05, 0.22}};
    const VJet vj = jet(pot, at.to_coord(), 4);

    for (const WirtingerIndex idx : {WirtingerIndex{0, 0, 0, 0}, WirtingerIndex{1, 0, 0, 0},
                                     WirtingerIndex{1, 1, 0, 0}, WirtingerIndex{0, 1, 0, 1}}) {
        const TaylorScalar ts = lift_derivative_of_v(vj, idx);
        CHECK(std::abs(ts.value() - vj.at(idx)) < 1e-12 * (1.0 + std::abs(vj.at(idx))));

        const auto field = [&](const RealChartPoint& x) {
            return derivative(pot, idx, x.to_coord());
        };
        const FdDerivs fd = fd_oracle(field, at, 1e-4);
        CAPTURE(idx.kp);
        CAPTURE(idx.kq);
        CHECK(max_jet_gap(ts, fd, ts.max_abs() + 1.0) < 1e-6);
    }

    const TaylorScalar direct = lift_derivative_of_v(pot, {1, 0, 0, 0}, at);
    const TaylorScalar viajet = lift_derivative_of_v(vj, {1, 0, 0, 0});
    TaylorScalar gap = direct - viajet;
    CHECK(gap.max_abs() < 1e-13 * viajet.max_abs());
}

TEST_CASE("psi jet is the log composition of the v jet") {
    const auto pot = fixture();
    const CoordPoint at{Complex{0.12, -0.31}, Complex{0.05, 0.22}};
    const VJet vj = jet(pot, at, 3);
    const VJet psij = psi_jet(pot, at, 3);
    const VJet psij2 = psi_jet_from(vj, 3);

    const double v = vj.at({0, 0, 0, 0}).real();
    REQUIRE(v > 0.0);
    CHECK(std::abs(psij.at({0, 0, 0, 0}) - Complex{-std::log(v), 0.0}) < 1e-13);

    // First order: psi_i = -v_i / v.
    for (const WirtingerIndex idx : {WirtingerIndex{1, 0, 0, 0}, WirtingerIndex{0, 0, 1, 0}}) {
        CHECK(std::abs(psij.at(idx) + vj.at(idx) / v) < 1e-12 * (1.0 + std::abs(psij.at(idx))));
    }
    // Second order: psi_ij = -v_ij/v + v_i v_j / v^2.  Constituents reach ~1e4
    // here, so the comparison is relative to them.
    const Complex vp = vj.at({1, 0, 0, 0});
    const Complex vq = vj.at({0, 1, 0, 0});
    const double c2scale = std::abs(vj.at({1, 1, 0, 0}) / v) + std::abs(vp * vq / (v * v)) + 1.0;
    CHECK(std::abs(psij.at({1, 1, 0, 0}) + vj.at({1, 1, 0, 0}) / v - vp * vq / (v * v)) <
          1e-13 * c2scale);

    // Both construction paths coincide through order 3.
    for (int kp = 0; kp <= 3; ++kp)
        for (int kq = 0; kp + kq <= 3; ++kq)
            for (int k2 = 0; kp + kq + k2 <= 3; ++k2)
                for (int kw = 0; kp + kq + k2 + kw <= 3; ++kw) {
                    const WirtingerIndex idx{kp, kq, k2, kw};
                    CHECK(std::abs(psij.at(idx) - psij2.at(idx)) < 1e-12);
                }

    // v(p = 0.9i, z2 = 0) = cos(1.8) + 2 cos(3.6) < 0.
    CHECK_THROWS_AS(psi_jet(pot, {Complex{0.0, 0.9}, Complex{0.0, 0.0}}, 2), std::domain_error);
}

TEST_CASE("psi jet derivatives agree with finite differences of -log v") {
    const auto pot = fixture();
    const RealChartPoint at{{0.12, -0.31, 0.05, 0.22}};
    const VJet psij = psi_jet(pot, at.to_coord(), 2);

    const auto field = [&](const RealChartPoint& x) {
        return Complex{-std::log(eval(pot, x.to_coord())), 0.0};
    };
    const FdDerivs fd = fd_oracle(field, at, 1e-4);

    // Chain rule to the real chart: d/dx1 = d/dp + d/dpbar, d/dx2 = i(d/dp - d/dpbar).
    const Complex I{0.0, 1.0};
    const Complex gx1 = psij.at({1, 0, 0, 0}) + psij.at({0, 1, 0, 0});
    const Complex gx2 = I * (psij.at({1, 0, 0, 0}) - psij.at({0, 1, 0, 0}));
    const Complex gx3 = psij.at({0, 0, 1, 0}) + psij.at({0, 0, 0, 1});
    const Complex gx4 = I * (psij.at({0, 0, 1, 0}) - psij.at({0, 0, 0, 1}));
    // Central differences of -log v carry an h^2 f''' truncation term, which
    // the steep x3 oscillation amplifies; compare relative to the gradient.
    CHECK(std::abs(gx1 - fd.grad[0]) < 1e-4 * (1.0 + std::abs(gx1)));
    CHECK(std::abs(gx2 - fd.grad[1]) < 1e-4 * (1.0 + std::abs(gx2)));
    CHECK(std::abs(gx3 - fd.grad[2]) < 1e-4 * (1.0 + std::abs(gx3)));
    CHECK(std::abs(gx4 - fd.grad[3]) < 1e-4 * (1.0 + std::abs(gx4)));
}
