#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cmahk/expsum.hpp"

#include <cmath>

using namespace cmahk;

namespace {

// The merged alpha = 1 pair: v = exp(4 x4) cos(2 x2).
ExpSumPotential canonical_pair() {
    ExpTerm t;
    t.amplitude = {0.5, 0.0};
    t.lp = {1.0, 0.0};
    t.lq = {-1.0, 0.0};
    t.l2 = {0.0, -2.0};
    t.lw = {0.0, 2.0};
    return ExpSumPotential({t, t.conjugate_partner()});
}

double closed_form(double x2, double x4) { return std::exp(4.0 * x4) * std::cos(2.0 * x2); }

} // namespace

TEST_CASE("canonicalization merges duplicates and drops zero amplitudes") {
    ExpTerm t;
    t.amplitude = {0.25, 0.0};
    t.lp = {1.0, 0.0};
    ExpTerm zero = t;
    zero.amplitude = {0.0, 0.0};
    zero.lp = {2.0, 0.0};
    ExpSumPotential pot({t, t, zero});
    REQUIRE(pot.size() == 1);
    CHECK(pot.terms()[0].amplitude == Complex{0.5, 0.0});
}

TEST_CASE("eval matches the closed form of the canonical pair") {
    const auto pot = canonical_pair();
    CHECK(eval(pot, {}) == doctest::Approx(1.0).epsilon(1e-14));

    const double pi = 4.0 * std::atan(1.0);
    CHECK(std::abs(eval(pot, {Complex{0.3, pi / 4.0}, Complex{0.0, 0.0}})) < 1e-14);

    for (double x2 : {-0.7, 0.11, 0.5}) {
        for (double x4 : {-0.4, 0.0, 0.25}) {
            const CoordPoint at{Complex{0.2, x2}, Complex{-0.1, x4}};
            CHECK(eval(pot, at) == doctest::Approx(closed_form(x2, x4)).epsilon(1e-13));
        }
    }
}

TEST_CASE("derivatives match hand values at the origin") {
    const auto pot = canonical_pair();
    CHECK(std::abs(derivative(pot, {1, 0, 0, 0}, {})) < 1e-15);
    CHECK(std::abs(derivative(pot, {0, 0, 1, 0}, {}) - Complex{0.0, -2.0}) < 1e-15);
    CHECK(std::abs(derivative(pot, {0, 0, 0, 1}, {}) - Complex{0.0, 2.0}) < 1e-15);
    // d/dp d/dpbar v = -v at every point.
    const CoordPoint at{Complex{0.4, 0.2}, Complex{0.1, -0.3}};
    CHECK(std::abs(derivative(pot, {1, 1, 0, 0}, at) + eval(pot, at)) < 1e-13);
}

TEST_CASE("jet table agrees with single derivatives and is conjugation-consistent") {
    const auto pot = canonical_pair();
    const CoordPoint at{Complex{0.15, -0.4}, Complex{0.3, 0.2}};
    const VJet vj = jet(pot, at, 3);
    REQUIRE(vj.order() == 3);
    CHECK(vj.reality_gap() < 1e-14);
    for (const WirtingerIndex idx :
         {WirtingerIndex{0, 0, 0, 0}, WirtingerIndex{1, 0, 0, 0}, WirtingerIndex{1, 1, 0, 0},
          WirtingerIndex{0, 1, 1, 0}, WirtingerIndex{2, 0, 0, 1}, WirtingerIndex{1, 1, 1, 0}}) {
        CHECK(std::abs(vj.at(idx) - derivative(pot, idx, at)) < 1e-12);
        CHECK(std::abs(vj.at(idx) - std::conj(vj.at(idx.conjugated()))) < 1e-12);
    }
    CHECK(vj.at({0, 0, 0, 0}).real() == doctest::Approx(eval(pot, at)).epsilon(1e-14));
}

TEST_CASE("term_scale is the amplitude-magnitude sum") {
    const auto pot = canonical_pair();
    CHECK(term_scale(pot, {}) == doctest::Approx(1.0).epsilon(1e-15));
    // exp(4 x4) growth carries through the scale.
    CHECK(term_scale(pot, {Complex{0.0, 0.0}, Complex{0.0, 1.0}}) ==
          doctest::Approx(std::exp(4.0)).epsilon(1e-13));
}

TEST_CASE("overflowing exponents raise range errors") {
    const auto pot = canonical_pair();
    CHECK_THROWS_AS(eval(pot, {Complex{0.0, 0.0}, Complex{0.0, 200.0}}), std::range_error);
    CHECK_THROWS_AS(jet(pot, {Complex{0.0, 0.0}, Complex{0.0, 200.0}}, 2), std::range_error);
}

TEST_CASE("conjugation check identifies unpaired terms") {
    const auto pot = canonical_pair();
    CHECK(conjugation_check(pot).pass);

    ExpSumPotential broken({pot.terms()[0]});
    const ConjugationReport cr = conjugation_check(broken);
    CHECK(!cr.pass);
    REQUIRE(cr.unpaired.size() == 1);
    CHECK(cr.unpaired[0] == 0);
    // At x2 = 0.5 the surviving term is genuinely complex.
    CHECK_THROWS_AS(eval(broken, {Complex{0.0, 0.5}, Complex{0.0, 0.0}}), std::runtime_error);
}

TEST_CASE("a self-conjugate term needs no partner") {
    ExpTerm t;
    t.amplitude = {1.0, 0.0};
    t.lp = {1.0, 0.0};
    t.lq = {1.0, 0.0};
    t.l2 = {0.5, 0.0};
    t.lw = {0.5, 0.0};
    ExpSumPotential pot({t});
    CHECK(conjugation_check(pot).pass);
    CHECK(eval(pot, {Complex{0.5, 0.0}, Complex{0.0, 0.0}}) ==
          doctest::Approx(std::exp(1.0)).epsilon(1e-14));
}
