#include "cmahk/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cmahk {

namespace {

constexpr Complex kI{0.0, 1.0};

// Exponent 4-vector of one branch.  s_signed is +s for the F branch and -s
// for the G branch; the two formulas are one expression under s -> -s.
ExpTerm branch_term(const Complex& amplitude, const Complex& alpha, double s_signed, double nu) {
    const Complex ac = std::conj(alpha);
    const Complex lp = alpha * (1.0 + s_signed);
    const Complex lq = ac * (s_signed - 1.0);
    const Complex l2 = -kI * (alpha * alpha * (1.0 + s_signed) * (1.0 + s_signed) + 1.0 +
                              kI * nu * alpha * (1.0 + s_signed));
    const Complex lw = kI * (ac * ac * (s_signed - 1.0) * (s_signed - 1.0) + 1.0 -
                             kI * nu * ac * (s_signed - 1.0));
    return {amplitude, lp, lq, l2, lw};
}

} // namespace

SpectrumData normalized(const SpectrumData& sd) {
    SpectrumData out;
    out.nu = sd.nu;
    for (std::size_t i = 0; i < sd.modes.size(); ++i) {
        const Mode& m = sd.modes[i];
        const double m2 = std::norm(m.alpha);
        if (m2 < 1.0 && 1.0 - 1.0 / m2 < -1e-12) {
            throw std::domain_error("mode " + std::to_string(i) + ": |alpha| = " +
                                    std::to_string(std::sqrt(m2)) +
                                    " < 1 lies outside the admissible spectrum");
        }
        auto match = std::find_if(out.modes.begin(), out.modes.end(),
                                  [&](const Mode& o) { return o.alpha == m.alpha; });
        if (match != out.modes.end()) {
            match->F += m.F;
            match->G += m.G;
        } else {
            out.modes.push_back(m);
        }
    }
    return out;
}

double mode_s(const Complex& alpha) {
    const double m2 = std::norm(alpha);
    const double t = 1.0 - 1.0 / m2;
    if (t < -1e-12) {
        throw std::domain_error("|alpha| = " + std::to_string(std::sqrt(m2)) +
                                " < 1 lies outside the admissible spectrum");
    }
    return std::sqrt(std::max(t, 0.0));
}

ExpSumPotential expand(const SpectrumData& sd) {
    const SpectrumData norm = normalized(sd);
    std::vector<ExpTerm> terms;
    terms.reserve(norm.modes.size() * 4);
    for (const Mode& m : norm.modes) {
        const double s = mode_s(m.alpha);
        const ExpTerm f = branch_term(m.F * 0.5, m.alpha, s, norm.nu);
        const ExpTerm g = branch_term(m.G * 0.5, m.alpha, -s, norm.nu);
        terms.push_back(f);
        terms.push_back(f.conjugate_partner());
        terms.push_back(g);
        terms.push_back(g.conjugate_partner());
    }
    return ExpSumPotential(std::move(terms));
}

double TermResiduals::max_abs() const {
    return std::max({std::abs(e1), std::abs(e2), std::abs(e3), std::abs(e4), std::abs(e2c),
                     std::abs(e3c)});
}

TermResiduals term_residuals(const ExpTerm& t, double nu) {
    TermResiduals r;
    r.e1 = t.lp * t.lq + 1.0;
    r.e2 = t.lp * t.lp + 1.0 - kI * (t.l2 - nu * t.lp);
    r.e3 = t.lp * t.lw + nu - kI * (t.lp - t.lq);
    r.e4 = t.l2 * t.lw + nu * nu - kI * (t.l2 - t.lw + nu * (t.lp - t.lq));
    r.e2c = t.lq * t.lq + 1.0 + kI * (t.lw - nu * t.lq);
    r.e3c = t.lq * t.l2 + nu + kI * (t.lq - t.lp);
    return r;
}

SolutionReport is_solution(const ExpSumPotential& pot, double nu, double tol) {
    SolutionReport rep;
    const auto& terms = pot.terms();
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const TermResiduals r = term_residuals(terms[i], nu);
        const double worst = r.max_abs();
        if (worst > rep.worst) {
            rep.worst = worst;
            rep.worst_term = i;
            rep.worst_residuals = r;
        }
    }
    rep.pass = rep.worst <= tol;
    rep.message = rep.pass
                      ? "all " + std::to_string(terms.size()) + " terms satisfy the linear system"
                      : "term " + std::to_string(rep.worst_term) + " violates the linear system "
                        "(worst residual " + std::to_string(rep.worst) + ")";
    return rep;
}

ExpSumPotential singular_family(const SingularFamily& fam) {
    SpectrumData sd;
    sd.nu = fam.nu;
    sd.modes.push_back({fam.alpha, fam.F, Complex{0.0, 0.0}});
    return expand(sd);
}

} // namespace cmahk
