#include "cmahk/expsum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace cmahk {

namespace {

// Real-part overflow bound for exp(); beyond this doubles stop being finite.
constexpr double kExponentBound = 700.0;
constexpr double kAmplitudeFloor = 1e-300;
constexpr double kImagResidueTol = 1e-12;

auto exponent_key(const ExpTerm& t) {
    return std::make_tuple(t.lp.real(), t.lp.imag(), t.lq.real(), t.lq.imag(),
                           t.l2.real(), t.l2.imag(), t.lw.real(), t.lw.imag());
}

// exp(term exponent) with the overflow guard; idx only feeds the error text.
Complex guarded_exp(const ExpTerm& t, const CoordPoint& at, std::size_t idx) {
    const Complex e = t.exponent_at(at);
    if (!(std::abs(e.real()) <= kExponentBound)) {
        throw std::range_error("exp-sum term " + std::to_string(idx) +
                               ": exponent real part " + std::to_string(e.real()) +
                               " exceeds +-700, evaluation would overflow");
    }
    return std::exp(e);
}

} // namespace

ExpSumPotential::ExpSumPotential(std::vector<ExpTerm> terms) {
    std::stable_sort(terms.begin(), terms.end(), [](const ExpTerm& a, const ExpTerm& b) {
        return exponent_key(a) < exponent_key(b);
    });
    for (const ExpTerm& t : terms) {
        if (!terms_.empty() && terms_.back().same_exponents(t)) {
            terms_.back().amplitude += t.amplitude;
        } else {
            terms_.push_back(t);
        }
    }
    std::erase_if(terms_, [](const ExpTerm& t) { return std::abs(t.amplitude) < kAmplitudeFloor; });
}

VJet::VJet(CoordPoint at, int order, std::vector<Complex> table)
    : at_(at), order_(order), stride_(order + 1), table_(std::move(table)) {}

Complex VJet::at(const WirtingerIndex& idx) const {
    if (idx.kp < 0 || idx.kq < 0 || idx.k2 < 0 || idx.kw < 0 || idx.total() > order_) {
        throw std::out_of_range("jet entry (" + std::to_string(idx.kp) + "," +
                                std::to_string(idx.kq) + "," + std::to_string(idx.k2) + "," +
                                std::to_string(idx.kw) + ") beyond stored order " +
                                std::to_string(order_));
    }
    const int s = stride_;
    return table_[((idx.kp * s + idx.kq) * s + idx.k2) * s + idx.kw];
}

double VJet::reality_gap() const {
    double worst = 0.0, scale = 0.0;
    for (int kp = 0; kp <= order_; ++kp)
        for (int kq = 0; kq + kp <= order_; ++kq)
            for (int k2 = 0; k2 + kq + kp <= order_; ++k2)
                for (int kw = 0; kw + k2 + kq + kp <= order_; ++kw) {
                    const WirtingerIndex idx{kp, kq, k2, kw};
                    const Complex v = at(idx);
                    scale = std::max(scale, std::abs(v));
                    worst = std::max(worst, std::abs(v - std::conj(at(idx.conjugated()))));
                }
    return scale > 0.0 ? worst / scale : worst;
}

double eval(const ExpSumPotential& pot, const CoordPoint& at) {
    Complex sum{0.0, 0.0};
    double scale = 0.0;
    std::size_t idx = 0;
    for (const ExpTerm& t : pot.terms()) {
        const Complex val = t.amplitude * guarded_exp(t, at, idx);
        sum += val;
        scale += std::abs(val);
        ++idx;
    }
    if (std::abs(sum.imag()) > kImagResidueTol * scale) {
        throw std::runtime_error("exp-sum value has imaginary residue " +
                                 std::to_string(sum.imag()) + " beyond roundoff: term set is "
                                 "not closed under conjugation");
    }
    return sum.real();
}

Complex derivative(const ExpSumPotential& pot, const WirtingerIndex& idx, const CoordPoint& at) {
    if (idx.kp < 0 || idx.kq < 0 || idx.k2 < 0 || idx.kw < 0) {
        throw std::invalid_argument("derivative multi-index must be nonnegative");
    }
    Complex sum{0.0, 0.0};
    std::size_t i = 0;
    for (const ExpTerm& t : pot.terms()) {
        Complex coeff = t.amplitude;
        for (int k = 0; k < idx.kp; ++k) coeff *= t.lp;
        for (int k = 0; k < idx.kq; ++k) coeff *= t.lq;
        for (int k = 0; k < idx.k2; ++k) coeff *= t.l2;
        for (int k = 0; k < idx.kw; ++k) coeff *= t.lw;
        sum += coeff * guarded_exp(t, at, i);
        ++i;
    }
    return sum;
}

VJet jet(const ExpSumPotential& pot, const CoordPoint& at, int order) {
    if (order < 0 || order > VJet::order_cap()) {
        throw std::invalid_argument("jet order " + std::to_string(order) +
                                    " outside supported range [0, 6]");
    }
    const int s = order + 1;
    std::vector<Complex> table(static_cast<std::size_t>(s) * s * s * s, Complex{0.0, 0.0});

    std::vector<Complex> pow_lp(s), pow_lq(s), pow_l2(s), pow_lw(s);
    std::size_t i = 0;
    for (const ExpTerm& t : pot.terms()) {
        const Complex base = t.amplitude * guarded_exp(t, at, i);
        pow_lp[0] = pow_lq[0] = pow_l2[0] = pow_lw[0] = Complex{1.0, 0.0};
        for (int k = 1; k < s; ++k) {
            pow_lp[k] = pow_lp[k - 1] * t.lp;
            pow_lq[k] = pow_lq[k - 1] * t.lq;
            pow_l2[k] = pow_l2[k - 1] * t.l2;
            pow_lw[k] = pow_lw[k - 1] * t.lw;
        }
        for (int kp = 0; kp <= order; ++kp)
            for (int kq = 0; kq + kp <= order; ++kq)
                for (int k2 = 0; k2 + kq + kp <= order; ++k2)
                    for (int kw = 0; kw + k2 + kq + kp <= order; ++kw) {
                        table[((kp * s + kq) * s + k2) * s + kw] +=
                            base * pow_lp[kp] * pow_lq[kq] * pow_l2[k2] * pow_lw[kw];
                    }
        ++i;
    }
    return VJet(at, order, std::move(table));
}

double term_scale(const ExpSumPotential& pot, const CoordPoint& at) {
    double scale = 0.0;
    std::size_t i = 0;
    for (const ExpTerm& t : pot.terms()) {
        scale += std::abs(t.amplitude * guarded_exp(t, at, i));
        ++i;
    }
    return scale;
}

ConjugationReport conjugation_check(const ExpSumPotential& pot) {
    ConjugationReport rep;
    const auto& terms = pot.terms();
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const ExpTerm want = terms[i].conjugate_partner();
        bool found = false;
        for (const ExpTerm& cand : terms) {
            if (cand.same_exponents(want) && cand.amplitude == want.amplitude) {
                found = true;
                break;
            }
        }
        if (!found) rep.unpaired.push_back(i);
    }
    rep.pass = rep.unpaired.empty();
    if (rep.pass) {
        rep.message = "closed under conjugation (" + std::to_string(terms.size()) + " terms)";
    } else {
        rep.message = "missing conjugate partner for " + std::to_string(rep.unpaired.size()) +
                      " term(s); first offender index " + std::to_string(rep.unpaired.front());
    }
    return rep;
}

} // namespace cmahk
