#pragma once

// Exponential sums v(p, pbar, z2, z2bar) = sum_k K_k exp(lp_k p + lq_k pbar
// + l2_k z2 + lw_k z2bar) with closed-form Wirtinger derivatives of every
// order.  The sum must be closed under complex conjugation so that v is real.

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace cmahk {

using Complex = std::complex<double>;

struct CoordPoint {
    Complex p{0.0, 0.0};
    Complex z2{0.0, 0.0};
};

// Multi-index for mixed Wirtinger derivatives d^kp/dp d^kq/dpbar
// d^k2/dz2 d^kw/dz2bar.
struct WirtingerIndex {
    int kp = 0;
    int kq = 0;
    int k2 = 0;
    int kw = 0;

    int total() const { return kp + kq + k2 + kw; }
    // Index of the conjugated derivative: conj(d^I v) = d^{swap(I)} v for real v.
    WirtingerIndex conjugated() const { return {kq, kp, kw, k2}; }
    bool operator==(const WirtingerIndex&) const = default;
};

struct ExpTerm {
    Complex amplitude{0.0, 0.0};
    Complex lp{0.0, 0.0};
    Complex lq{0.0, 0.0};
    Complex l2{0.0, 0.0};
    Complex lw{0.0, 0.0};

    Complex exponent_at(const CoordPoint& at) const {
        return lp * at.p + lq * std::conj(at.p) + l2 * at.z2 + lw * std::conj(at.z2);
    }
    // The term whose presence makes the pair sum real.
    ExpTerm conjugate_partner() const {
        return {std::conj(amplitude), std::conj(lq), std::conj(lp), std::conj(lw), std::conj(l2)};
    }
    bool same_exponents(const ExpTerm& o) const {
        return lp == o.lp && lq == o.lq && l2 == o.l2 && lw == o.lw;
    }
};

// Canonicalized term list: terms sorted by exponent 4-vector, exact-duplicate
// exponents merged by amplitude addition, amplitudes below 1e-300 dropped.
class ExpSumPotential {
public:
    ExpSumPotential() = default;
    explicit ExpSumPotential(std::vector<ExpTerm> terms);

    const std::vector<ExpTerm>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

private:
    std::vector<ExpTerm> terms_;
};

// Table of all Wirtinger derivatives of one real-valued exponential sum at one
// point, complete through the requested total order (cap 6).  For jets of v,
// the zero index equals eval() and entries satisfy the reality relation
// at(I) == conj(at(I.conjugated())) to roundoff.
class VJet {
public:
    VJet() = default;
    VJet(CoordPoint at, int order, std::vector<Complex> table);

    static int order_cap() { return 6; }

    const CoordPoint& point() const { return at_; }
    int order() const { return order_; }
    Complex at(const WirtingerIndex& idx) const;

    // Worst violation of the reality relation over all stored entries,
    // relative to the largest entry magnitude.
    double reality_gap() const;

private:
    CoordPoint at_{};
    int order_ = -1;
    int stride_ = 0;
    std::vector<Complex> table_;
};

// Value of the sum.  Requires conjugation closure: the imaginary residue must
// not exceed 1e-12 of the term magnitude scale (it only absorbs roundoff;
// anything larger means the term set is not closed and is reported, not hidden).
double eval(const ExpSumPotential& pot, const CoordPoint& at);

// Single mixed Wirtinger derivative (complex in general).
Complex derivative(const ExpSumPotential& pot, const WirtingerIndex& idx, const CoordPoint& at);

// All derivatives with total order <= order in one pass.
VJet jet(const ExpSumPotential& pot, const CoordPoint& at, int order);

// sum_k |K_k| exp(Re exponent_k): the natural magnitude scale of the sum at a
// point, used to normalize residues and positivity guards.
double term_scale(const ExpSumPotential& pot, const CoordPoint& at);

struct ConjugationReport {
    bool pass = false;
    std::vector<std::size_t> unpaired; // indices into terms()
    std::string message;
};

// Exact pairing check: every term (K, lp, lq, l2, lw) must have exactly one
// partner (conj K, conj lq, conj lp, conj lw, conj l2); a term may be its own
// partner.
ConjugationReport conjugation_check(const ExpSumPotential& pot);

} // namespace cmahk
