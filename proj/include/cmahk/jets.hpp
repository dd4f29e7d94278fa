#pragma once

// Order-2 truncated Taylor arithmetic over the four real chart coordinates
// x = (Re p, Im p, Re z2, Im z2), with complex coefficients.  Exact value,
// gradient and Hessian propagate through every arithmetic step; an
// independent central-difference oracle cross-checks them.

#include "cmahk/expsum.hpp"

#include <array>
#include <functional>

namespace cmahk {

struct RealChartPoint {
    std::array<double, 4> x{0.0, 0.0, 0.0, 0.0};

    bool operator==(const RealChartPoint&) const = default;

    CoordPoint to_coord() const { return {Complex{x[0], x[1]}, Complex{x[2], x[3]}}; }
    static RealChartPoint from_coord(const CoordPoint& c) {
        return {{c.p.real(), c.p.imag(), c.z2.real(), c.z2.imag()}};
    }
};

// Upper-triangle pack of a symmetric 4x4: rows start at {0,4,7,9}.
inline int sym4_index(int i, int j) {
    if (i > j) std::swap(i, j);
    static constexpr int start[4] = {0, 4, 7, 9};
    return start[i] + (j - i);
}

class TaylorScalar {
public:
    TaylorScalar() = default;
    static TaylorScalar constant(const Complex& c);
    // c + dx_axis: the coordinate lift.
    static TaylorScalar variable(const Complex& c, int axis);

    Complex value() const { return value_; }
    Complex grad(int i) const { return grad_[i]; }
    Complex hess(int i, int j) const { return hess_[sym4_index(i, j)]; }

    Complex& value() { return value_; }
    Complex& grad(int i) { return grad_[i]; }
    Complex& hess_packed(int k) { return hess_[k]; }
    Complex hess_packed(int k) const { return hess_[k]; }

    TaylorScalar operator-() const;
    TaylorScalar& operator+=(const TaylorScalar& o);
    TaylorScalar& operator-=(const TaylorScalar& o);

    friend TaylorScalar operator+(TaylorScalar a, const TaylorScalar& b) { return a += b; }
    friend TaylorScalar operator-(TaylorScalar a, const TaylorScalar& b) { return a -= b; }
    friend TaylorScalar operator*(const TaylorScalar& a, const TaylorScalar& b);
    friend TaylorScalar operator/(const TaylorScalar& a, const TaylorScalar& b);
    friend TaylorScalar operator*(const Complex& s, TaylorScalar a);
    friend TaylorScalar operator*(TaylorScalar a, const Complex& s) { return s * std::move(a); }
    friend TaylorScalar operator+(const Complex& s, TaylorScalar a);
    friend TaylorScalar operator-(const Complex& s, const TaylorScalar& a);

    // Conjugate of the function x -> conj(f(x)); entrywise because x is real.
    TaylorScalar conjugate() const;

    // Largest coefficient magnitude; the natural scale for residue checks.
    double max_abs() const;

private:
    Complex value_{0.0, 0.0};
    std::array<Complex, 4> grad_{};
    std::array<Complex, 10> hess_{};
};

TaylorScalar log(const TaylorScalar& u);
TaylorScalar sqrt(const TaylorScalar& u);
TaylorScalar exp(const TaylorScalar& u);

TaylorScalar lift_coordinate(int axis, const RealChartPoint& at);

// Taylor data of the Wirtinger derivative d^idx v as a function of the real
// chart; requires a jet of order idx.total() + 2 (computed internally by the
// first overload, reused by the second).
TaylorScalar lift_derivative_of_v(const ExpSumPotential& pot, const WirtingerIndex& idx,
                                  const RealChartPoint& at);
TaylorScalar lift_derivative_of_v(const VJet& vjet, const WirtingerIndex& idx);

// Wirtinger table of psi = -log v through the requested order (<= 3).
// Requires eval > 0 at the point.
VJet psi_jet(const ExpSumPotential& pot, const CoordPoint& at, int order);
VJet psi_jet_from(const VJet& vjet, int order);

struct FdDerivs {
    std::array<Complex, 4> grad{};
    std::array<Complex, 10> hess{};
};

// Independent oracle: central finite differences of an arbitrary field; never
// touches the Taylor path.
FdDerivs fd_oracle(const std::function<Complex(const RealChartPoint&)>& field,
                   const RealChartPoint& at, double step);

} // namespace cmahk
