#include "cmahk/jets.hpp"

#include <cmath>
#include <stdexcept>

namespace cmahk {

namespace {

constexpr double kDivisionFloor = 1e-140;

// Chain rule between real chart axes and Wirtinger directions:
// d/dx1 = d/dp + d/dpbar, d/dx2 = i(d/dp - d/dpbar), likewise for (z2, z2bar).
struct ChainEntry {
    WirtingerIndex dir;
    Complex coeff;
};

const std::array<std::array<ChainEntry, 2>, 4>& chain_table() {
    static const std::array<std::array<ChainEntry, 2>, 4> table = {{
        {{{{1, 0, 0, 0}, {1.0, 0.0}}, {{0, 1, 0, 0}, {1.0, 0.0}}}},
        {{{{1, 0, 0, 0}, {0.0, 1.0}}, {{0, 1, 0, 0}, {0.0, -1.0}}}},
        {{{{0, 0, 1, 0}, {1.0, 0.0}}, {{0, 0, 0, 1}, {1.0, 0.0}}}},
        {{{{0, 0, 1, 0}, {0.0, 1.0}}, {{0, 0, 0, 1}, {0.0, -1.0}}}},
    }};
    return table;
}

WirtingerIndex add_index(const WirtingerIndex& a, const WirtingerIndex& b) {
    return {a.kp + b.kp, a.kq + b.kq, a.k2 + b.k2, a.kw + b.kw};
}

// f(u) for scalar f with derivatives f0 = f(u0), f1 = f'(u0), f2 = f''(u0).
TaylorScalar compose(const TaylorScalar& u, const Complex& f0, const Complex& f1,
                     const Complex& f2) {
    TaylorScalar r;
    r.value() = f0;
    for (int i = 0; i < 4; ++i) r.grad(i) = f1 * u.grad(i);
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j)
            r.hess_packed(sym4_index(i, j)) = f1 * u.hess(i, j) + f2 * u.grad(i) * u.grad(j);
    return r;
}

} // namespace

TaylorScalar TaylorScalar::constant(const Complex& c) {
    TaylorScalar t;
    t.value_ = c;
    return t;
}

TaylorScalar TaylorScalar::variable(const Complex& c, int axis) {
    TaylorScalar t;
    t.value_ = c;
    t.grad_[axis] = Complex{1.0, 0.0};
    return t;
}

TaylorScalar TaylorScalar::operator-() const {
    TaylorScalar t;
    t.value_ = -value_;
    for (int i = 0; i < 4; ++i) t.grad_[i] = -grad_[i];
    for (int k = 0; k < 10; ++k) t.hess_[k] = -hess_[k];
    return t;
}

TaylorScalar& TaylorScalar::operator+=(const TaylorScalar& o) {
    value_ += o.value_;
    for (int i = 0; i < 4; ++i) grad_[i] += o.grad_[i];
    for (int k = 0; k < 10; ++k) hess_[k] += o.hess_[k];
    return *this;
}

TaylorScalar& TaylorScalar::operator-=(const TaylorScalar& o) {
    value_ -= o.value_;
    for (int i = 0; i < 4; ++i) grad_[i] -= o.grad_[i];
    for (int k = 0; k < 10; ++k) hess_[k] -= o.hess_[k];
    return *this;
}

TaylorScalar operator*(const TaylorScalar& a, const TaylorScalar& b) {
    TaylorScalar r;
    r.value_ = a.value_ * b.value_;
    for (int i = 0; i < 4; ++i) r.grad_[i] = a.value_ * b.grad_[i] + a.grad_[i] * b.value_;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j)
            r.hess_[sym4_index(i, j)] = a.value_ * b.hess(i, j) + a.grad_[i] * b.grad_[j] +
                                        a.grad_[j] * b.grad_[i] + a.hess(i, j) * b.value_;
    return r;
}

TaylorScalar operator/(const TaylorScalar& a, const TaylorScalar& b) {
    if (std::abs(b.value_) < kDivisionFloor) {
        throw std::domain_error("jet division by numerically zero value");
    }
    TaylorScalar q;
    q.value_ = a.value_ / b.value_;
    for (int i = 0; i < 4; ++i) q.grad_[i] = (a.grad_[i] - q.value_ * b.grad_[i]) / b.value_;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j)
            q.hess_[sym4_index(i, j)] = (a.hess(i, j) - q.grad_[i] * b.grad_[j] -
                                         q.grad_[j] * b.grad_[i] - q.value_ * b.hess(i, j)) /
                                        b.value_;
    return q;
}

TaylorScalar operator*(const Complex& s, TaylorScalar a) {
    a.value_ *= s;
    for (int i = 0; i < 4; ++i) a.grad_[i] *= s;
    for (int k = 0; k < 10; ++k) a.hess_[k] *= s;
    return a;
}

TaylorScalar operator+(const Complex& s, TaylorScalar a) {
    a.value_ += s;
    return a;
}

TaylorScalar operator-(const Complex& s, const TaylorScalar& a) {
    return s + (-a);
}

TaylorScalar TaylorScalar::conjugate() const {
    TaylorScalar t;
    t.value_ = std::conj(value_);
    for (int i = 0; i < 4; ++i) t.grad_[i] = std::conj(grad_[i]);
    for (int k = 0; k < 10; ++k) t.hess_[k] = std::conj(hess_[k]);
    return t;
}

double TaylorScalar::max_abs() const {
    double m = std::abs(value_);
    for (int i = 0; i < 4; ++i) m = std::max(m, std::abs(grad_[i]));
    for (int k = 0; k < 10; ++k) m = std::max(m, std::abs(hess_[k]));
    return m;
}

TaylorScalar log(const TaylorScalar& u) {
    const Complex u0 = u.value();
    if (std::abs(u0) < kDivisionFloor) {
        throw std::domain_error("jet log of numerically zero value");
    }
    return compose(u, std::log(u0), 1.0 / u0, -1.0 / (u0 * u0));
}

TaylorScalar sqrt(const TaylorScalar& u) {
    const Complex u0 = u.value();
    if (std::abs(u0) < kDivisionFloor) {
        throw std::domain_error("jet sqrt of numerically zero value");
    }
    const Complex r = std::sqrt(u0);
    return compose(u, r, 0.5 / r, -0.25 / (r * u0));
}

TaylorScalar exp(const TaylorScalar& u) {
    const Complex e = std::exp(u.value());
    return compose(u, e, e, e);
}

TaylorScalar lift_coordinate(int axis, const RealChartPoint& at) {
    if (axis < 0 || axis > 3) throw std::invalid_argument("chart axis must be 0..3");
    return TaylorScalar::variable(Complex{at.x[axis], 0.0}, axis);
}

TaylorScalar lift_derivative_of_v(const ExpSumPotential& pot, const WirtingerIndex& idx,
                                  const RealChartPoint& at) {
    return lift_derivative_of_v(jet(pot, at.to_coord(), idx.total() + 2), idx);
}

TaylorScalar lift_derivative_of_v(const VJet& vjet, const WirtingerIndex& idx) {
    if (vjet.order() < idx.total() + 2) {
        throw std::invalid_argument("jet order " + std::to_string(vjet.order()) +
                                    " too low to lift derivative of total order " +
                                    std::to_string(idx.total()) + " (need +2)");
    }
    const auto& chain = chain_table();
    TaylorScalar r;
    r.value() = vjet.at(idx);
    for (int mu = 0; mu < 4; ++mu) {
        Complex g{0.0, 0.0};
        for (const ChainEntry& e : chain[mu]) g += e.coeff * vjet.at(add_index(idx, e.dir));
        r.grad(mu) = g;
    }
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = mu; nu < 4; ++nu) {
            Complex h{0.0, 0.0};
            for (const ChainEntry& e1 : chain[mu])
                for (const ChainEntry& e2 : chain[nu])
                    h += e1.coeff * e2.coeff * vjet.at(add_index(add_index(idx, e1.dir), e2.dir));
            r.hess_packed(sym4_index(mu, nu)) = h;
        }
    return r;
}

VJet psi_jet(const ExpSumPotential& pot, const CoordPoint& at, int order) {
    return psi_jet_from(jet(pot, at, order), order);
}

VJet psi_jet_from(const VJet& vjet, int order) {
    if (order < 0 || order > 3) {
        throw std::invalid_argument("psi jet supported through order 3, got " +
                                    std::to_string(order));
    }
    if (vjet.order() < order) {
        throw std::invalid_argument("underlying jet order too low for psi jet");
    }
    const Complex v0 = vjet.at({0, 0, 0, 0});
    if (!(v0.real() > 0.0)) {
        throw std::domain_error("psi = -log v undefined: v = " + std::to_string(v0.real()) +
                                " is not positive at the requested point");
    }

    const int s = order + 1;
    std::vector<Complex> table(static_cast<std::size_t>(s) * s * s * s, Complex{0.0, 0.0});
    static const WirtingerIndex unit[4] = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};

    for (int kp = 0; kp <= order; ++kp)
        for (int kq = 0; kq + kp <= order; ++kq)
            for (int k2 = 0; k2 + kq + kp <= order; ++k2)
                for (int kw = 0; kw + k2 + kq + kp <= order; ++kw) {
                    const WirtingerIndex idx{kp, kq, k2, kw};
                    // Direction slots with multiplicity, e.g. (2,1,0,0) -> [p,p,q].
                    std::vector<int> dirs;
                    for (int d = 0; d < kp; ++d) dirs.push_back(0);
                    for (int d = 0; d < kq; ++d) dirs.push_back(1);
                    for (int d = 0; d < k2; ++d) dirs.push_back(2);
                    for (int d = 0; d < kw; ++d) dirs.push_back(3);

                    Complex val;
                    switch (dirs.size()) {
                        case 0:
                            val = -std::log(v0);
                            break;
                        case 1:
                            val = -vjet.at(unit[dirs[0]]) / v0;
                            break;
                        case 2: {
                            const Complex va = vjet.at(unit[dirs[0]]);
                            const Complex vb = vjet.at(unit[dirs[1]]);
                            val = -vjet.at(idx) / v0 + va * vb / (v0 * v0);
                            break;
                        }
                        default: {
                            const Complex va = vjet.at(unit[dirs[0]]);
                            const Complex vb = vjet.at(unit[dirs[1]]);
                            const Complex vc = vjet.at(unit[dirs[2]]);
                            const Complex vab = vjet.at(add_index(unit[dirs[0]], unit[dirs[1]]));
                            const Complex vac = vjet.at(add_index(unit[dirs[0]], unit[dirs[2]]));
                            const Complex vbc = vjet.at(add_index(unit[dirs[1]], unit[dirs[2]]));
                            val = -vjet.at(idx) / v0 +
                                  (vab * vc + vac * vb + vbc * va) / (v0 * v0) -
                                  2.0 * va * vb * vc / (v0 * v0 * v0);
                            break;
                        }
                    }
                    table[((kp * s + kq) * s + k2) * s + kw] = val;
                }
    return VJet(vjet.point(), order, std::move(table));
}

FdDerivs fd_oracle(const std::function<Complex(const RealChartPoint&)>& field,
                   const RealChartPoint& at, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
    FdDerivs r;
    const Complex f0 = field(at);
    auto shifted = [&](int i, double di, int j, double dj) {
        RealChartPoint p = at;
        p.x[i] += di;
        if (j >= 0) p.x[j] += dj;
        return field(p);
    };
    for (int i = 0; i < 4; ++i) {
        const Complex fp = shifted(i, step, -1, 0.0);
        const Complex fm = shifted(i, -step, -1, 0.0);
        r.grad[i] = (fp - fm) / (2.0 * step);
        r.hess[sym4_index(i, i)] = (fp - 2.0 * f0 + fm) / (step * step);
    }
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            const Complex fpp = shifted(i, step, j, step);
            const Complex fpm = shifted(i, step, j, -step);
            const Complex fmp = shifted(i, -step, j, step);
            const Complex fmm = shifted(i, -step, j, -step);
            r.hess[sym4_index(i, j)] = (fpp - fpm - fmp + fmm) / (4.0 * step * step);
        }
    return r;
}

} // namespace cmahk
