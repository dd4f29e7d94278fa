#include "cmahk/geometry.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace cmahk {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kDenomFloor = 1e-140;
// Internal consistency bound: imaginary residue of realified quantities.
constexpr double kRealityTol = 1e-9;

// Rows of the constant Jacobian dp = dx1 + i dx2, dpbar = dx1 - i dx2,
// dz2 = dx3 + i dx4, dz2bar = dx3 - i dx4.
constexpr Complex kJac[4][4] = {
    {{1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}, {0.0, 0.0}},
    {{1.0, 0.0}, {0.0, -1.0}, {0.0, 0.0}, {0.0, 0.0}},
    {{0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}},
    {{0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}, {0.0, -1.0}},
};

struct GuardedScalars {
    double v = 0.0;
    MetricABC m{};
    double locus = 0.0;
};

GuardedScalars check_guards(const ExpSumPotential& pot, const VJet& vj, double nu,
                            const GeometryGuards& guards, bool need_positive_locus) {
    GuardedScalars s;
    s.v = vj.at({0, 0, 0, 0}).real();
    const double scale = term_scale(pot, vj.point());
    if (!(s.v > 0.0) || s.v <= guards.positivity_rel * scale) {
        throw PositivityError(s.v);
    }
    s.m = abc(vj, nu);
    s.locus = s.m.c * s.m.c - std::norm(s.m.a);
    const double c2 = s.m.c * s.m.c;
    if (std::abs(s.locus) < guards.near_locus_rel * c2) {
        throw NearLocusError(s.locus, c2);
    }
    if (need_positive_locus && s.locus < 0.0) {
        throw SignatureError(s.locus);
    }
    return s;
}

Jet2 realify(const TaylorScalar& t, double scale, const char* what) {
    double worst = std::abs(t.value().imag());
    for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(t.grad(i).imag()));
    for (int k = 0; k < 10; ++k) worst = std::max(worst, std::abs(t.hess_packed(k).imag()));
    if (worst > kRealityTol * scale) {
        throw std::runtime_error(std::string(what) + ": imaginary residue " +
                                 std::to_string(worst) + " exceeds roundoff scale");
    }
    Jet2 r;
    r.value = t.value().real();
    for (int i = 0; i < 4; ++i) r.grad[i] = t.grad(i).real();
    for (int k = 0; k < 10; ++k) r.hess[k] = t.hess_packed(k).real();
    return r;
}

Eigen::Matrix4d to_eigen(const RealMetric4& m) {
    Eigen::Matrix4d e;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) e(i, j) = m.g[i][j];
    return e;
}

} // namespace

PhiDerivs phi_derivs(double nu) { return {1.0, 1.0, nu, nu}; }

PartnerResult partner_coeffs(const PhiDerivs& phi, const VJet& psi1) {
    const Complex pp = psi1.at({1, 0, 0, 0});
    const Complex pq = psi1.at({0, 1, 0, 0});
    const Complex p2 = psi1.at({0, 0, 1, 0});
    const Complex pw = psi1.at({0, 0, 0, 1});
    const Complex fp{phi.p}, fq{phi.pbar}, f2{phi.z2}, fw{phi.z2bar};

    const Complex denom = fp * fq + pp * pq;
    if (std::abs(denom) < kDenomFloor) {
        throw std::domain_error("partner coefficients undefined: phi_p phi_pbar + psi_p psi_pbar "
                                "vanishes at the requested point");
    }
    PartnerResult r;
    r.denominator = denom.real();
    r.coeffs.A = (fp * fp + pp * pp + kI * (fp * p2 - f2 * pp)) / denom;
    r.coeffs.C = (fp * fw + pp * pw + kI * (fq * pp - fp * pq)) / denom;
    r.B_direct = (f2 * fw + p2 * pw + kI * (pp * fw - fp * pw + p2 * fq - f2 * pq)) / denom;
    r.coeffs.B = r.B_direct.real();
    const double b_identity = std::norm(r.coeffs.A) + std::norm(r.coeffs.C) - 1.0;
    r.identity_gap = std::abs(r.B_direct - b_identity);
    return r;
}

Complex determining_residual(const PartnerCoeffs& pc, const PhiSecondDerivs& phi2) {
    return std::conj(pc.A) * phi2.pp + pc.A * phi2.pbarpbar - (pc.B + 2.0) * phi2.ppbar +
           std::conj(pc.C) * phi2.p2bar + pc.C * phi2.pbar2 - phi2.two2bar;
}

MetricABC abc(const VJet& vjet, double nu) {
    const Complex v = vjet.at({0, 0, 0, 0});
    const Complex vp = vjet.at({1, 0, 0, 0});
    const Complex vq = vjet.at({0, 1, 0, 0});
    const Complex v2 = vjet.at({0, 0, 1, 0});
    MetricABC r;
    r.a = v * v + vp * vp - kI * v * (v2 - nu * vp);
    r.b = vq * v2 + nu * v * v - kI * v * (vp - vq);
    r.c = (v * v + vp * vq).real();
    return r;
}

double singular_locus_value(const VJet& vjet, double nu) {
    const MetricABC m = abc(vjet, nu);
    return m.c * m.c - std::norm(m.a);
}

double singular_locus_value(const ExpSumPotential& pot, double nu, const RealChartPoint& at) {
    return singular_locus_value(jet(pot, at.to_coord(), 1), nu);
}

std::array<double, 4> RealMetric4::eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(to_eigen(*this));
    std::array<double, 4> ev{};
    for (int i = 0; i < 4; ++i) ev[i] = solver.eigenvalues()(i);
    return ev;
}

double RealMetric4::det() const { return to_eigen(*this).determinant(); }

std::array<std::array<double, 4>, 4> RealMetric4::inverse() const {
    const Eigen::Matrix4d inv = to_eigen(*this).inverse();
    std::array<std::array<double, 4>, 4> r{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r[i][j] = inv(i, j);
    return r;
}

RealMetric4 MetricJet::value() const {
    RealMetric4 m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m.g[i][j] = at(i, j).value;
    return m;
}

MetricJet metric_jet_at(const ExpSumPotential& pot, double nu, const RealChartPoint& at,
                        const GeometryGuards& guards) {
    const VJet vj = jet(pot, at.to_coord(), 3);
    check_guards(pot, vj, nu, guards, /*need_positive_locus=*/false);

    const TaylorScalar V = lift_derivative_of_v(vj, {0, 0, 0, 0});
    const TaylorScalar Vp = lift_derivative_of_v(vj, {1, 0, 0, 0});
    const TaylorScalar Vq = lift_derivative_of_v(vj, {0, 1, 0, 0});
    const TaylorScalar V2 = lift_derivative_of_v(vj, {0, 0, 1, 0});
    const Complex cnu{nu, 0.0};

    const TaylorScalar a_ = V * V + Vp * Vp - kI * (V * (V2 - cnu * Vp));
    const TaylorScalar b_ = Vq * V2 + cnu * (V * V) - kI * (V * (Vp - Vq));
    const TaylorScalar c_ = V * V + Vp * Vq;
    const TaylorScalar abs_a2 = a_ * a_.conjugate();
    const TaylorScalar locus = c_ * c_ - abs_a2;
    const TaylorScalar denom = V * V * locus;

    const TaylorScalar n_uu = (Complex{2.0, 0.0} * a_) / denom;
    const TaylorScalar n_uu_c = n_uu.conjugate();
    const TaylorScalar n_um = (c_ * c_ + abs_a2) / (c_ * denom);
    const TaylorScalar n_w = locus / (V * V * c_);

    // u = c dp + b dz2, ubar its conjugate, over (dp, dpbar, dz2, dz2bar).
    const std::array<TaylorScalar, 4> u{c_, TaylorScalar{}, b_, TaylorScalar{}};
    const std::array<TaylorScalar, 4> ub{TaylorScalar{}, c_, TaylorScalar{}, b_.conjugate()};

    TaylorScalar G[4][4];
    for (int A = 0; A < 4; ++A)
        for (int B = A; B < 4; ++B) {
            TaylorScalar s = n_uu * (u[A] * u[B]) + n_uu_c * (ub[A] * ub[B]) +
                             n_um * (u[A] * ub[B] + ub[A] * u[B]);
            if (A == 2 && B == 3) s += n_w;
            G[A][B] = s;
            if (A != B) G[B][A] = s;
        }

    // Contract with the constant Jacobian into real-chart components.
    TaylorScalar H[4][4];
    for (int A = 0; A < 4; ++A)
        for (int mu = 0; mu < 4; ++mu) {
            TaylorScalar s;
            for (int B = 0; B < 4; ++B) s += kJac[B][mu] * G[A][B];
            H[A][mu] = s;
        }

    double scale = 0.0;
    TaylorScalar gc[10];
    for (int mu = 0; mu < 4; ++mu)
        for (int nu2 = mu; nu2 < 4; ++nu2) {
            TaylorScalar s;
            for (int A = 0; A < 4; ++A) s += kJac[A][mu] * H[A][nu2];
            gc[sym4_index(mu, nu2)] = s;
            scale = std::max(scale, s.max_abs());
        }

    MetricJet mj;
    for (int k = 0; k < 10; ++k) mj.comp[k] = realify(gc[k], scale, "metric component");
    return mj;
}

RealMetric4 metric_at(const ExpSumPotential& pot, double nu, const RealChartPoint& at,
                      const GeometryGuards& guards) {
    return metric_jet_at(pot, nu, at, guards).value();
}

std::array<Complex, 4> Coframe::l_real() const {
    std::array<Complex, 4> r{};
    for (int mu = 0; mu < 4; ++mu)
        for (int A = 0; A < 4; ++A) r[mu] += kJac[A][mu] * l[A];
    return r;
}

std::array<Complex, 4> Coframe::m_real() const {
    std::array<Complex, 4> r{};
    for (int mu = 0; mu < 4; ++mu)
        for (int A = 0; A < 4; ++A) r[mu] += kJac[A][mu] * m[A];
    return r;
}

Coframe coframe_at(const ExpSumPotential& pot, double nu, const RealChartPoint& at,
                   const GeometryGuards& guards) {
    const VJet vj = jet(pot, at.to_coord(), 1);
    const GuardedScalars s = check_guards(pot, vj, nu, guards, /*need_positive_locus=*/true);

    const double dl = s.v * std::sqrt(s.m.c * s.locus);
    Coframe f;
    f.l[0] = s.m.c * s.m.c / dl;
    f.l[1] = std::conj(s.m.a) * s.m.c / dl;
    f.l[2] = s.m.c * s.m.b / dl;
    f.l[3] = std::conj(s.m.a) * std::conj(s.m.b) / dl;
    f.m[2] = std::sqrt(s.locus) / (s.v * std::sqrt(s.m.c));
    return f;
}

CoframeJet coframe_jet_at(const ExpSumPotential& pot, double nu, const RealChartPoint& at,
                          const GeometryGuards& guards) {
    const VJet vj = jet(pot, at.to_coord(), 3);
    check_guards(pot, vj, nu, guards, /*need_positive_locus=*/true);

    const TaylorScalar V = lift_derivative_of_v(vj, {0, 0, 0, 0});
    const TaylorScalar Vp = lift_derivative_of_v(vj, {1, 0, 0, 0});
    const TaylorScalar Vq = lift_derivative_of_v(vj, {0, 1, 0, 0});
    const TaylorScalar V2 = lift_derivative_of_v(vj, {0, 0, 1, 0});
    const Complex cnu{nu, 0.0};

    const TaylorScalar a_ = V * V + Vp * Vp - kI * (V * (V2 - cnu * Vp));
    const TaylorScalar b_ = Vq * V2 + cnu * (V * V) - kI * (V * (Vp - Vq));
    const TaylorScalar c_ = V * V + Vp * Vq;
    const TaylorScalar locus = c_ * c_ - a_ * a_.conjugate();

    const TaylorScalar dl = V * sqrt(c_ * locus);
    std::array<TaylorScalar, 4> lf{c_ * c_ / dl, a_.conjugate() * c_ / dl, c_ * b_ / dl,
                                   a_.conjugate() * b_.conjugate() / dl};
    std::array<TaylorScalar, 4> mf{};
    mf[2] = sqrt(locus) / (V * sqrt(c_));

    CoframeJet fj;
    for (int mu = 0; mu < 4; ++mu)
        for (int A = 0; A < 4; ++A) {
            fj.l[mu] += kJac[A][mu] * lf[A];
            fj.m[mu] += kJac[A][mu] * mf[A];
        }
    return fj;
}

int TwoForm::index(int i, int j) {
    static constexpr int start[3] = {0, 3, 5};
    return start[i] + (j - i - 1);
}

double TwoForm::at(int i, int j) const {
    if (i == j) return 0.0;
    return i < j ? comp[index(i, j)] : -comp[index(j, i)];
}

KahlerTriple kahler_triple(const Coframe& f) {
    const std::array<Complex, 4> l = f.l_real();
    const std::array<Complex, 4> m = f.m_real();

    KahlerTriple t;
    double scale = 0.0, worst_imag = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            const Complex ll = l[i] * std::conj(l[j]) - l[j] * std::conj(l[i]);
            const Complex mm = m[i] * std::conj(m[j]) - m[j] * std::conj(m[i]);
            const Complex lm = l[i] * std::conj(m[j]) - l[j] * std::conj(m[i]);
            const Complex cl = std::conj(l[i]) * m[j] - std::conj(l[j]) * m[i];

            const Complex th0 = (ll - mm) / kI;
            const Complex thp = 0.5 * (lm + cl);
            const Complex thm = (lm - cl) / (2.0 * kI);

            const int k = TwoForm::index(i, j);
            t.theta0.comp[k] = th0.real();
            t.theta_plus.comp[k] = thp.real();
            t.theta_minus.comp[k] = thm.real();
            for (const Complex& c : {th0, thp, thm}) {
                scale = std::max(scale, std::abs(c));
                worst_imag = std::max(worst_imag, std::abs(c.imag()));
            }
        }
    t.reality_residue = scale > 0.0 ? worst_imag / scale : worst_imag;
    return t;
}

SingularityResidual singularity_residual(const VJet& vjet, double nu) {
    const Complex v = vjet.at({0, 0, 0, 0});
    const Complex vp = vjet.at({1, 0, 0, 0});
    const Complex vq = vjet.at({0, 1, 0, 0});
    const Complex v2 = vjet.at({0, 0, 1, 0});

    const Complex dp = vp - vq;
    const Complex d2 = v2 - nu * vp;
    const Complex t1 = v * (dp * dp);
    const double t2 = v.real() * std::norm(d2);
    const Complex w = d2 * (v * v + vq * vq);

    SingularityResidual r;
    r.value = t1.real() + t2 + 2.0 * w.imag();
    r.scale = std::abs(t1) + std::abs(t2) + 2.0 * std::abs(w);
    return r;
}

LegendreExistence legendre_existence_residual(const VJet& psi2) {
    const Complex pp = psi2.at({2, 0, 0, 0});
    const Complex qq = psi2.at({0, 2, 0, 0});
    const Complex pq = psi2.at({1, 1, 0, 0});
    const Complex val = pp * qq - pq * pq;
    return {val.real(), std::abs(val.imag())};
}

double legendre_cross_gap(const VJet& psi2, const Complex& A) {
    const Complex pp = psi2.at({2, 0, 0, 0});
    const Complex qq = psi2.at({0, 2, 0, 0});
    const Complex pq = psi2.at({1, 1, 0, 0});
    const Complex lhs = pp * qq - pq * pq;
    const Complex rhs = pq * pq * (std::norm(A) - 1.0);
    const double scale = std::abs(pp * qq) + std::norm(pq) + std::abs(rhs) + 1e-300;
    return std::abs(lhs - rhs) / scale;
}

} // namespace cmahk
