#pragma once

// Geometry built from a positive exponential sum v: partner coefficients of
// the linearized system, the metric data (a, b, c), the real 4-metric with
// exact first and second derivatives, the null coframe and the triple of
// 2-forms it induces, and the singular-locus diagnostics.

#include "cmahk/expsum.hpp"
#include "cmahk/jets.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace cmahk {

// -------------------------------------------------------------------------
// Guarded-domain errors.  Suites count these separately.
// -------------------------------------------------------------------------

struct PositivityError : std::domain_error {
    explicit PositivityError(double v_val)
        : std::domain_error("v = " + std::to_string(v_val) +
                            " is not positive: point outside the admissible domain"),
          v(v_val) {}
    double v;
};

struct NearLocusError : std::domain_error {
    NearLocusError(double locus_val, double c2)
        : std::domain_error("c^2 - |a|^2 = " + std::to_string(locus_val) +
                            " within guard band of the singular locus (c^2 = " +
                            std::to_string(c2) + ")"),
          locus(locus_val), c_squared(c2) {}
    double locus;
    double c_squared;
};

struct SignatureError : std::domain_error {
    explicit SignatureError(double locus_val)
        : std::domain_error("c^2 - |a|^2 = " + std::to_string(locus_val) +
                            " is negative: coframe normalization undefined"),
          locus(locus_val) {}
    double locus;
};

// near_locus_rel is a hard floor: |c^2-|a|^2| below this fraction of c^2 is
// refused (double precision cannot support the downstream algebra there).
// positivity_rel excludes v below that fraction of the term magnitude scale.
struct GeometryGuards {
    double near_locus_rel = 1e-8;
    double positivity_rel = 0.0;
};

// -------------------------------------------------------------------------
// Partner coefficients
// -------------------------------------------------------------------------

// First Wirtinger derivatives of the translational symmetry characteristic
// phi = p + pbar + nu (z2 + z2bar); every higher derivative vanishes.
struct PhiDerivs {
    double p = 1.0;
    double pbar = 1.0;
    double z2 = 0.0;
    double z2bar = 0.0;
};

PhiDerivs phi_derivs(double nu);

struct PartnerCoeffs {
    Complex A{0.0, 0.0};
    double B = 0.0;
    Complex C{0.0, 0.0};
};

struct PartnerResult {
    PartnerCoeffs coeffs;
    Complex B_direct{0.0, 0.0};   // third defining line, before the identity
    double identity_gap = 0.0;    // |B_direct - (|A|^2 + |C|^2 - 1)|
    double denominator = 0.0;     // phi_p phi_pbar + psi_p psi_pbar (real part)
};

// Coefficients of the linear second-derivative relations from the first
// derivatives of phi and psi (psi jet of order >= 1).
PartnerResult partner_coeffs(const PhiDerivs& phi, const VJet& psi1);

// Second derivatives of a symmetry characteristic; identically zero for the
// translational phi.
struct PhiSecondDerivs {
    Complex pp{0.0, 0.0}, pbarpbar{0.0, 0.0}, ppbar{0.0, 0.0};
    Complex p2bar{0.0, 0.0}, pbar2{0.0, 0.0}, two2bar{0.0, 0.0};
};

// Residual of the linearized symmetry-determining equation
// conj(A) phi_pp + A phi_pbpb - (B+2) phi_ppb + conj(C) phi_p2b + C phi_pb2 - phi_22b.
Complex determining_residual(const PartnerCoeffs& pc, const PhiSecondDerivs& phi2 = {});

// -------------------------------------------------------------------------
// Metric data
// -------------------------------------------------------------------------

struct MetricABC {
    Complex a{0.0, 0.0};
    Complex b{0.0, 0.0};
    double c = 0.0;
};

// a = v^2 + v_p^2 - i v (v_2 - nu v_p), b = v_pbar v_2 + nu v^2 - i v (v_p - v_pbar),
// c = v^2 + |v_p|^2, from a v-jet of order >= 1.
MetricABC abc(const VJet& vjet, double nu);

// c^2 - |a|^2: zero exactly on the singular locus.
double singular_locus_value(const VJet& vjet, double nu);
double singular_locus_value(const ExpSumPotential& pot, double nu, const RealChartPoint& at);

struct RealMetric4 {
    std::array<std::array<double, 4>, 4> g{};

    std::array<double, 4> eigenvalues() const; // ascending
    double det() const;
    std::array<std::array<double, 4>, 4> inverse() const;
};

// Real Taylor data (value/gradient/Hessian) of one metric component.
struct Jet2 {
    double value = 0.0;
    std::array<double, 4> grad{};
    std::array<double, 10> hess{};
    double h(int i, int j) const { return hess[sym4_index(i, j)]; }
};

struct MetricJet {
    std::array<Jet2, 10> comp{}; // upper triangle over (mu <= nu)
    const Jet2& at(int i, int j) const { return comp[sym4_index(i, j)]; }
    Jet2& at(int i, int j) { return comp[sym4_index(i, j)]; }
    RealMetric4 value() const;
};

// The metric tensor in the real chart with exact first and second
// derivatives.  Convention: the tensor equals the coframe reconstruction
// l (x) lbar + lbar (x) l + m (x) mbar + mbar (x) m exactly.
MetricJet metric_jet_at(const ExpSumPotential& pot, double nu, const RealChartPoint& at,
                        const GeometryGuards& guards = {});

RealMetric4 metric_at(const ExpSumPotential& pot, double nu, const RealChartPoint& at,
                      const GeometryGuards& guards = {});

// -------------------------------------------------------------------------
// Null coframe and the induced 2-form triple
// -------------------------------------------------------------------------

// Components over the complex coordinate coframe (dp, dpbar, dz2, dz2bar).
struct Coframe {
    std::array<Complex, 4> l{};
    std::array<Complex, 4> m{};

    // Components over (dx1..dx4).
    std::array<Complex, 4> l_real() const;
    std::array<Complex, 4> m_real() const;
};

Coframe coframe_at(const ExpSumPotential& pot, double nu, const RealChartPoint& at,
                   const GeometryGuards& guards = {});

// Same coframe with order-2 Taylor data of every real-chart component.
struct CoframeJet {
    std::array<TaylorScalar, 4> l{};
    std::array<TaylorScalar, 4> m{};
};

CoframeJet coframe_jet_at(const ExpSumPotential& pot, double nu, const RealChartPoint& at,
                          const GeometryGuards& guards = {});

// Antisymmetric 2-form, packed (01, 02, 03, 12, 13, 23).
struct TwoForm {
    std::array<double, 6> comp{};

    static int index(int i, int j); // i < j
    double at(int i, int j) const;  // signed
};

struct KahlerTriple {
    TwoForm theta0, theta_plus, theta_minus;
    double reality_residue = 0.0; // worst imaginary part relative to scale
};

// theta0 = (1/i)(l^lbar - m^mbar), theta+- = (l^mbar +- lbar^m) / (2, 2i).
KahlerTriple kahler_triple(const Coframe& f);

// -------------------------------------------------------------------------
// Singularity and Legendre-existence diagnostics
// -------------------------------------------------------------------------

struct SingularityResidual {
    double value = 0.0; // first-order singularity condition, real part
    double scale = 0.0; // sum of constituent magnitudes
    double relative() const { return scale > 0.0 ? std::abs(value) / scale : std::abs(value); }
};

SingularityResidual singularity_residual(const VJet& vjet, double nu);

struct LegendreExistence {
    double value = 0.0;         // psi_pp psi_pbpb - psi_ppb^2 (must stay away from 0)
    double imag_residue = 0.0;
};

LegendreExistence legendre_existence_residual(const VJet& psi2);

// Relative gap of the cross identity psi_pp psi_pbpb - psi_ppb^2 =
// psi_ppb^2 (|A|^2 - 1).
double legendre_cross_gap(const VJet& psi2, const Complex& A);

} // namespace cmahk
