#pragma once

// Curvature of the real 4-metric from exact second-derivative jets:
// Christoffel symbols with their first derivatives, the lowered Riemann
// tensor, Ricci data, the Hodge star, duality decomposition of the curvature,
// closedness of the 2-form triple, the two characteristic-class densities,
// and a translational-symmetry (constant null direction) scan.

#include "cmahk/geometry.hpp"

#include <vector>

namespace cmahk {

// Gamma[a][b][c] = Gamma^a_{bc} and dGamma[e][a][b][c] = d_e Gamma^a_{bc},
// both exact given the metric jet.
struct ChristoffelJet {
    double gamma[4][4][4] = {};
    double dgamma[4][4][4][4] = {};
};

// Levi-Civita connection of the metric jet.  Throws when the metric value is
// not invertible.
ChristoffelJet christoffel(const MetricJet& mj);

struct CurvaturePack {
    double riem[4][4][4][4] = {}; // fully lowered R_{abcd}
    double ricci[4][4] = {};
    double scalar = 0.0;

    double riem_norm = 0.0;  // metric-weighted Frobenius norm
    double ricci_norm = 0.0;

    // Worst violation of the algebraic symmetries (antisymmetry in both
    // pairs, pair exchange, first Bianchi) relative to the largest component.
    double symmetry_residual = 0.0;
    bool flat = false;

    // Duality split on the last index pair; filled once an orientation is
    // fixed (orientation_sign stays 0 until then).
    int orientation_sign = 0;
    double asd_residual = 0.0;  // |R + *R| / |R|
    double sd_part_norm = 0.0;  // |(R + *R) / 2|
    double asd_part_norm = 0.0; // |(R - *R) / 2|
};

// Curvature from a metric jet alone (no orientation, duality fields unset).
// The same code path accepts hand-built jets, so analytic toy metrics
// exercise it directly.
CurvaturePack riemann_from_metric(const MetricJet& mj);

// Fills the duality fields of an existing pack for the given orientation.
void decompose_duality(CurvaturePack& pack, const RealMetric4& g, int orientation_sign);

// Full pipeline at a point: metric jet, curvature, orientation calibrated
// from the 2-form triple, duality decomposition.  Requires a positive locus
// (the coframe must exist to calibrate).
CurvaturePack riemann(const ExpSumPotential& pot, double nu, const RealChartPoint& at,
                      const GeometryGuards& guards = {});

// (*F)_{ab} = (sign/2) sqrt(det g) eps_{abcd} F^{cd}, indices raised with g.
// Involutive on 2-forms for a positive-definite g.
TwoForm hodge_star(const TwoForm& f, const RealMetric4& g, int sign);

// The orientation sign for which all three 2-forms of the triple are
// self-dual (relative gap <= 1e-8); throws when neither sign works.
int calibrate_orientation(const KahlerTriple& t, const RealMetric4& g);
int calibrate_orientation(const ExpSumPotential& pot, double nu, const RealChartPoint& at,
                          const GeometryGuards& guards = {});

double asd_residual(const ExpSumPotential& pot, double nu, const RealChartPoint& at,
                    const GeometryGuards& guards = {});

// Exterior-derivative residuals of theta0, theta+, theta-, each the 1-norm of
// dtheta over the four index triples divided by the 1-norm of the derivative
// terms entering it.
struct ClosednessResidual {
    std::array<double, 3> rel{};
    double worst() const { return std::max(rel[0], std::max(rel[1], rel[2])); }
};

ClosednessResidual closedness_residual(const CoframeJet& fj);
ClosednessResidual closedness_residual(const ExpSumPotential& pot, double nu,
                                       const RealChartPoint& at, const GeometryGuards& guards = {});

// Volume-form coefficients of the two characteristic integrands,
// chi: tr(Omega ^ *Omega) / (16 pi^2), tau: tr(Omega ^ Omega) / (24 pi^2),
// and the saturation residual |chi + (3/2) tau| / (|chi| + |tau|).
struct DensityPair {
    double chi = 0.0;
    double tau = 0.0;
    double saturation_residual = 0.0;
};

DensityPair hitchin_density(const CurvaturePack& pack, const RealMetric4& g, int orientation_sign);
DensityPair hitchin_density(const ExpSumPotential& pot, double nu, const RealChartPoint& at,
                            const GeometryGuards& guards = {});

struct KillingResult {
    int rank = 0;
    bool has_null = false;
    std::array<double, 4> null_direction{};
    std::array<double, 4> singular_values{};
    int points_used = 0;
    bool used_fallback = false;

    bool operator==(const KillingResult&) const = default;
};

// Detects coordinate-constant symmetry directions: stacks the gradients of
// the ten metric components at every admissible point and ranks them
// (singular values below threshold x largest count as null).  When the
// guards exclude every point (identically singular locus), falls back to the
// gradients of the scale-invariant fields Re/Im(v_p/v), Re/Im(v_2/v), which
// determine every metric ratio.  Needs at least 10 admissible points.
KillingResult killing_scan(const ExpSumPotential& pot, double nu,
                           const std::vector<RealChartPoint>& points,
                           const GeometryGuards& guards = {}, double threshold = 1e-8);

} // namespace cmahk
