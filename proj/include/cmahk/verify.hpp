#pragma once

// Residual suites: sample a coordinate box, evaluate every verifiable
// identity of the construction at the admissible points, and report the
// worst relative residual per check.  Reports are deterministic functions of
// (potential, nu, config) including the sampling seed.

#include "cmahk/curvature.hpp"
#include "cmahk/spectrum.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cmahk {

struct Box {
    std::array<double, 4> lo{-1.0, -1.0, -1.0, -1.0};
    std::array<double, 4> hi{1.0, 1.0, 1.0, 1.0};

    bool valid() const {
        for (int i = 0; i < 4; ++i)
            if (!(lo[i] < hi[i])) return false;
        return true;
    }
    bool operator==(const Box&) const = default;
};

struct SuiteGuards {
    // v must exceed this fraction of the term magnitude scale.
    double positivity_rel = 1e-9;
    // |c^2 - |a|^2| must exceed this fraction of c^2 for metric / curvature
    // work.  Rounding noise in the curvature grows like (c^2 / locus)^2 on
    // top of the metric's own conditioning, and the 1e-9 symmetry tolerance
    // leaves only ~7 digits of slack in double precision, so the default
    // band is wide; lower it for coverage surveys, not for residual checks.
    double near_locus_rel = 0.3;
    // |1 - |A|^2| floor below which the third-order relations are skipped.
    double third_order_guard = 1e-8;

    bool operator==(const SuiteGuards&) const = default;
};

struct SuiteConfig {
    Box box;
    int n_points = 200;
    std::uint64_t seed = 42;
    SuiteGuards guards;
    // Per-check tolerance overrides; unnamed checks use built-in defaults.
    std::map<std::string, double> tolerances;
};

struct CheckResult {
    std::string name;
    double worst_residual = 0.0;
    RealChartPoint worst_point{};
    double tolerance = 0.0;
    bool pass = true;
    int n_evaluated = 0;

    bool operator==(const CheckResult&) const = default;
};

struct GuardCounts {
    int attempted = 0;
    int overflow = 0;      // exponent out of range
    int v_nonpositive = 0;
    int near_locus = 0;
    int negative_locus = 0;
    int third_order_skipped = 0;

    bool operator==(const GuardCounts&) const = default;
};

struct SuiteReport {
    std::string version{"cmahk-report-1"};
    GuardCounts guards;
    std::vector<CheckResult> checks;
    int orientation_sign = 0; // 0 until the geometry suite calibrates it
    bool has_killing = false;
    KillingResult killing{};
    std::string advice;

    bool all_pass() const;
    const CheckResult* find(const std::string& name) const;

    bool operator==(const SuiteReport&) const = default;
};

// n points uniform in the box, deterministic in the seed.
std::vector<RealChartPoint> sample_box(const Box& box, int n, std::uint64_t seed);

// Pointwise PDE identities: the constant-coefficient linear system for v, the
// six coupled equations for psi, the transformed Monge-Ampere identity, the
// second-derivative ratios, the guarded third-order relations, both
// compatibility conditions on (A, C), the B-identity and the Legendre cross
// identity.  Points only need v > 0 here.
SuiteReport pde_suite(const ExpSumPotential& pot, double nu, const SuiteConfig& config = {});

// Metric-level identities at points with a positive locus margin: coframe
// reconstruction, signature, NP pairing, the 2-form triple (reality,
// orthogonality, norms, orientation, closedness), curvature symmetries,
// metric compatibility, Ricci flatness, anti-self-duality and the density
// saturation, plus report-only locus and Legendre margins.
SuiteReport geometry_suite(const ExpSumPotential& pot, double nu, const SuiteConfig& config = {});

// Both suites plus the translational-symmetry scan, merged into one report.
SuiteReport full_report(const ExpSumPotential& pot, double nu, const SuiteConfig& config = {});

} // namespace cmahk
