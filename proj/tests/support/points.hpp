#pragma once

// Deterministic discovery of admissible geometry points (v > 0 and a healthy
// positive locus margin).  The admissible set of a two-mode potential is a
// curved region of the chart, so tests locate points by scanning fixed seeded
// samples instead of hard-coding coordinates.

#include "cmahk/geometry.hpp"
#include "cmahk/rng.hpp"
#include "cmahk/verify.hpp"

#include <algorithm>
#include <utility>
#include <vector>

namespace testsupport {

// First n sample points (seeded scan over the box) where the Riemannian
// coframe exists under the given guards.  Probing through coframe_at (not
// metric_jet_at) matters: it rejects points whose locus is negative, where
// the metric exists but is indefinite.  The default near-locus margin of
// 1e-2 keeps inversion-based residuals well below the 1e-10 tolerances the
// tests pin.
inline std::vector<cmahk::RealChartPoint> admissible_points(
    const cmahk::ExpSumPotential& pot, double nu, const cmahk::Box& box, int n,
    const cmahk::GeometryGuards& guards = {1e-2, 1e-9}, std::uint64_t seed = 4242,
    int max_attempts = 200000) {
    std::vector<cmahk::RealChartPoint> found;
    cmahk::Lcg64 rng(seed);
    for (int k = 0; k < max_attempts && static_cast<int>(found.size()) < n; ++k) {
        cmahk::RealChartPoint pt;
        for (int i = 0; i < 4; ++i) pt.x[i] = rng.uniform(box.lo[i], box.hi[i]);
        try {
            (void)cmahk::coframe_at(pot, nu, pt, guards);
            found.push_back(pt);
        } catch (const std::domain_error&) {
        } catch (const std::range_error&) {
        }
    }
    return found;
}

// Admissible points ranked by how tame the metric jet is (smallest second
// derivatives first).  Central differences at a fixed step lose accuracy
// where the metric's derivatives are steep, so oracle comparisons use the
// calmest points of the sample.  The default guards demand a wide locus
// margin and a v value well inside the positive region for the same reason.
inline std::vector<cmahk::RealChartPoint> tame_points(
    const cmahk::ExpSumPotential& pot, double nu, const cmahk::Box& box, int n,
    int candidates = 20, const cmahk::GeometryGuards& guards = {0.5, 0.2},
    std::uint64_t seed = 4242) {
    const auto cand = admissible_points(pot, nu, box, candidates, guards, seed);
    std::vector<std::pair<double, cmahk::RealChartPoint>> ranked;
    for (const auto& pt : cand) {
        const cmahk::MetricJet mj = cmahk::metric_jet_at(pot, nu, pt, guards);
        double hmax = 1.0;
        for (int k = 0; k < 10; ++k)
            for (int i = 0; i < 10; ++i) hmax = std::max(hmax, std::abs(mj.comp[k].hess[i]));
        ranked.emplace_back(hmax, pt);
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<cmahk::RealChartPoint> out;
    for (int i = 0; i < n && i < static_cast<int>(ranked.size()); ++i)
        out.push_back(ranked[i].second);
    return out;
}

// Small box centered on a point; useful to build a suite box with high
// admissible coverage around a known-good sample.
inline cmahk::Box box_around(const cmahk::RealChartPoint& center, double half_width) {
    cmahk::Box box;
    for (int i = 0; i < 4; ++i) {
        box.lo[i] = center.x[i] - half_width;
        box.hi[i] = center.x[i] + half_width;
    }
    return box;
}

} // namespace testsupport
