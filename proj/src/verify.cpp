#include "cmahk/verify.hpp"

#include "cmahk/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace cmahk {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kTiny = 1e-300;

double cfg_tol(const SuiteConfig& c, const std::string& name, double dflt) {
    const auto it = c.tolerances.find(name);
    return it == c.tolerances.end() ? dflt : it->second;
}

class Accum {
public:
    Accum(std::string name, double tol) {
        r_.name = std::move(name);
        r_.tolerance = tol;
    }
    void add(double rel, const RealChartPoint& pt) {
        ++r_.n_evaluated;
        if (rel > r_.worst_residual) {
            r_.worst_residual = rel;
            r_.worst_point = pt;
        }
    }
    CheckResult finish() const {
        CheckResult c = r_;
        c.pass = c.worst_residual <= c.tolerance;
        return c;
    }

private:
    CheckResult r_;
};

// Report-only minimum tracker (margins: how far the run stayed from a
// degeneracy, never a pass/fail criterion).
class MinTrack {
public:
    MinTrack(std::string name) : name_(std::move(name)) {}
    void add(double margin, const RealChartPoint& pt) {
        ++n_;
        if (!any_ || margin < min_) {
            min_ = margin;
            pt_ = pt;
            any_ = true;
        }
    }
    CheckResult finish() const { return {name_, any_ ? min_ : 0.0, pt_, 0.0, true, n_}; }

private:
    std::string name_;
    double min_ = 0.0;
    RealChartPoint pt_{};
    bool any_ = false;
    int n_ = 0;
};

// First Wirtinger derivatives carried through rational arithmetic, for the
// derivatives of the partner coefficients A and C.  d = (d_p, d_pbar, d_2,
// d_2bar).  The m / md channels carry the sum of constituent magnitudes
// alongside each value, so a residual can be normalized by the scale at
// which it was computed; a quantity that cancels to rounding noise (all of
// A's derivatives do when A is constant) would otherwise be compared
// against its own noise.  Invariant: m >= |v| and md[i] >= |d[i]|.
struct Wirt1 {
    Complex v{};
    std::array<Complex, 4> d{};
    double m = 0.0;
    std::array<double, 4> md{};
};

Wirt1 wconst(const Complex& c) { return {c, {}, std::abs(c), {}}; }

Wirt1 operator+(const Wirt1& a, const Wirt1& b) {
    Wirt1 r{a.v + b.v, {}, a.m + b.m, {}};
    for (int i = 0; i < 4; ++i) {
        r.d[i] = a.d[i] + b.d[i];
        r.md[i] = a.md[i] + b.md[i];
    }
    return r;
}

Wirt1 operator-(const Wirt1& a, const Wirt1& b) {
    Wirt1 r{a.v - b.v, {}, a.m + b.m, {}};
    for (int i = 0; i < 4; ++i) {
        r.d[i] = a.d[i] - b.d[i];
        r.md[i] = a.md[i] + b.md[i];
    }
    return r;
}

Wirt1 operator*(const Wirt1& a, const Wirt1& b) {
    Wirt1 r{a.v * b.v, {}, a.m * b.m, {}};
    for (int i = 0; i < 4; ++i) {
        r.d[i] = a.d[i] * b.v + a.v * b.d[i];
        r.md[i] = a.md[i] * b.m + a.m * b.md[i];
    }
    return r;
}

Wirt1 operator*(const Complex& s, const Wirt1& a) {
    Wirt1 r{s * a.v, {}, std::abs(s) * a.m, {}};
    for (int i = 0; i < 4; ++i) {
        r.d[i] = s * a.d[i];
        r.md[i] = std::abs(s) * a.md[i];
    }
    return r;
}

Wirt1 operator/(const Wirt1& a, const Wirt1& b) {
    if (std::abs(b.v) < 1e-140) {
        throw std::domain_error("Wirtinger quotient by a vanishing denominator");
    }
    Wirt1 r{a.v / b.v, {}, a.m / std::abs(b.v), {}};
    for (int i = 0; i < 4; ++i) {
        r.d[i] = (a.d[i] - r.v * b.d[i]) / b.v;
        r.md[i] = (a.md[i] + r.m * b.md[i]) / std::abs(b.v);
    }
    return r;
}

Wirt1 wfield(const VJet& j, const WirtingerIndex& base) {
    Wirt1 w;
    w.v = j.at(base);
    w.d[0] = j.at({base.kp + 1, base.kq, base.k2, base.kw});
    w.d[1] = j.at({base.kp, base.kq + 1, base.k2, base.kw});
    w.d[2] = j.at({base.kp, base.kq, base.k2 + 1, base.kw});
    w.d[3] = j.at({base.kp, base.kq, base.k2, base.kw + 1});
    w.m = std::abs(w.v);
    for (int i = 0; i < 4; ++i) w.md[i] = std::abs(w.d[i]);
    return w;
}

struct PartnerJets {
    Wirt1 A, C;
};

// A and C with their first Wirtinger derivatives, built from the order-2
// block of a psi jet; phi contributes the constants (1, 1, nu, nu).
PartnerJets partner_jets(const VJet& psij, double nu) {
    const Wirt1 wp = wfield(psij, {1, 0, 0, 0});
    const Wirt1 wq = wfield(psij, {0, 1, 0, 0});
    const Wirt1 w2 = wfield(psij, {0, 0, 1, 0});
    const Wirt1 ww = wfield(psij, {0, 0, 0, 1});
    const Wirt1 one = wconst(1.0);
    const Wirt1 wnu = wconst(nu);

    const Wirt1 delta = one + wp * wq;
    PartnerJets pj;
    pj.A = (one + wp * wp + kI * (w2 - wnu * wp)) / delta;
    pj.C = (wnu + wp * ww + kI * (wp - wq)) / delta;
    return pj;
}

void check_config(const SuiteConfig& config) {
    if (config.n_points < 1) throw std::invalid_argument("suite needs n_points >= 1");
    if (!config.box.valid()) throw std::invalid_argument("suite box has an empty interval");
}

std::string coverage_advice(const char* suite) {
    return std::string("more than 90% of the sampled points were excluded by the ") + suite +
           " guards; shrink the box toward the admissible domain or adjust the guard "
           "thresholds";
}

} // namespace

bool SuiteReport::all_pass() const {
    for (const CheckResult& c : checks)
        if (!c.pass) return false;
    return true;
}

const CheckResult* SuiteReport::find(const std::string& name) const {
    for (const CheckResult& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

std::vector<RealChartPoint> sample_box(const Box& box, int n, std::uint64_t seed) {
    Lcg64 rng(seed);
    std::vector<RealChartPoint> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        RealChartPoint p;
        for (int k = 0; k < 4; ++k) p.x[k] = rng.uniform(box.lo[k], box.hi[k]);
        pts.push_back(p);
    }
    return pts;
}

SuiteReport pde_suite(const ExpSumPotential& pot, double nu, const SuiteConfig& config) {
    check_config(config);
    SuiteReport rep;
    const std::vector<RealChartPoint> pts = sample_box(config.box, config.n_points, config.seed);

    Accum linear{"linear_system", cfg_tol(config, "linear_system", 1e-8)};
    Accum partner{"partner_system", cfg_tol(config, "partner_system", 1e-8)};
    Accum cma{"transformed_cma", cfg_tol(config, "transformed_cma", 1e-8)};
    Accum ratios{"second_derivative_ratios", cfg_tol(config, "second_derivative_ratios", 1e-8)};
    Accum third{"third_order", cfg_tol(config, "third_order", 1e-8)};
    Accum compat{"compatibility", cfg_tol(config, "compatibility", 1e-8)};
    Accum bident{"b_identity", cfg_tol(config, "b_identity", 1e-10)};
    Accum lcross{"legendre_cross_identity", cfg_tol(config, "legendre_cross_identity", 1e-9)};

    int usable = 0;
    for (const RealChartPoint& pt : pts) {
        ++rep.guards.attempted;
        const CoordPoint c = pt.to_coord();
        VJet vj;
        try {
            vj = jet(pot, c, 3);
        } catch (const std::range_error&) {
            ++rep.guards.overflow;
            continue;
        }
        const double v0 = vj.at({0, 0, 0, 0}).real();
        if (!(v0 > 0.0) || v0 <= config.guards.positivity_rel * term_scale(pot, c)) {
            ++rep.guards.v_nonpositive;
            continue;
        }
        ++usable;

        // Linear system for v, normalized by the sum of per-term constituent
        // magnitudes so that exact cancellation inside a derivative cannot
        // inflate the relative residual.
        {
            const Complex v = vj.at({0, 0, 0, 0});
            const Complex vp = vj.at({1, 0, 0, 0});
            const Complex vq = vj.at({0, 1, 0, 0});
            const Complex v2 = vj.at({0, 0, 1, 0});
            const Complex vw = vj.at({0, 0, 0, 1});

            const Complex r1 = vj.at({1, 1, 0, 0}) + v;
            const Complex r2 = vj.at({2, 0, 0, 0}) + v - kI * (v2 - nu * vp);
            const Complex r3 = vj.at({1, 0, 0, 1}) + nu * v - kI * (vp - vq);
            const Complex r4 =
                vj.at({0, 0, 1, 1}) + nu * nu * v - kI * (v2 - vw + nu * (vp - vq));

            double w1 = 0.0, w2 = 0.0, w3 = 0.0, w4 = 0.0;
            for (const ExpTerm& t : pot.terms()) {
                const double mag =
                    std::abs(t.amplitude) * std::exp(t.exponent_at(c).real());
                const double lp = std::abs(t.lp), lq = std::abs(t.lq);
                const double l2 = std::abs(t.l2), lw = std::abs(t.lw);
                const double an = std::abs(nu);
                w1 += mag * (lp * lq + 1.0);
                w2 += mag * (lp * lp + 1.0 + l2 + an * lp);
                w3 += mag * (lp * lw + an + lp + lq);
                w4 += mag * (l2 * lw + an * an + l2 + lw + an * (lp + lq));
            }
            double rel = std::abs(r1) / (w1 + kTiny);
            rel = std::max(rel, std::abs(r2) / (w2 + kTiny));
            rel = std::max(rel, std::abs(r3) / (w3 + kTiny));
            rel = std::max(rel, std::abs(r4) / (w4 + kTiny));
            linear.add(rel, pt);
        }

        const VJet psij = psi_jet_from(vj, 3);
        const Complex sp = psij.at({1, 0, 0, 0});
        const Complex sq = psij.at({0, 1, 0, 0});
        const Complex s2 = psij.at({0, 0, 1, 0});
        const Complex sw = psij.at({0, 0, 0, 1});
        const Complex spp = psij.at({2, 0, 0, 0});
        const Complex sqq = psij.at({0, 2, 0, 0});
        const Complex spq = psij.at({1, 1, 0, 0});
        const Complex spw = psij.at({1, 0, 0, 1});
        const Complex sq2 = psij.at({0, 1, 1, 0});
        const Complex s2w = psij.at({0, 0, 1, 1});

        // The six coupled equations for psi.
        {
            const Complex e1 = spq - 1.0 - sp * sq;
            const double g1 = std::abs(spq) + 1.0 + std::abs(sp * sq);
            const Complex e2 = spp - 1.0 - sp * sp - kI * (s2 - nu * sp);
            const double g2 =
                std::abs(spp) + 1.0 + std::norm(sp) + std::abs(s2) + std::abs(nu * sp);
            const Complex e3 = spw - nu - sp * sw - kI * (sp - sq);
            const double g3 = std::abs(spw) + std::abs(nu) + std::abs(sp * sw) +
                              std::abs(sp) + std::abs(sq);
            const Complex e4 = s2w - nu * nu - s2 * sw - kI * (s2 - sw + nu * (sp - sq));
            const double g4 = std::abs(s2w) + nu * nu + std::abs(s2 * sw) + std::abs(s2) +
                              std::abs(sw) + std::abs(nu) * (std::abs(sp) + std::abs(sq));
            const Complex e5 = sqq - 1.0 - sq * sq + kI * (sw - nu * sq);
            const Complex e6 = sq2 - nu - sq * s2 + kI * (sq - sp);

            double rel = std::abs(e1) / (g1 + kTiny);
            rel = std::max(rel, std::abs(e2) / (g2 + kTiny));
            rel = std::max(rel, std::abs(e3) / (g3 + kTiny));
            rel = std::max(rel, std::abs(e4) / (g4 + kTiny));
            rel = std::max(rel, std::abs(e5) / (g2 + kTiny));
            rel = std::max(rel, std::abs(e6) / (g3 + kTiny));
            partner.add(rel, pt);
        }

        // Transformed Monge-Ampere identity.
        {
            const Complex t1 = spq * s2w, t2 = spw * sq2, t3 = spp * sqq, t4 = spq * spq;
            const Complex r = t1 - t2 - t3 + t4;
            const double g = std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4);
            cma.add(std::abs(r) / (g + kTiny), pt);
        }

        const PartnerResult pr = partner_coeffs(phi_derivs(nu), psij);
        const Complex A = pr.coeffs.A;
        const Complex C = pr.coeffs.C;

        // Second-derivative ratios.  spq = 1 + |psi_p|^2 >= 1 sets the scale
        // of the whole second-derivative block, so it enters every
        // denominator: a row whose two sides cancel to rounding noise (spw
        // and C both vanish on the one-mode families) is measured against
        // that scale and not against its own noise.
        {
            const Complex q1 = spp - A * spq;
            const Complex q2 = spw - C * spq;
            const Complex q3 = s2w - pr.B_direct * spq;
            const double scale = std::abs(spq);
            double rel = std::abs(q1) / (std::abs(spp) + std::abs(A * spq) + scale + kTiny);
            rel = std::max(rel,
                           std::abs(q2) / (std::abs(spw) + std::abs(C * spq) + scale + kTiny));
            rel = std::max(rel, std::abs(q3) / (std::abs(s2w) + std::abs(pr.B_direct * spq) +
                                                scale + kTiny));
            ratios.add(rel, pt);
        }

        const PartnerJets pj = partner_jets(psij, nu);

        // Third-order relations, multiplied through by 1 - |A|^2 and guarded
        // where that factor degenerates.
        {
            const double one_m = 1.0 - std::norm(A);
            if (std::abs(one_m) <= config.guards.third_order_guard) {
                ++rep.guards.third_order_skipped;
            } else {
                const Complex num = A * std::conj(pj.A.d[1]) + pj.A.d[1];
                const Complex sppq = psij.at({2, 1, 0, 0});
                const Complex spq2 = psij.at({1, 1, 1, 0});

                const Complex lhs1 = sppq * one_m;
                const Complex rhs1 = num * spq;
                const double g1 = std::abs(sppq) * (1.0 + std::norm(A)) +
                                  std::abs(num) * std::abs(spq) + kTiny;

                const Complex cbar_p = std::conj(pj.C.d[1]);
                const Complex lhs2 = spq2 * one_m;
                const Complex rhs2 = (std::conj(C) * num + cbar_p * one_m) * spq;
                const double g2 = std::abs(spq2) * (1.0 + std::norm(A)) +
                                  (std::abs(std::conj(C) * num) +
                                   std::abs(cbar_p) * (1.0 + std::norm(A))) *
                                      std::abs(spq) +
                                  kTiny;

                const double rel =
                    std::max(std::abs(lhs1 - rhs1) / g1, std::abs(lhs2 - rhs2) / g2);
                third.add(rel, pt);
            }
        }

        // Compatibility conditions on (A, C), normalized by the constituent
        // magnitudes from the m channels.  When A and C are constant (the
        // one-mode families) every derivative term is rounding noise, but
        // the constituents that cancelled were order one, and that is the
        // scale the residual is honest against.
        {
            const Complex t1 = pj.A.v * pj.C.d[1];
            const Complex t2 = pj.C.v * pj.A.d[1];
            const Complex r1 = t1 - t2 - pj.C.d[0] + pj.A.d[3];
            const double g1 = pj.A.m * pj.C.md[1] + pj.C.m * pj.A.md[1] + pj.C.md[0] +
                              pj.A.md[3] + kTiny;

            const Complex u1 = std::conj(pj.A.v) * pj.A.d[0];
            const Complex u2 = std::conj(pj.C.v) * pj.C.d[0];
            const Complex r2 = u1 + u2 - pj.A.d[1] - pj.C.d[2];
            const double g2 = pj.A.m * pj.A.md[0] + pj.C.m * pj.C.md[0] + pj.A.md[1] +
                              pj.C.md[2] + kTiny;

            compat.add(std::max(std::abs(r1) / g1, std::abs(r2) / g2), pt);
        }

        bident.add(pr.identity_gap /
                       (std::abs(pr.B_direct) + std::norm(A) + std::norm(C) + 1.0),
                   pt);
        lcross.add(legendre_cross_gap(psij, A), pt);
    }

    for (const Accum* a : {&linear, &partner, &cma, &ratios, &third, &compat, &bident, &lcross})
        rep.checks.push_back(a->finish());

    const double excluded =
        1.0 - static_cast<double>(usable) / static_cast<double>(config.n_points);
    CheckResult cov{"domain_coverage", excluded, {}, cfg_tol(config, "domain_coverage", 0.90),
                    excluded <= cfg_tol(config, "domain_coverage", 0.90), usable};
    if (!cov.pass) rep.advice = coverage_advice("pde");
    rep.checks.push_back(cov);
    return rep;
}

SuiteReport geometry_suite(const ExpSumPotential& pot, double nu, const SuiteConfig& config) {
    check_config(config);
    SuiteReport rep;
    const std::vector<RealChartPoint> pts = sample_box(config.box, config.n_points, config.seed);
    const GeometryGuards gg{config.guards.near_locus_rel, config.guards.positivity_rel};

    Accum recon{"np_reconstruction", cfg_tol(config, "np_reconstruction", 1e-10)};
    Accum sig{"signature_positive", cfg_tol(config, "signature_positive", 0.0)};
    Accum ortho{"coframe_orthonormality", cfg_tol(config, "coframe_orthonormality", 1e-10)};
    Accum kreal{"kahler_reality", cfg_tol(config, "kahler_reality", 1e-10)};
    Accum korth{"kahler_orthogonality", cfg_tol(config, "kahler_orthogonality", 1e-10)};
    Accum knorm{"kahler_norms", cfg_tol(config, "kahler_norms", 1e-10)};
    Accum orient{"orientation_consistency", cfg_tol(config, "orientation_consistency", 0.0)};
    Accum rsym{"riemann_symmetries", cfg_tol(config, "riemann_symmetries", 1e-9)};
    Accum mcompat{"metric_compatibility", cfg_tol(config, "metric_compatibility", 1e-9)};
    Accum ricci{"ricci_ratio", cfg_tol(config, "ricci_ratio", 1e-6)};
    Accum asd{"asd", cfg_tol(config, "asd", 1e-6)};
    Accum closed{"closedness", cfg_tol(config, "closedness", 1e-6)};
    Accum hitchin{"hitchin_saturation", cfg_tol(config, "hitchin_saturation", 1e-6)};
    MinTrack locus_margin{"locus_margin_min"};
    MinTrack legendre_margin{"legendre_margin_min"};

    int usable = 0;
    int seen_sign = 0;
    for (const RealChartPoint& pt : pts) {
        ++rep.guards.attempted;
        const CoordPoint c = pt.to_coord();
        VJet vj;
        try {
            vj = jet(pot, c, 3);
        } catch (const std::range_error&) {
            ++rep.guards.overflow;
            continue;
        }
        const double v0 = vj.at({0, 0, 0, 0}).real();
        if (!(v0 > 0.0) || v0 <= config.guards.positivity_rel * term_scale(pot, c)) {
            ++rep.guards.v_nonpositive;
            continue;
        }
        const MetricABC m = abc(vj, nu);
        const double c2 = m.c * m.c;
        const double locus = c2 - std::norm(m.a);
        if (std::abs(locus) < config.guards.near_locus_rel * c2) {
            ++rep.guards.near_locus;
            continue;
        }
        if (locus < 0.0) {
            ++rep.guards.negative_locus;
            continue;
        }
        ++usable;
        locus_margin.add(locus / c2, pt);

        const MetricJet mj = metric_jet_at(pot, nu, pt, gg);
        const RealMetric4 g = mj.value();
        const auto ginv = g.inverse();
        const Coframe cf = coframe_at(pot, nu, pt, gg);
        const std::array<Complex, 4> lr = cf.l_real();
        const std::array<Complex, 4> mr = cf.m_real();

        // Reconstruction l lbar + lbar l + m mbar + mbar m against the
        // assembled tensor.
        {
            double worst = 0.0, scale = 0.0;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    const double rec = 2.0 * (lr[i] * std::conj(lr[j])).real() +
                                       2.0 * (mr[i] * std::conj(mr[j])).real();
                    worst = std::max(worst, std::abs(g.g[i][j] - rec));
                    scale = std::max(scale, std::abs(g.g[i][j]));
                }
            recon.add(worst / (scale + kTiny), pt);
        }

        {
            const std::array<double, 4> ev = g.eigenvalues();
            sig.add(ev[0] > 0.0 ? 0.0 : std::abs(ev[0]) / (std::abs(ev[3]) + kTiny), pt);
        }

        // NP pairing of the frame under the inverse metric.
        {
            const std::array<Complex, 4> frame[4] = {
                lr,
                {std::conj(lr[0]), std::conj(lr[1]), std::conj(lr[2]), std::conj(lr[3])},
                mr,
                {std::conj(mr[0]), std::conj(mr[1]), std::conj(mr[2]), std::conj(mr[3])}};
            Complex h[4][4];
            double scale = 0.0;
            for (int A = 0; A < 4; ++A)
                for (int B = 0; B < 4; ++B) {
                    Complex s{0.0, 0.0};
                    for (int i = 0; i < 4; ++i)
                        for (int j = 0; j < 4; ++j) s += ginv[i][j] * frame[A][i] * frame[B][j];
                    h[A][B] = s;
                    scale = std::max(scale, std::abs(s));
                }
            const double pairing[4][4] = {{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}};
            double worst = 0.0;
            for (int A = 0; A < 4; ++A)
                for (int B = 0; B < 4; ++B)
                    worst = std::max(worst, std::abs(h[A][B] - pairing[A][B]));
            ortho.add(worst / (scale + kTiny), pt);
        }

        const KahlerTriple kt = kahler_triple(cf);
        kreal.add(kt.reality_residue, pt);

        // <F, H> = F_{ij} H^{ij} / 2.
        const auto inner = [&](const TwoForm& f, const TwoForm& h) {
            double s = 0.0;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    double hup = 0.0;
                    for (int a = 0; a < 4; ++a)
                        for (int b = 0; b < 4; ++b) hup += ginv[i][a] * ginv[j][b] * h.at(a, b);
                    s += f.at(i, j) * hup;
                }
            return 0.5 * s;
        };
        {
            const TwoForm* th[3] = {&kt.theta0, &kt.theta_plus, &kt.theta_minus};
            double n[3];
            for (int i = 0; i < 3; ++i) n[i] = inner(*th[i], *th[i]);
            double worst = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int j = i + 1; j < 3; ++j)
                    worst = std::max(worst, std::abs(inner(*th[i], *th[j])) /
                                                (std::sqrt(std::abs(n[i] * n[j])) + kTiny));
            korth.add(worst, pt);
            const double wn = std::max(std::abs(n[0] - 2.0) / 2.0,
                                       std::max(std::abs(n[1] - 0.5) / 0.5,
                                                std::abs(n[2] - 0.5) / 0.5));
            knorm.add(wn, pt);
        }

        int sgn = 0;
        try {
            sgn = calibrate_orientation(kt, g);
            if (seen_sign == 0) {
                seen_sign = sgn;
                orient.add(0.0, pt);
            } else {
                orient.add(sgn == seen_sign ? 0.0 : 1.0, pt);
            }
        } catch (const std::runtime_error&) {
            orient.add(1.0, pt);
        }

        CurvaturePack pack = riemann_from_metric(mj);
        rsym.add(pack.symmetry_residual, pt);
        ricci.add(pack.ricci_norm / (pack.riem_norm + kTiny), pt);

        // Metric compatibility of the connection.
        {
            const ChristoffelJet cj = christoffel(mj);
            double worst = 0.0;
            for (int e = 0; e < 4; ++e)
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b) {
                        double nab = mj.at(a, b).grad[e];
                        double scale = std::abs(nab);
                        for (int f = 0; f < 4; ++f) {
                            const double t1 = cj.gamma[f][e][a] * g.g[f][b];
                            const double t2 = cj.gamma[f][e][b] * g.g[a][f];
                            nab -= t1 + t2;
                            scale += std::abs(t1) + std::abs(t2);
                        }
                        worst = std::max(worst, std::abs(nab) / (scale + kTiny));
                    }
            mcompat.add(worst, pt);
        }

        if (sgn != 0) {
            decompose_duality(pack, g, sgn);
            asd.add(pack.asd_residual, pt);
            hitchin.add(hitchin_density(pack, g, sgn).saturation_residual, pt);
        }

        closed.add(closedness_residual(coframe_jet_at(pot, nu, pt, gg)).worst(), pt);

        {
            const VJet psij = psi_jet_from(vj, 2);
            const LegendreExistence le = legendre_existence_residual(psij);
            const Complex pp = psij.at({2, 0, 0, 0});
            const Complex qq = psij.at({0, 2, 0, 0});
            const Complex pq = psij.at({1, 1, 0, 0});
            const double scale = std::abs(pp * qq) + std::norm(pq) + kTiny;
            legendre_margin.add(std::abs(le.value) / scale, pt);
        }
    }

    rep.orientation_sign = seen_sign;
    for (const Accum* a :
         {&recon, &sig, &ortho, &kreal, &korth, &knorm, &orient, &rsym, &mcompat, &ricci, &asd,
          &closed, &hitchin})
        rep.checks.push_back(a->finish());
    rep.checks.push_back(locus_margin.finish());
    rep.checks.push_back(legendre_margin.finish());

    const double excluded =
        1.0 - static_cast<double>(usable) / static_cast<double>(config.n_points);
    CheckResult cov{"domain_coverage", excluded, {}, cfg_tol(config, "domain_coverage", 0.90),
                    excluded <= cfg_tol(config, "domain_coverage", 0.90), usable};
    if (!cov.pass) rep.advice = coverage_advice("geometry");
    rep.checks.push_back(cov);
    return rep;
}

SuiteReport full_report(const ExpSumPotential& pot, double nu, const SuiteConfig& config) {
    const SuiteReport p = pde_suite(pot, nu, config);
    const SuiteReport g = geometry_suite(pot, nu, config);

    SuiteReport rep;
    rep.guards.attempted = p.guards.attempted + g.guards.attempted;
    rep.guards.overflow = p.guards.overflow + g.guards.overflow;
    rep.guards.v_nonpositive = p.guards.v_nonpositive + g.guards.v_nonpositive;
    rep.guards.near_locus = p.guards.near_locus + g.guards.near_locus;
    rep.guards.negative_locus = p.guards.negative_locus + g.guards.negative_locus;
    rep.guards.third_order_skipped = p.guards.third_order_skipped + g.guards.third_order_skipped;

    rep.checks.reserve(p.checks.size() + g.checks.size());
    for (const CheckResult& c : p.checks) {
        CheckResult r = c;
        r.name = "pde." + r.name;
        rep.checks.push_back(r);
    }
    for (const CheckResult& c : g.checks) {
        CheckResult r = c;
        r.name = "geometry." + r.name;
        rep.checks.push_back(r);
    }
    rep.orientation_sign = g.orientation_sign;

    std::string advice = p.advice;
    if (!g.advice.empty()) {
        if (!advice.empty()) advice += "; ";
        advice += g.advice;
    }

    const GeometryGuards gg{config.guards.near_locus_rel, config.guards.positivity_rel};
    try {
        rep.killing = killing_scan(pot, nu, sample_box(config.box, config.n_points, config.seed),
                                   gg);
        rep.has_killing = true;
    } catch (const std::runtime_error&) {
        if (!advice.empty()) advice += "; ";
        advice += "killing scan skipped: fewer than 10 admissible points";
    }
    rep.advice = advice;
    return rep;
}

} // namespace cmahk
