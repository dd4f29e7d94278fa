#include "cmahk/curvature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace cmahk {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kPi = 3.14159265358979323846;

using Mat4 = std::array<std::array<double, 4>, 4>;

// Permutation symbol of (a,b,c,d) against (0,1,2,3).
int eps4(int a, int b, int c, int d) {
    const int p[4] = {a, b, c, d};
    int sign = 1;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            if (p[i] == p[j]) return 0;
            if (p[i] > p[j]) sign = -sign;
        }
    return sign;
}

double positive_sqrt_det(const RealMetric4& g) {
    const double det = g.det();
    if (!(det > 0.0)) {
        throw std::domain_error("Hodge star requires a positively oriented metric (det g = " +
                                std::to_string(det) + ")");
    }
    return std::sqrt(det);
}

// Metric-weighted Frobenius norm of a fully lowered 4-tensor.
double weighted_norm(const double t[4][4][4][4], const Mat4& ginv) {
    double up[4][4][4][4];
    double tmp[4][4][4][4];
    // Raise indices one at a time.
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) {
                    double s = 0.0;
                    for (int e = 0; e < 4; ++e) s += ginv[a][e] * t[e][b][c][d];
                    up[a][b][c][d] = s;
                }
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) {
                    double s = 0.0;
                    for (int e = 0; e < 4; ++e) s += ginv[b][e] * up[a][e][c][d];
                    tmp[a][b][c][d] = s;
                }
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) {
                    double s = 0.0;
                    for (int e = 0; e < 4; ++e) s += ginv[c][e] * tmp[a][b][e][d];
                    up[a][b][c][d] = s;
                }
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) {
                    double s = 0.0;
                    for (int e = 0; e < 4; ++e) s += ginv[d][e] * up[a][b][c][e];
                    tmp[a][b][c][d] = s;
                }
    double n2 = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) n2 += t[a][b][c][d] * tmp[a][b][c][d];
    return std::sqrt(std::abs(n2));
}

// Star on the last index pair of a lowered 4-tensor.
void star_last_pair(const double t[4][4][4][4], const Mat4& ginv, double sign_sqrtg,
                    double out[4][4][4][4]) {
    double up2[4][4][4][4];
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int m = 0; m < 4; ++m)
                for (int n = 0; n < 4; ++n) {
                    double s = 0.0;
                    for (int e = 0; e < 4; ++e)
                        for (int f = 0; f < 4; ++f) s += t[a][b][e][f] * ginv[e][m] * ginv[f][n];
                    up2[a][b][m][n] = s;
                }
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) {
                    double s = 0.0;
                    for (int m = 0; m < 4; ++m)
                        for (int n = 0; n < 4; ++n) {
                            const int e = eps4(c, d, m, n);
                            if (e != 0) s += e * up2[a][b][m][n];
                        }
                    out[a][b][c][d] = 0.5 * sign_sqrtg * s;
                }
}

} // namespace

ChristoffelJet christoffel(const MetricJet& mj) {
    const RealMetric4 g = mj.value();
    const double det = g.det();
    if (!std::isfinite(det) || det == 0.0) {
        throw std::runtime_error("metric not invertible (det = " + std::to_string(det) + ")");
    }
    const Mat4 ginv = g.inverse();

    double dg[4][4][4];   // dg[e][a][b] = d_e g_ab
    double ddg[4][4][4][4]; // ddg[e][f][a][b] = d_e d_f g_ab
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const Jet2& j = mj.at(a, b);
            for (int e = 0; e < 4; ++e) {
                dg[e][a][b] = j.grad[e];
                for (int f = 0; f < 4; ++f) ddg[e][f][a][b] = j.h(e, f);
            }
        }

    ChristoffelJet cj;
    double half_dg[4][4][4]; // half_dg[d][b][c] = (d_b g_dc + d_c g_db - d_d g_bc) / 2
    for (int d = 0; d < 4; ++d)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                half_dg[d][b][c] = 0.5 * (dg[b][d][c] + dg[c][d][b] - dg[d][b][c]);

    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) {
                double s = 0.0;
                for (int d = 0; d < 4; ++d) s += ginv[a][d] * half_dg[d][b][c];
                cj.gamma[a][b][c] = s;
            }

    // d_e ginv = -ginv (d_e g) ginv.
    double dginv[4][4][4];
    for (int e = 0; e < 4; ++e)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                double s = 0.0;
                for (int m = 0; m < 4; ++m)
                    for (int n = 0; n < 4; ++n) s += ginv[a][m] * dg[e][m][n] * ginv[n][b];
                dginv[e][a][b] = -s;
            }

    for (int e = 0; e < 4; ++e)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c) {
                    double s = 0.0;
                    for (int d = 0; d < 4; ++d) {
                        s += dginv[e][a][d] * half_dg[d][b][c];
                        s += 0.5 * ginv[a][d] *
                             (ddg[e][b][d][c] + ddg[e][c][d][b] - ddg[e][d][b][c]);
                    }
                    cj.dgamma[e][a][b][c] = s;
                }
    return cj;
}

CurvaturePack riemann_from_metric(const MetricJet& mj) {
    const ChristoffelJet cj = christoffel(mj);
    const RealMetric4 g = mj.value();
    const Mat4 ginv = g.inverse();

    // R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb}
    //           + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}.
    double up[4][4][4][4];
    double assembly_scale = 0.0, max_up = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) {
                    double s = cj.dgamma[c][a][d][b] - cj.dgamma[d][a][c][b];
                    double scale = std::abs(cj.dgamma[c][a][d][b]) + std::abs(cj.dgamma[d][a][c][b]);
                    for (int e = 0; e < 4; ++e) {
                        const double t1 = cj.gamma[a][c][e] * cj.gamma[e][d][b];
                        const double t2 = cj.gamma[a][d][e] * cj.gamma[e][c][b];
                        s += t1 - t2;
                        scale += std::abs(t1) + std::abs(t2);
                    }
                    up[a][b][c][d] = s;
                    assembly_scale = std::max(assembly_scale, scale);
                    max_up = std::max(max_up, std::abs(s));
                }

    CurvaturePack pack;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) {
                    double s = 0.0;
                    for (int e = 0; e < 4; ++e) s += g.g[a][e] * up[e][b][c][d];
                    pack.riem[a][b][c][d] = s;
                }

    for (int b = 0; b < 4; ++b)
        for (int d = 0; d < 4; ++d) {
            double s = 0.0;
            for (int a = 0; a < 4; ++a) s += up[a][b][a][d];
            pack.ricci[b][d] = s;
        }
    pack.scalar = 0.0;
    for (int b = 0; b < 4; ++b)
        for (int d = 0; d < 4; ++d) pack.scalar += ginv[b][d] * pack.ricci[b][d];

    double riem_scale = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d)
                    riem_scale = std::max(riem_scale, std::abs(pack.riem[a][b][c][d]));
    double worst = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) {
                    const auto& R = pack.riem;
                    worst = std::max(worst, std::abs(R[a][b][c][d] + R[b][a][c][d]));
                    worst = std::max(worst, std::abs(R[a][b][c][d] + R[a][b][d][c]));
                    worst = std::max(worst, std::abs(R[a][b][c][d] - R[c][d][a][b]));
                    worst = std::max(worst,
                                     std::abs(R[a][b][c][d] + R[a][c][d][b] + R[a][d][b][c]));
                }
    pack.symmetry_residual = worst / (riem_scale + kTiny);

    pack.riem_norm = weighted_norm(pack.riem, ginv);
    double ric2 = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d)
                    ric2 += pack.ricci[a][b] * pack.ricci[c][d] * ginv[a][c] * ginv[b][d];
    pack.ricci_norm = std::sqrt(std::abs(ric2));

    pack.flat = max_up <= 1e-10 * assembly_scale;
    return pack;
}

void decompose_duality(CurvaturePack& pack, const RealMetric4& g, int orientation_sign) {
    pack.orientation_sign = orientation_sign;
    if (pack.flat) {
        pack.asd_residual = 0.0;
        pack.sd_part_norm = 0.0;
        pack.asd_part_norm = 0.0;
        return;
    }
    const Mat4 ginv = g.inverse();
    const double sg = orientation_sign * positive_sqrt_det(g);

    double star[4][4][4][4];
    star_last_pair(pack.riem, ginv, sg, star);

    double plus[4][4][4][4], minus[4][4][4][4];
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) {
                    plus[a][b][c][d] = pack.riem[a][b][c][d] + star[a][b][c][d];
                    minus[a][b][c][d] = pack.riem[a][b][c][d] - star[a][b][c][d];
                }
    const double plus_norm = weighted_norm(plus, ginv);
    const double minus_norm = weighted_norm(minus, ginv);
    pack.sd_part_norm = 0.5 * plus_norm;
    pack.asd_part_norm = 0.5 * minus_norm;
    pack.asd_residual = plus_norm / (pack.riem_norm + kTiny);
}

CurvaturePack riemann(const ExpSumPotential& pot, double nu, const RealChartPoint& at,
                      const GeometryGuards& guards) {
    const MetricJet mj = metric_jet_at(pot, nu, at, guards);
    CurvaturePack pack = riemann_from_metric(mj);
    const Coframe cf = coframe_at(pot, nu, at, guards);
    const RealMetric4 g = mj.value();
    const int sign = calibrate_orientation(kahler_triple(cf), g);
    decompose_duality(pack, g, sign);
    return pack;
}

TwoForm hodge_star(const TwoForm& f, const RealMetric4& g, int sign) {
    const Mat4 ginv = g.inverse();
    const double sg = sign * positive_sqrt_det(g);

    double fup[4][4];
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) {
            double s = 0.0;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) s += ginv[m][a] * ginv[n][b] * f.at(a, b);
            fup[m][n] = s;
        }
    TwoForm out;
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
            double s = 0.0;
            for (int m = 0; m < 4; ++m)
                for (int n = 0; n < 4; ++n) {
                    const int e = eps4(a, b, m, n);
                    if (e != 0) s += e * fup[m][n];
                }
            out.comp[TwoForm::index(a, b)] = 0.5 * sg * s;
        }
    return out;
}

int calibrate_orientation(const KahlerTriple& t, const RealMetric4& g) {
    const TwoForm* forms[3] = {&t.theta0, &t.theta_plus, &t.theta_minus};
    for (const int sign : {+1, -1}) {
        double worst = 0.0;
        for (const TwoForm* f : forms) {
            const TwoForm s = hodge_star(*f, g, sign);
            double num = 0.0, den = 0.0;
            for (int k = 0; k < 6; ++k) {
                num += std::abs(s.comp[k] - f->comp[k]);
                den += std::abs(f->comp[k]);
            }
            worst = std::max(worst, num / (den + kTiny));
        }
        if (worst <= 1e-8) return sign;
    }
    throw std::runtime_error("orientation calibration failed: the 2-form triple is not "
                             "self-dual for either sign");
}

int calibrate_orientation(const ExpSumPotential& pot, double nu, const RealChartPoint& at,
                          const GeometryGuards& guards) {
    const Coframe cf = coframe_at(pot, nu, at, guards);
    return calibrate_orientation(kahler_triple(cf), metric_at(pot, nu, at, guards));
}

double asd_residual(const ExpSumPotential& pot, double nu, const RealChartPoint& at,
                    const GeometryGuards& guards) {
    return riemann(pot, nu, at, guards).asd_residual;
}

ClosednessResidual closedness_residual(const CoframeJet& fj) {
    constexpr Complex mi{0.0, -1.0}; // 1/i

    // Real gradient of every component of the three 2-forms.
    double grad[3][4][6];
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            const TaylorScalar ll =
                fj.l[i] * fj.l[j].conjugate() - fj.l[j] * fj.l[i].conjugate();
            const TaylorScalar mm =
                fj.m[i] * fj.m[j].conjugate() - fj.m[j] * fj.m[i].conjugate();
            const TaylorScalar lm =
                fj.l[i] * fj.m[j].conjugate() - fj.l[j] * fj.m[i].conjugate();
            const TaylorScalar cl =
                fj.l[i].conjugate() * fj.m[j] - fj.l[j].conjugate() * fj.m[i];

            const TaylorScalar th[3] = {mi * (ll - mm), Complex{0.5, 0.0} * (lm + cl),
                                        Complex{0.0, -0.5} * (lm - cl)};
            const int k = TwoForm::index(i, j);
            for (int t = 0; t < 3; ++t)
                for (int e = 0; e < 4; ++e) grad[t][e][k] = th[t].grad(e).real();
        }

    static constexpr int combos[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
    ClosednessResidual r;
    for (int t = 0; t < 3; ++t) {
        double num = 0.0, den = 0.0;
        for (const auto& c : combos) {
            const int mu = c[0], nv = c[1], rh = c[2];
            const double t1 = grad[t][mu][TwoForm::index(nv, rh)];
            const double t2 = grad[t][nv][TwoForm::index(mu, rh)];
            const double t3 = grad[t][rh][TwoForm::index(mu, nv)];
            num += std::abs(t1 - t2 + t3);
            den += std::abs(t1) + std::abs(t2) + std::abs(t3);
        }
        r.rel[t] = num / (den + kTiny);
    }
    return r;
}

ClosednessResidual closedness_residual(const ExpSumPotential& pot, double nu,
                                       const RealChartPoint& at, const GeometryGuards& guards) {
    return closedness_residual(coframe_jet_at(pot, nu, at, guards));
}

DensityPair hitchin_density(const CurvaturePack& pack, const RealMetric4& g,
                            int orientation_sign) {
    DensityPair d;
    if (pack.flat) return d;

    const Mat4 ginv = g.inverse();
    const double sg = orientation_sign * positive_sqrt_det(g);

    double up[4][4][4][4]; // R^a_{bcd}
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int dd = 0; dd < 4; ++dd) {
                    double s = 0.0;
                    for (int e = 0; e < 4; ++e) s += ginv[a][e] * pack.riem[e][b][c][dd];
                    up[a][b][c][dd] = s;
                }
    double star_up[4][4][4][4];
    star_last_pair(up, ginv, sg, star_up);

    double tau_coeff = 0.0, chi_coeff = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int dd = 0; dd < 4; ++dd)
                    for (int e = 0; e < 4; ++e)
                        for (int f = 0; f < 4; ++f) {
                            const int sgn = eps4(c, dd, e, f);
                            if (sgn == 0) continue;
                            tau_coeff += sgn * up[a][b][c][dd] * up[b][a][e][f];
                            chi_coeff += sgn * up[a][b][c][dd] * star_up[b][a][e][f];
                        }
    tau_coeff *= 0.25;
    chi_coeff *= 0.25;

    d.tau = tau_coeff / (24.0 * kPi * kPi * sg);
    d.chi = chi_coeff / (16.0 * kPi * kPi * sg);
    d.saturation_residual = std::abs(d.chi + 1.5 * d.tau) / (std::abs(d.chi) + std::abs(d.tau) + kTiny);
    return d;
}

DensityPair hitchin_density(const ExpSumPotential& pot, double nu, const RealChartPoint& at,
                            const GeometryGuards& guards) {
    const MetricJet mj = metric_jet_at(pot, nu, at, guards);
    CurvaturePack pack = riemann_from_metric(mj);
    const RealMetric4 g = mj.value();
    const int sign = calibrate_orientation(kahler_triple(coframe_at(pot, nu, at, guards)), g);
    return hitchin_density(pack, g, sign);
}

KillingResult killing_scan(const ExpSumPotential& pot, double nu,
                           const std::vector<RealChartPoint>& points,
                           const GeometryGuards& guards, double threshold) {
    std::vector<std::array<double, 4>> rows;
    int used = 0;
    for (const RealChartPoint& pt : points) {
        try {
            const MetricJet mj = metric_jet_at(pot, nu, pt, guards);
            for (int k = 0; k < 10; ++k) rows.push_back(mj.comp[k].grad);
            ++used;
        } catch (const std::domain_error&) {
        } catch (const std::range_error&) {
        }
    }

    bool fallback = false;
    if (used < 10) {
        // Identically singular locus: the metric exists nowhere, but its
        // ratios a/c, b/c are determined by v_p/v and v_2/v, and those fields
        // share the symmetry directions of the would-be metric.
        rows.clear();
        used = 0;
        fallback = true;
        for (const RealChartPoint& pt : points) {
            VJet vj;
            try {
                vj = jet(pot, pt.to_coord(), 3);
            } catch (const std::range_error&) {
                continue;
            }
            const double v0 = vj.at({0, 0, 0, 0}).real();
            if (!(v0 > 0.0) || v0 <= guards.positivity_rel * term_scale(pot, pt.to_coord()))
                continue;
            const TaylorScalar V = lift_derivative_of_v(vj, {0, 0, 0, 0});
            const TaylorScalar qp = lift_derivative_of_v(vj, {1, 0, 0, 0}) / V;
            const TaylorScalar q2 = lift_derivative_of_v(vj, {0, 0, 1, 0}) / V;
            std::array<double, 4> re_p{}, im_p{}, re_2{}, im_2{};
            for (int e = 0; e < 4; ++e) {
                re_p[e] = qp.grad(e).real();
                im_p[e] = qp.grad(e).imag();
                re_2[e] = q2.grad(e).real();
                im_2[e] = q2.grad(e).imag();
            }
            rows.push_back(re_p);
            rows.push_back(im_p);
            rows.push_back(re_2);
            rows.push_back(im_2);
            ++used;
        }
    }
    if (used < 10) {
        throw std::runtime_error("killing_scan: fewer than 10 admissible sample points");
    }

    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), 4);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (int c = 0; c < 4; ++c) m(static_cast<Eigen::Index>(r), c) = rows[r][c];

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinV);
    const auto sv = svd.singularValues();

    KillingResult res;
    res.points_used = used;
    res.used_fallback = fallback;
    for (int i = 0; i < 4; ++i) res.singular_values[i] = sv(i);
    const double smax = sv(0);
    int rank = 0;
    for (int i = 0; i < 4; ++i)
        if (sv(i) > threshold * smax) ++rank;
    res.rank = rank;
    if (rank < 4) {
        res.has_null = true;
        Eigen::Vector4d dir = svd.matrixV().col(3);
        int imax = 0;
        for (int i = 1; i < 4; ++i)
            if (std::abs(dir(i)) > std::abs(dir(imax))) imax = i;
        if (dir(imax) < 0.0) dir = -dir;
        for (int i = 0; i < 4; ++i) res.null_direction[i] = dir(i);
    }
    return res;
}

} // namespace cmahk
