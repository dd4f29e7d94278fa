// Command-line surface: validate and expand spectra, run the verification
// suites, evaluate metric and curvature data at points, and scan fields over
// grids.  Exit codes: 0 success, 1 verification or guard failure, 2 input
// error.

#include <CLI11.hpp>

#include "cmahk/curvature.hpp"
#include "cmahk/report_io.hpp"
#include "cmahk/spectrum_io.hpp"
#include "cmahk/verify.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace cmahk;

// Guard floor for single-point commands; the suites use their own (larger)
// statistical guard.
constexpr double kOpsNearLocusRel = 1e-8;

double parse_double(const std::string& s, const char* what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string(what) + ": \"" + s + "\" is not a number");
    }
    if (pos != s.size()) {
        throw std::invalid_argument(std::string(what) + ": \"" + s + "\" is not a number");
    }
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (const char ch : s) {
        if (ch == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    return parts;
}

Box parse_box(const std::string& s) {
    const auto parts = split(s, ',');
    if (parts.size() != 4) {
        throw std::invalid_argument("box must have four intervals: lo:hi,lo:hi,lo:hi,lo:hi");
    }
    Box box;
    for (int i = 0; i < 4; ++i) {
        const auto ends = split(parts[i], ':');
        if (ends.size() != 2) {
            throw std::invalid_argument("box interval \"" + parts[i] + "\" must be lo:hi");
        }
        box.lo[i] = parse_double(ends[0], "box");
        box.hi[i] = parse_double(ends[1], "box");
    }
    if (!box.valid()) throw std::invalid_argument("box intervals must satisfy lo < hi");
    return box;
}

RealChartPoint parse_at(const std::string& s) {
    const auto parts = split(s, ',');
    if (parts.size() != 4) {
        throw std::invalid_argument("--at must be x1,x2,x3,x4");
    }
    RealChartPoint p;
    for (int i = 0; i < 4; ++i) p.x[i] = parse_double(parts[i], "--at");
    return p;
}

struct LoadedSpectrum {
    SpectrumData data;
    ExpSumPotential pot;
    int merged_modes = 0;
};

LoadedSpectrum load(const std::string& path) {
    LoadedSpectrum ls;
    const SpectrumData raw = load_spectrum_file(path);
    ls.data = normalized(raw);
    ls.merged_modes = static_cast<int>(raw.modes.size() - ls.data.modes.size());
    ls.pot = expand(ls.data);
    return ls;
}

void print_row(double x) { std::printf("%.17g", x); }

int run_validate(const std::string& path) {
    const LoadedSpectrum ls = load(path);
    const ConjugationReport cr = conjugation_check(ls.pot);
    if (!cr.pass) {
        std::printf("error: expansion is not conjugation-closed: %s\n", cr.message.c_str());
        return 1;
    }
    if (ls.merged_modes > 0) {
        std::printf("note: merged %d duplicate-alpha mode%s\n", ls.merged_modes,
                    ls.merged_modes == 1 ? "" : "s");
    }
    std::printf("ok: nu=%.17g, %zu mode%s, %zu term%s, conjugation closed\n", ls.data.nu,
                ls.data.modes.size(), ls.data.modes.size() == 1 ? "" : "s", ls.pot.size(),
                ls.pot.size() == 1 ? "" : "s");
    return 0;
}

int run_expand(const std::string& path) {
    const LoadedSpectrum ls = load(path);
    std::printf("amplitude_re,amplitude_im,lp_re,lp_im,lq_re,lq_im,l2_re,l2_im,lw_re,lw_im\n");
    for (const ExpTerm& t : ls.pot.terms()) {
        const Complex vals[5] = {t.amplitude, t.lp, t.lq, t.l2, t.lw};
        for (int i = 0; i < 5; ++i) {
            if (i) std::printf(",");
            print_row(vals[i].real());
            std::printf(",");
            print_row(vals[i].imag());
        }
        std::printf("\n");
    }
    return 0;
}

int run_verify(const std::string& path, const SuiteConfig& config,
               const std::string& report_path) {
    const LoadedSpectrum ls = load(path);
    const SuiteReport rep = full_report(ls.pot, ls.data.nu, config);

    for (const CheckResult& c : rep.checks) {
        std::printf("%s %-32s worst=%.3e tol=%.1e n=%d\n", c.pass ? "PASS" : "FAIL",
                    c.name.c_str(), c.worst_residual, c.tolerance, c.n_evaluated);
    }
    std::printf("guards: attempted=%d overflow=%d v_nonpositive=%d near_locus=%d "
                "negative_locus=%d third_order_skipped=%d\n",
                rep.guards.attempted, rep.guards.overflow, rep.guards.v_nonpositive,
                rep.guards.near_locus, rep.guards.negative_locus,
                rep.guards.third_order_skipped);
    std::printf("orientation_sign: %d\n", rep.orientation_sign);
    if (rep.has_killing) {
        std::printf("killing: rank=%d has_null=%s fallback=%s points=%d\n", rep.killing.rank,
                    rep.killing.has_null ? "yes" : "no",
                    rep.killing.used_fallback ? "yes" : "no", rep.killing.points_used);
        if (rep.killing.has_null) {
            std::printf("null_direction: [%.6g, %.6g, %.6g, %.6g]\n",
                        rep.killing.null_direction[0], rep.killing.null_direction[1],
                        rep.killing.null_direction[2], rep.killing.null_direction[3]);
        }
    }
    if (!rep.advice.empty()) std::printf("advice: %s\n", rep.advice.c_str());
    if (!report_path.empty()) save_report_file(rep, report_path);
    return rep.all_pass() ? 0 : 1;
}

int run_metric(const std::string& path, const RealChartPoint& at) {
    const LoadedSpectrum ls = load(path);
    const GeometryGuards guards{kOpsNearLocusRel, 0.0};
    const RealMetric4 g = metric_at(ls.pot, ls.data.nu, at, guards);
    std::printf("metric at [%.17g, %.17g, %.17g, %.17g]:\n", at.x[0], at.x[1], at.x[2],
                at.x[3]);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) std::printf("%s%.17g", j ? " " : "  ", g.g[i][j]);
        std::printf("\n");
    }
    const auto ev = g.eigenvalues();
    std::printf("eigenvalues: %.17g %.17g %.17g %.17g\n", ev[0], ev[1], ev[2], ev[3]);
    std::printf("locus (c^2 - |a|^2): %.17g\n", singular_locus_value(ls.pot, ls.data.nu, at));
    return 0;
}

int run_curvature(const std::string& path, const RealChartPoint& at) {
    const LoadedSpectrum ls = load(path);
    const GeometryGuards guards{kOpsNearLocusRel, 0.0};
    const CurvaturePack pack = riemann(ls.pot, ls.data.nu, at, guards);
    const RealMetric4 g = metric_at(ls.pot, ls.data.nu, at, guards);
    const DensityPair dens = hitchin_density(pack, g, pack.orientation_sign);
    std::printf("riemann_norm: %.17g\n", pack.riem_norm);
    std::printf("ricci_norm: %.17g\n", pack.ricci_norm);
    std::printf("ricci_ratio: %.3e\n", pack.ricci_norm / (pack.riem_norm + 1e-300));
    std::printf("symmetry_residual: %.3e\n", pack.symmetry_residual);
    std::printf("orientation_sign: %d\n", pack.orientation_sign);
    std::printf("asd_residual: %.3e\n", pack.asd_residual);
    std::printf("chi_density: %.17g\n", dens.chi);
    std::printf("tau_density: %.17g\n", dens.tau);
    std::printf("hitchin_saturation: %.3e\n", dens.saturation_residual);
    std::printf("flat: %s\n", pack.flat ? "yes" : "no");
    return 0;
}

int run_scan(const std::string& path, int grid, const Box& box, const std::string& field,
             const std::string& out_path) {
    if (grid < 1) throw std::invalid_argument("--grid must be >= 1");
    if (field != "locus" && field != "v" && field != "asd") {
        throw std::invalid_argument("--field must be one of locus, v, asd");
    }
    const LoadedSpectrum ls = load(path);
    const GeometryGuards guards{kOpsNearLocusRel, 0.0};

    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!out_path.empty()) {
        file.open(out_path, std::ios::binary);
        if (!file) throw std::invalid_argument("cannot open output file: " + out_path);
        os = &file;
    }

    const auto coord = [&](int axis, int k) {
        if (grid == 1) return 0.5 * (box.lo[axis] + box.hi[axis]);
        return box.lo[axis] +
               static_cast<double>(k) * (box.hi[axis] - box.lo[axis]) /
                   static_cast<double>(grid - 1);
    };

    char buf[256];
    (*os) << "x1,x2,x3,x4,value\n";
    for (int i1 = 0; i1 < grid; ++i1)
        for (int i2 = 0; i2 < grid; ++i2)
            for (int i3 = 0; i3 < grid; ++i3)
                for (int i4 = 0; i4 < grid; ++i4) {
                    const RealChartPoint pt{
                        {coord(0, i1), coord(1, i2), coord(2, i3), coord(3, i4)}};
                    double value = std::nan("");
                    try {
                        if (field == "locus") {
                            value = singular_locus_value(ls.pot, ls.data.nu, pt);
                        } else if (field == "v") {
                            value = eval(ls.pot, pt.to_coord());
                        } else {
                            value = riemann(ls.pot, ls.data.nu, pt, guards).asd_residual;
                        }
                    } catch (const std::exception&) {
                        // excluded point: emitted as nan
                    }
                    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", pt.x[0],
                                  pt.x[1], pt.x[2], pt.x[3], value);
                    (*os) << buf;
                }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exponential-sum toolkit: expand discrete spectra into potentials, assemble "
                 "the induced 4-metrics, and verify every pointwise identity"};
    app.require_subcommand(1);

    std::string path, box_str, at_str, report_path, field = "locus", out_path;
    int n_points = 200, grid = 5;
    std::uint64_t seed = 42;

    CLI::App* validate = app.add_subcommand("validate", "parse a spectrum file and check it");
    validate->add_option("file", path, "spectrum JSON file")->required();

    CLI::App* expand_cmd = app.add_subcommand("expand", "print the expanded term table");
    expand_cmd->add_option("file", path, "spectrum JSON file")->required();

    CLI::App* verify = app.add_subcommand("verify", "run the full verification suites");
    verify->add_option("file", path, "spectrum JSON file")->required();
    verify->add_option("--points", n_points, "sample points per suite");
    verify->add_option("--seed", seed, "sampling seed");
    verify->add_option("--box", box_str, "sample box lo:hi,lo:hi,lo:hi,lo:hi");
    verify->add_option("--report", report_path, "write the JSON report here");

    CLI::App* metric = app.add_subcommand("metric", "print the metric at a point");
    metric->add_option("file", path, "spectrum JSON file")->required();
    metric->add_option("--at", at_str, "point x1,x2,x3,x4")->required();

    CLI::App* curvature = app.add_subcommand("curvature", "print curvature data at a point");
    curvature->add_option("file", path, "spectrum JSON file")->required();
    curvature->add_option("--at", at_str, "point x1,x2,x3,x4")->required();

    CLI::App* scan = app.add_subcommand("scan", "write a CSV grid of a scalar field");
    scan->add_option("file", path, "spectrum JSON file")->required();
    scan->add_option("--grid", grid, "points per axis");
    scan->add_option("--box", box_str, "grid box lo:hi,lo:hi,lo:hi,lo:hi");
    scan->add_option("--field", field, "locus, v, or asd");
    scan->add_option("--out", out_path, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*validate) return run_validate(path);
        if (*expand_cmd) return run_expand(path);
        if (*verify) {
            SuiteConfig config;
            config.n_points = n_points;
            config.seed = seed;
            if (!box_str.empty()) config.box = parse_box(box_str);
            return run_verify(path, config, report_path);
        }
        if (*metric) return run_metric(path, parse_at(at_str));
        if (*curvature) return run_curvature(path, parse_at(at_str));
        if (*scan) {
            Box box;
            if (!box_str.empty()) box = parse_box(box_str);
            return run_scan(path, grid, box, field, out_path);
        }
    } catch (const PositivityError& e) {
        std::fprintf(stderr, "guard: %s\n", e.what());
        return 1;
    } catch (const NearLocusError& e) {
        std::fprintf(stderr, "guard: %s\n", e.what());
        return 1;
    } catch (const SignatureError& e) {
        std::fprintf(stderr, "guard: %s\n", e.what());
        return 1;
    } catch (const SpectrumParseError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const ReportParseError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "failure: %s\n", e.what());
        return 1;
    }
    return 2;
}
