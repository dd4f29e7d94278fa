#pragma once

// Discrete spectra {nu; (alpha_j, F_j, G_j)} and their expansion into closed
// exponential sums.  Every expanded term satisfies six linear per-term
// identities exactly; term_residuals exposes them for verification.

#include "cmahk/expsum.hpp"

namespace cmahk {

struct Mode {
    Complex alpha{1.0, 0.0};
    Complex F{0.0, 0.0};
    Complex G{0.0, 0.0};
};

struct SpectrumData {
    double nu = 0.0;
    std::vector<Mode> modes;
};

// Merges modes with exactly equal alpha (amplitudes add) and validates
// |alpha| >= 1 (domain error otherwise, naming the offending mode).
SpectrumData normalized(const SpectrumData& sd);

// s = sqrt(1 - 1/|alpha|^2).  |alpha| < 1 is rejected; values within 1e-12
// below the unit circle are treated as exactly on it so boundary modes
// survive decimal parsing.
double mode_s(const Complex& alpha);

// Four-term expansion of one mode (F-branch pair + G-branch pair); branches
// coincide and merge when s = 0.  Result is closed under conjugation.
ExpSumPotential expand(const SpectrumData& sd);

struct TermResiduals {
    Complex e1, e2, e3, e4, e2c, e3c;
    double max_abs() const;
};

// The six per-term identities obtained by substituting one exponential term
// into the linear system; all vanish identically for expanded spectra.
TermResiduals term_residuals(const ExpTerm& t, double nu);

struct SolutionReport {
    bool pass = true;
    double worst = 0.0;
    std::size_t worst_term = 0;
    TermResiduals worst_residuals{};
    std::string message;
};

// Checks every term's six residuals against tol (absolute).
SolutionReport is_solution(const ExpSumPotential& pot, double nu, double tol = 1e-10);

// One-mode family with G = 0: identically degenerate (the associated metric
// denominator c^2 - |a|^2 vanishes everywhere), used as the negative-domain
// fixture.  Derivation intermediates are not stored; only the expansion is.
struct SingularFamily {
    Complex alpha{1.0, 0.0};
    Complex F{1.0, 0.0};
    double nu = 0.0;
};

ExpSumPotential singular_family(const SingularFamily& fam);

} // namespace cmahk
