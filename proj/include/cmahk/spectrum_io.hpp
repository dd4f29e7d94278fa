#pragma once

// Strict JSON (de)serialization of spectra.  The schema is fixed:
// {"nu": real, "modes": [{"alpha": {"re", "im"}, "F": {...}, "G": {...}}]}.
// Unknown or missing keys are errors, not warnings, so a typo in a hand
// written file cannot silently change the run.

#include "cmahk/spectrum.hpp"

#include <stdexcept>
#include <string>

namespace cmahk {

struct SpectrumParseError : std::runtime_error {
    explicit SpectrumParseError(const std::string& what) : std::runtime_error(what) {}
};

// Parses the document; throws SpectrumParseError on any schema violation.
// Mode invariants (|alpha| >= 1, nonempty modes) are checked by normalized(),
// not here.
SpectrumData parse_spectrum_json(const std::string& text);

SpectrumData load_spectrum_file(const std::string& path);

// Fixed-layout emitter, 17 significant digits; parse(emit(sd)) == sd.
std::string spectrum_to_json(const SpectrumData& sd);

} // namespace cmahk
