#pragma once

// Suite report serialization.  The emitter writes a fixed key order with 17
// significant digits, so identical reports produce byte-identical files and
// every double survives the round trip exactly.

#include "cmahk/verify.hpp"

#include <stdexcept>
#include <string>

namespace cmahk {

struct ReportParseError : std::runtime_error {
    explicit ReportParseError(const std::string& what) : std::runtime_error(what) {}
};

std::string report_to_json(const SuiteReport& rep);

SuiteReport parse_report_json(const std::string& text);

void save_report_file(const SuiteReport& rep, const std::string& path);
SuiteReport load_report_file(const std::string& path);

} // namespace cmahk
