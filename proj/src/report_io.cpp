#include "cmahk/report_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace cmahk {

namespace {

using nlohmann::json;

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (const char ch : s) {
        switch (ch) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(ch) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
                out += buf;
            } else {
                out += ch;
            }
        }
    }
    out += "\"";
    return out;
}

template <std::size_t N>
std::string fmt_array(const std::array<double, N>& a) {
    std::string out = "[";
    for (std::size_t i = 0; i < N; ++i) {
        if (i) out += ", ";
        out += fmt(a[i]);
    }
    out += "]";
    return out;
}

const json& member(const json& obj, const char* key, const char* where) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw ReportParseError(std::string(where) + ": missing key \"" + key + "\"");
    }
    return obj[key];
}

double num(const json& obj, const char* key, const char* where) {
    const json& v = member(obj, key, where);
    if (!v.is_number()) throw ReportParseError(std::string(where) + "." + key + " not a number");
    return v.get<double>();
}

int integer(const json& obj, const char* key, const char* where) {
    return static_cast<int>(num(obj, key, where));
}

bool boolean(const json& obj, const char* key, const char* where) {
    const json& v = member(obj, key, where);
    if (!v.is_boolean()) throw ReportParseError(std::string(where) + "." + key + " not a bool");
    return v.get<bool>();
}

template <std::size_t N>
std::array<double, N> darray(const json& obj, const char* key, const char* where) {
    const json& v = member(obj, key, where);
    if (!v.is_array() || v.size() != N) {
        throw ReportParseError(std::string(where) + "." + key + " must be an array of " +
                               std::to_string(N) + " numbers");
    }
    std::array<double, N> a{};
    for (std::size_t i = 0; i < N; ++i) a[i] = v[i].get<double>();
    return a;
}

} // namespace

std::string report_to_json(const SuiteReport& rep) {
    std::string out = "{\n";
    out += "  \"version\": " + quote(rep.version) + ",\n";
    out += "  \"orientation_sign\": " + std::to_string(rep.orientation_sign) + ",\n";
    out += "  \"advice\": " + quote(rep.advice) + ",\n";
    out += "  \"guard_counts\": {\"attempted\": " + std::to_string(rep.guards.attempted) +
           ", \"overflow\": " + std::to_string(rep.guards.overflow) +
           ", \"v_nonpositive\": " + std::to_string(rep.guards.v_nonpositive) +
           ", \"near_locus\": " + std::to_string(rep.guards.near_locus) +
           ", \"negative_locus\": " + std::to_string(rep.guards.negative_locus) +
           ", \"third_order_skipped\": " + std::to_string(rep.guards.third_order_skipped) +
           "},\n";
    out += "  \"checks\": [\n";
    for (std::size_t i = 0; i < rep.checks.size(); ++i) {
        const CheckResult& c = rep.checks[i];
        out += "    {\"name\": " + quote(c.name) + ", \"worst_residual\": " +
               fmt(c.worst_residual) + ", \"worst_point\": " + fmt_array(c.worst_point.x) +
               ", \"tolerance\": " + fmt(c.tolerance) +
               ", \"pass\": " + (c.pass ? "true" : "false") +
               ", \"n_evaluated\": " + std::to_string(c.n_evaluated) + "}";
        out += (i + 1 < rep.checks.size()) ? ",\n" : "\n";
    }
    out += "  ],\n";
    out += std::string("  \"has_killing\": ") + (rep.has_killing ? "true" : "false") + ",\n";
    out += "  \"killing\": {\"rank\": " + std::to_string(rep.killing.rank) +
           ", \"has_null\": " + (rep.killing.has_null ? "true" : "false") +
           ", \"null_direction\": " + fmt_array(rep.killing.null_direction) +
           ", \"singular_values\": " + fmt_array(rep.killing.singular_values) +
           ", \"points_used\": " + std::to_string(rep.killing.points_used) +
           ", \"used_fallback\": " + (rep.killing.used_fallback ? "true" : "false") + "}\n";
    out += "}\n";
    return out;
}

SuiteReport parse_report_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ReportParseError(std::string("invalid JSON: ") + e.what());
    }

    SuiteReport rep;
    const json& ver = member(doc, "version", "report");
    if (!ver.is_string()) throw ReportParseError("report.version not a string");
    rep.version = ver.get<std::string>();
    rep.orientation_sign = integer(doc, "orientation_sign", "report");
    const json& adv = member(doc, "advice", "report");
    if (!adv.is_string()) throw ReportParseError("report.advice not a string");
    rep.advice = adv.get<std::string>();

    const json& gc = member(doc, "guard_counts", "report");
    rep.guards.attempted = integer(gc, "attempted", "guard_counts");
    rep.guards.overflow = integer(gc, "overflow", "guard_counts");
    rep.guards.v_nonpositive = integer(gc, "v_nonpositive", "guard_counts");
    rep.guards.near_locus = integer(gc, "near_locus", "guard_counts");
    rep.guards.negative_locus = integer(gc, "negative_locus", "guard_counts");
    rep.guards.third_order_skipped = integer(gc, "third_order_skipped", "guard_counts");

    const json& checks = member(doc, "checks", "report");
    if (!checks.is_array()) throw ReportParseError("report.checks not an array");
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const json& jc = checks[i];
        CheckResult c;
        const json& name = member(jc, "name", "check");
        if (!name.is_string()) throw ReportParseError("check.name not a string");
        c.name = name.get<std::string>();
        c.worst_residual = num(jc, "worst_residual", "check");
        c.worst_point.x = darray<4>(jc, "worst_point", "check");
        c.tolerance = num(jc, "tolerance", "check");
        c.pass = boolean(jc, "pass", "check");
        c.n_evaluated = integer(jc, "n_evaluated", "check");
        rep.checks.push_back(c);
    }

    rep.has_killing = boolean(doc, "has_killing", "report");
    const json& k = member(doc, "killing", "report");
    rep.killing.rank = integer(k, "rank", "killing");
    rep.killing.has_null = boolean(k, "has_null", "killing");
    rep.killing.null_direction = darray<4>(k, "null_direction", "killing");
    rep.killing.singular_values = darray<4>(k, "singular_values", "killing");
    rep.killing.points_used = integer(k, "points_used", "killing");
    rep.killing.used_fallback = boolean(k, "used_fallback", "killing");
    return rep;
}

void save_report_file(const SuiteReport& rep, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ReportParseError("cannot open report file for writing: " + path);
    out << report_to_json(rep);
}

SuiteReport load_report_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ReportParseError("cannot open report file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_report_json(buf.str());
}

} // namespace cmahk
