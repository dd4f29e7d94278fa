#include "cmahk/spectrum_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace cmahk {

namespace {

using nlohmann::json;

void require_keys(const json& obj, std::initializer_list<const char*> keys,
                  const std::string& where) {
    if (!obj.is_object()) throw SpectrumParseError(where + " must be a JSON object");
    for (const char* k : keys) {
        if (!obj.contains(k)) {
            throw SpectrumParseError(where + " is missing required key \"" + k + "\"");
        }
    }
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : keys) known = known || it.key() == k;
        if (!known) throw SpectrumParseError(where + " has unknown key \"" + it.key() + "\"");
    }
}

double require_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw SpectrumParseError(where + " must be a number");
    return v.get<double>();
}

Complex parse_complex(const json& v, const std::string& where) {
    require_keys(v, {"re", "im"}, where);
    return {require_number(v["re"], where + ".re"), require_number(v["im"], where + ".im")};
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string fmt(const Complex& z) {
    return "{\"re\": " + fmt(z.real()) + ", \"im\": " + fmt(z.imag()) + "}";
}

} // namespace

SpectrumData parse_spectrum_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw SpectrumParseError(std::string("invalid JSON: ") + e.what());
    }
    require_keys(doc, {"nu", "modes"}, "spectrum");

    SpectrumData sd;
    sd.nu = require_number(doc["nu"], "nu");
    const json& modes = doc["modes"];
    if (!modes.is_array()) throw SpectrumParseError("\"modes\" must be an array");
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const std::string where = "modes[" + std::to_string(i) + "]";
        require_keys(modes[i], {"alpha", "F", "G"}, where);
        Mode m;
        m.alpha = parse_complex(modes[i]["alpha"], where + ".alpha");
        m.F = parse_complex(modes[i]["F"], where + ".F");
        m.G = parse_complex(modes[i]["G"], where + ".G");
        sd.modes.push_back(m);
    }
    return sd;
}

SpectrumData load_spectrum_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpectrumParseError("cannot open spectrum file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_spectrum_json(buf.str());
}

std::string spectrum_to_json(const SpectrumData& sd) {
    std::string out = "{\"nu\": " + fmt(sd.nu) + ", \"modes\": [";
    for (std::size_t i = 0; i < sd.modes.size(); ++i) {
        if (i) out += ", ";
        out += "{\"alpha\": " + fmt(sd.modes[i].alpha) + ", \"F\": " + fmt(sd.modes[i].F) +
               ", \"G\": " + fmt(sd.modes[i].G) + "}";
    }
    out += "]}";
    return out;
}

} // namespace cmahk
