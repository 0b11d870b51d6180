#pragma once

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hyiga/benchmarks.hpp"

namespace hyiga {

/// One setting with where it came from ("file.ini:12" or "--degree").
struct Setting {
    std::string value;
    std::string origin;
};

/// Flat "section.key" -> setting map; later assignments replace earlier ones.
using RawConfig = std::map<std::string, Setting>;

inline const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "run.problem",     "run.formulation", "run.degree",        "run.refine",     "run.slenderness",
        "run.nu",          "run.t_eval",      "run.quadrature",    "material.E",     "material.nu",
        "output.dir",      "output.formats",  "output.vtk_samples", "output.magnification",
    };
    return keys;
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] inline void fail(const std::string& origin, const std::string& msg) {
    throw ConfigError(origin + ": " + msg);
}

}  // namespace detail

/// INI subset: [section] headers, key = value lines, '#' or ';' comments.
/// Keys before any section belong to [run].
inline RawConfig parse_ini(const std::string& text, const std::string& source) {
    RawConfig out;
    std::istringstream in(text);
    std::string line;
    std::string section = "run";
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string origin = source + ":" + std::to_string(lineno);
        const auto hash = line.find_first_of("#;");
        std::string s = detail::trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (s.empty()) {
            continue;
        }
        if (s.front() == '[') {
            if (s.back() != ']' || s.size() < 3) {
                detail::fail(origin, "malformed section header '" + s + "'");
            }
            section = detail::trim(s.substr(1, s.size() - 2));
            if (section != "run" && section != "material" && section != "output") {
                detail::fail(origin, "unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            detail::fail(origin, "expected 'key = value', got '" + s + "'");
        }
        const std::string key = detail::trim(s.substr(0, eq));
        const std::string value = detail::trim(s.substr(eq + 1));
        const std::string full = section + "." + key;
        if (!known_keys().count(full)) {
            detail::fail(origin, "unknown key '" + key + "' in section [" + section + "]");
        }
        if (value.empty()) {
            detail::fail(origin, "empty value for '" + key + "'");
        }
        out[full] = {value, origin};
    }
    return out;
}

inline RawConfig load_ini(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_ini(buf.str(), path);
}

enum class OutputFormat { csv, vtk, mm };

struct RunConfig {
    bench::Problem problem = bench::Problem::straight_beam;
    std::vector<Formulation> formulations{Formulation::conventional, Formulation::hybrid};
    std::vector<int> degrees{2};
    std::vector<int> levels{0, 1, 2, 3};
    double slenderness = 10.0;
    std::optional<double> nu;
    TEval t_eval = TEval::centroid;
    int quadrature = 0;
    std::optional<double> E;
    std::optional<double> material_nu;
    std::string output_dir = "hyiga_out";
    std::set<OutputFormat> formats{OutputFormat::csv};
    int vtk_samples = 4;
    double magnification = 1.0;

    bench::CaseParams case_params() const {
        bench::CaseParams p;
        p.slenderness = slenderness;
        p.E = E;
        if (problem == bench::Problem::plate) {
            p.nu = material_nu.value_or(nu.value_or(0.3));
        } else {
            p.nu_override = material_nu ? material_nu : nu;
        }
        return p;
    }

    ElementOptions element_options() const {
        ElementOptions o;
        o.t_eval = t_eval;
        o.quadrature_points = quadrature;
        return o;
    }
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        out.push_back(trim(item));
    }
    return out;
}

inline double to_double(const Setting& s, const std::string& key) {
    const char* b = s.value.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(b, &end);
    if (end == b || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
        fail(s.origin, key + ": '" + s.value + "' is not a finite number");
    }
    return v;
}

inline int to_int(const Setting& s, const std::string& key, const std::string& text) {
    const char* b = text.c_str();
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(b, &end, 10);
    if (end == b || *end != '\0' || errno == ERANGE || v < -1000000 || v > 1000000) {
        fail(s.origin, key + ": '" + text + "' is not an integer");
    }
    return static_cast<int>(v);
}

/// "a..b", "a,b,c" or "a".
inline std::vector<int> int_list(const Setting& s, const std::string& key) {
    std::vector<int> out;
    const auto dots = s.value.find("..");
    if (dots != std::string::npos) {
        const int a = to_int(s, key, trim(s.value.substr(0, dots)));
        const int b = to_int(s, key, trim(s.value.substr(dots + 2)));
        if (b < a) {
            fail(s.origin, key + ": empty range '" + s.value + "'");
        }
        for (int k = a; k <= b; ++k) {
            out.push_back(k);
        }
        return out;
    }
    for (const std::string& item : split(s.value, ',')) {
        out.push_back(to_int(s, key, item));
    }
    return out;
}

}  // namespace detail

/// Validates every setting; errors carry the origin of the offending value.
inline RunConfig build_config(const RawConfig& raw) {
    RunConfig c;
    auto get = [&](const std::string& k) -> const Setting* {
        const auto it = raw.find(k);
        return it == raw.end() ? nullptr : &it->second;
    };
    for (const auto& [k, s] : raw) {
        if (!known_keys().count(k)) {
            detail::fail(s.origin, "unknown setting '" + k + "'");
        }
    }
    const Setting* problem = get("run.problem");
    if (!problem) {
        throw ConfigError("missing required setting run.problem (--problem)");
    }
    try {
        c.problem = bench::parse_problem(problem->value);
    } catch (const ConfigError& e) {
        detail::fail(problem->origin, e.what());
    }
    if (const Setting* s = get("run.formulation")) {
        c.formulations.clear();
        for (const std::string& f : detail::split(s->value, ',')) {
            Formulation parsed{};
            try {
                parsed = parse_formulation(f);
            } catch (const ConfigError& e) {
                detail::fail(s->origin, e.what());
            }
            if (std::find(c.formulations.begin(), c.formulations.end(), parsed) != c.formulations.end()) {
                detail::fail(s->origin, "formulation '" + f + "' listed twice");
            }
            c.formulations.push_back(parsed);
        }
    }
    if (const Setting* s = get("run.degree")) {
        c.degrees = detail::int_list(*s, "degree");
        for (int d : c.degrees) {
            if (d < 1 || d > 3) {
                detail::fail(s->origin, "degree " + std::to_string(d) + " outside 1..3");
            }
        }
    }
    if (const Setting* s = get("run.refine")) {
        c.levels = detail::int_list(*s, "refine");
        for (int l : c.levels) {
            if (l < 0 || l > 6) {
                detail::fail(s->origin, "refinement level " + std::to_string(l) + " outside 0..6");
            }
        }
    }
    if (const Setting* s = get("run.slenderness")) {
        c.slenderness = detail::to_double(*s, "slenderness");
        if (c.problem == bench::Problem::straight_beam || c.problem == bench::Problem::curved_beam) {
            if (c.slenderness != 10.0 && c.slenderness != 100.0 && c.slenderness != 1000.0) {
                detail::fail(s->origin, "slenderness must be 10, 100 or 1000");
            }
        }
    }
    auto check_nu = [](const Setting& s, double v) {
        if (!(v > -1.0 && v < 0.5)) {
            detail::fail(s.origin, "Poisson ratio " + s.value + " outside (-1, 0.5)");
        }
    };
    if (const Setting* s = get("run.nu")) {
        c.nu = detail::to_double(*s, "nu");
        check_nu(*s, *c.nu);
    }
    if (const Setting* s = get("run.t_eval")) {
        try {
            c.t_eval = parse_t_eval(s->value);
        } catch (const ConfigError& e) {
            detail::fail(s->origin, e.what());
        }
    }
    if (const Setting* s = get("run.quadrature")) {
        c.quadrature = detail::to_int(*s, "quadrature", s->value);
        if (c.quadrature < 0 || c.quadrature > 16) {
            detail::fail(s->origin, "quadrature must be 0 (automatic) or 1..16");
        }
    }
    if (const Setting* s = get("material.E")) {
        c.E = detail::to_double(*s, "E");
        if (!(*c.E > 0.0)) {
            detail::fail(s->origin, "E must be positive");
        }
    }
    if (const Setting* s = get("material.nu")) {
        c.material_nu = detail::to_double(*s, "nu");
        check_nu(*s, *c.material_nu);
    }
    if (const Setting* s = get("output.dir")) {
        c.output_dir = s->value;
    }
    if (const Setting* s = get("output.formats")) {
        c.formats.clear();
        for (const std::string& f : detail::split(s->value, ',')) {
            if (f == "csv") {
                c.formats.insert(OutputFormat::csv);
            } else if (f == "vtk") {
                c.formats.insert(OutputFormat::vtk);
            } else if (f == "mm") {
                c.formats.insert(OutputFormat::mm);
            } else {
                detail::fail(s->origin, "unknown output format '" + f + "' (expected csv, vtk or mm)");
            }
        }
    }
    if (const Setting* s = get("output.vtk_samples")) {
        c.vtk_samples = detail::to_int(*s, "vtk_samples", s->value);
        if (c.vtk_samples < 2 || c.vtk_samples > 64) {
            detail::fail(s->origin, "vtk_samples must be in 2..64");
        }
    }
    if (const Setting* s = get("output.magnification")) {
        c.magnification = detail::to_double(*s, "magnification");
    }
    if (c.formulations.empty() || c.degrees.empty() || c.levels.empty()) {
        throw ConfigError("need at least one formulation, degree and refinement level");
    }
    // degree/problem compatibility and hybrid-specific limits
    const bench::BenchmarkCase probe = [&] {
        try {
            return bench::make_case(c.problem, c.case_params());
        } catch (const Error& e) {
            throw ConfigError(std::string("invalid case parameters: ") + e.what());
        }
    }();
    for (int d : c.degrees) {
        if (d < probe.min_degree) {
            const Setting* s = get("run.degree");
            detail::fail(s ? s->origin : std::string("defaults"),
                         "degree " + std::to_string(d) + " cannot represent the " + bench::to_string(c.problem) +
                             " geometry (minimum " + std::to_string(probe.min_degree) + ")");
        }
    }
    return c;
}

}  // namespace hyiga
