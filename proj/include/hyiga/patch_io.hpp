#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hyiga/nurbs_patch.hpp"

namespace hyiga {

// {degree_u, degree_v, knots_u[], knots_v[], cps[[x,y]...] (u index fastest), weights[]}

inline nlohmann::json patch_to_json(const NurbsPatch& p) {
    nlohmann::json j;
    j["degree_u"] = p.degree_u();
    j["degree_v"] = p.degree_v();
    j["knots_u"] = p.basis_u().knots();
    j["knots_v"] = p.basis_v().knots();
    nlohmann::json cps = nlohmann::json::array();
    for (const Vec2& x : p.control_points()) {
        cps.push_back({x.x(), x.y()});
    }
    j["cps"] = std::move(cps);
    j["weights"] = p.weights();
    return j;
}

inline NurbsPatch patch_from_json(const nlohmann::json& j) {
    try {
        for (const char* key : {"degree_u", "degree_v", "knots_u", "knots_v", "cps", "weights"}) {
            if (!j.contains(key)) {
                throw InputError(std::string("patch JSON: missing key '") + key + "'");
            }
        }
        std::vector<Vec2> cps;
        for (const auto& c : j.at("cps")) {
            if (!c.is_array() || c.size() < 2) {
                throw InputError("patch JSON: control point must be [x, y]");
            }
            cps.emplace_back(c[0].get<double>(), c[1].get<double>());
        }
        return NurbsPatch(KnotVector(j.at("degree_u").get<int>(), j.at("knots_u").get<std::vector<double>>()),
                          KnotVector(j.at("degree_v").get<int>(), j.at("knots_v").get<std::vector<double>>()),
                          std::move(cps), j.at("weights").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("patch JSON: ") + e.what());
    }
}

inline NurbsPatch load_patch(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open patch file '" + path + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("patch file '" + path + "': " + e.what());
    }
    return patch_from_json(j);
}

/// Pretty JSON with shortest round-trip number formatting.
inline std::string dump_patch(const NurbsPatch& p) { return patch_to_json(p).dump(2) + "\n"; }

#ifdef HYIGA_DATA_DIR
inline std::string fixture_path(const std::string& name) { return std::string(HYIGA_DATA_DIR) + "/fixtures/" + name; }
#endif

}  // namespace hyiga
