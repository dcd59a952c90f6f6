#pragma once

// JSON schema for parameter files and report serialization helpers.
// Infinities are written as the strings "inf" / "-inf".

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "params.hpp"

namespace hestonlaw {

using json = nlohmann::json;

inline json number(double x) {
    if (std::isinf(x)) return x > 0 ? json("inf") : json("-inf");
    if (std::isnan(x)) return json("nan");
    return json(x);
}

inline double read_number(const json& j, const std::string& field) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
    }
    throw ValidationError(field, "must be a number");
}

struct ParamsFile {
    ModelParams params;
    Horizon horizon;
};

// Keys: a, b, c, rho, v0, t (required); s0 (default 1), mu (default 0).
// Unknown keys are rejected. c < 0 is canonicalized.
inline ParamsFile params_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("params", "must be a JSON object");
    static const std::set<std::string> known = {"a", "b", "c", "rho", "s0", "v0", "mu", "t"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw ValidationError(key, "unknown parameter key");
    auto get = [&](const char* key) -> double {
        if (!j.contains(key)) throw ValidationError(key, "missing required key");
        return read_number(j.at(key), key);
    };
    auto get_or = [&](const char* key, double fallback) {
        return j.contains(key) ? read_number(j.at(key), key) : fallback;
    };
    ParamsFile out;
    out.params = make_params(get("a"), get("b"), get("c"), get("rho"), get_or("s0", 1.0), get("v0"), get_or("mu", 0.0));
    out.horizon = Horizon{get("t")};
    validate(out.horizon);
    return out;
}

inline ParamsFile params_from_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError("params", std::string("invalid JSON: ") + e.what());
    }
    return params_from_json(j);
}

inline ParamsFile load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("params", "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return params_from_string(ss.str());
}

inline json params_to_json(const ModelParams& p, const Horizon& h) {
    return json{{"a", p.a}, {"b", p.b}, {"c", p.c}, {"rho", p.rho}, {"s0", p.s0},
                {"v0", p.v0}, {"mu", p.mu}, {"t", h.t}};
}

} // namespace hestonlaw
