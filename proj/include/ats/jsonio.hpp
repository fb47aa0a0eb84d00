#pragma once

#include <initializer_list>
#include <string>

#include <json.hpp>

#include "ats/errors.hpp"

// Strict JSON access: required keys, type checks, and rejection of unknown
// fields, with messages naming the offending path.
namespace ats::jsonio {

using nlohmann::json;

inline const json& require(const json& j, const char* key, const std::string& ctx) {
    if (!j.is_object()) throw SchemaError(ctx + ": expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw SchemaError(ctx + ": missing required field '" + key + "'");
    return *it;
}

inline double number(const json& j, const char* key, const std::string& ctx) {
    const json& v = require(j, key, ctx);
    if (!v.is_number()) throw SchemaError(ctx + ": field '" + key + "' must be a number");
    return v.get<double>();
}

inline std::string text(const json& j, const char* key, const std::string& ctx) {
    const json& v = require(j, key, ctx);
    if (!v.is_string()) throw SchemaError(ctx + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                           const std::string& ctx) {
    if (!j.is_object()) throw SchemaError(ctx + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* a : allowed)
            if (it.key() == a) {
                known = true;
                break;
            }
        if (!known) throw SchemaError(ctx + ": unknown field '" + it.key() + "'");
    }
}

}  // namespace ats::jsonio
