#include "ats/config.hpp"

#include <fstream>

#include "ats/errors.hpp"
#include "ats/jsonio.hpp"

namespace ats::config {

namespace {

using nlohmann::json;

Eigen::Index index_field(const json& j, const char* key, const std::string& ctx,
                         Eigen::Index fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw SchemaError(ctx + ": field '" + key + "' must be a non-negative integer");
    return static_cast<Eigen::Index>(v.get<long long>());
}

double number_or(const json& j, const char* key, const std::string& ctx, double fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number()) throw SchemaError(ctx + ": field '" + key + "' must be a number");
    return v.get<double>();
}

std::vector<double> number_list(const json& j, const char* key, const std::string& ctx,
                                std::vector<double> fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_array()) throw SchemaError(ctx + ": field '" + key + "' must be an array");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number())
            throw SchemaError(ctx + ": field '" + key + "' must contain numbers only");
        out.push_back(e.get<double>());
    }
    return out;
}

}  // namespace

nlohmann::json ExperimentConfig::to_json() const {
    json j;
    j["version"] = version;
    j["model"] = model.to_json();
    j["curve_grid"] = {{"t_max", curve_grid.t_max}, {"nodes", curve_grid.nodes}};
    j["simulation"] = {{"horizon", simulation.horizon},
                       {"steps", simulation.steps},
                       {"paths", simulation.paths},
                       {"store_stride", simulation.store_stride}};
    j["validation"] = {{"maturity", validation.maturity},
                       {"checkpoints", validation.checkpoints},
                       {"x_max", validation.x_max},
                       {"x_nodes", validation.x_nodes},
                       {"v_nodes", validation.v_nodes},
                       {"paths", validation.paths},
                       {"steps", validation.steps}};
    j["pricing"] = {{"maturities", pricing.maturities}, {"path", pricing.path}};
    j["seed"] = seed;
    j["threads"] = threads;
    j["output"] = {{"dir", output.dir}, {"format", output.format}};
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    const std::string ctx = "config";
    jsonio::reject_unknown(j,
                           {"version", "model", "curve_grid", "simulation", "validation",
                            "pricing", "seed", "threads", "output"},
                           ctx);
    ExperimentConfig cfg;

    const json& version = jsonio::require(j, "version", ctx);
    if (!version.is_number_integer() || version.get<int>() != 1)
        throw SchemaError("config: unsupported version (expected 1)");
    cfg.version = 1;

    cfg.model = sde::ShortRateModel::from_json(jsonio::require(j, "model", ctx));

    if (j.contains("curve_grid")) {
        const json& g = j.at("curve_grid");
        jsonio::reject_unknown(g, {"t_max", "nodes"}, "config.curve_grid");
        cfg.curve_grid.t_max = number_or(g, "t_max", "config.curve_grid", cfg.curve_grid.t_max);
        cfg.curve_grid.nodes = index_field(g, "nodes", "config.curve_grid", cfg.curve_grid.nodes);
    }
    if (j.contains("simulation")) {
        const json& s = j.at("simulation");
        jsonio::reject_unknown(s, {"horizon", "steps", "paths", "store_stride"},
                               "config.simulation");
        cfg.simulation.horizon = number_or(s, "horizon", "config.simulation",
                                           cfg.simulation.horizon);
        cfg.simulation.steps = index_field(s, "steps", "config.simulation", cfg.simulation.steps);
        cfg.simulation.paths = index_field(s, "paths", "config.simulation", cfg.simulation.paths);
        cfg.simulation.store_stride =
            index_field(s, "store_stride", "config.simulation", cfg.simulation.store_stride);
    }
    if (j.contains("validation")) {
        const json& v = j.at("validation");
        jsonio::reject_unknown(
            v, {"maturity", "checkpoints", "x_max", "x_nodes", "v_nodes", "paths", "steps"},
            "config.validation");
        cfg.validation.maturity =
            number_or(v, "maturity", "config.validation", cfg.validation.maturity);
        cfg.validation.checkpoints =
            number_list(v, "checkpoints", "config.validation", cfg.validation.checkpoints);
        cfg.validation.x_max = number_or(v, "x_max", "config.validation", cfg.validation.x_max);
        cfg.validation.x_nodes =
            index_field(v, "x_nodes", "config.validation", cfg.validation.x_nodes);
        cfg.validation.v_nodes =
            index_field(v, "v_nodes", "config.validation", cfg.validation.v_nodes);
        cfg.validation.paths = index_field(v, "paths", "config.validation", cfg.validation.paths);
        cfg.validation.steps = index_field(v, "steps", "config.validation", cfg.validation.steps);
    }
    if (j.contains("pricing")) {
        const json& p = j.at("pricing");
        jsonio::reject_unknown(p, {"maturities", "path"}, "config.pricing");
        cfg.pricing.maturities =
            number_list(p, "maturities", "config.pricing", cfg.pricing.maturities);
        if (p.contains("path")) {
            if (!p.at("path").is_number_integer())
                throw SchemaError("config.pricing: field 'path' must be an integer");
            cfg.pricing.path = p.at("path").get<long long>();
        }
    }
    if (j.contains("seed")) {
        const json& s = j.at("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
            throw SchemaError("config: field 'seed' must be a non-negative integer");
        cfg.seed = s.get<std::uint64_t>();
    }
    if (j.contains("threads")) {
        const json& t = j.at("threads");
        if (!t.is_number_integer() || t.get<int>() < 1)
            throw SchemaError("config: field 'threads' must be a positive integer");
        cfg.threads = t.get<int>();
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        jsonio::reject_unknown(o, {"dir", "format"}, "config.output");
        if (o.contains("dir")) cfg.output.dir = jsonio::text(o, "dir", "config.output");
        if (o.contains("format")) cfg.output.format = jsonio::text(o, "format", "config.output");
    }
    if (cfg.output.format != "csv" && cfg.output.format != "json" && cfg.output.format != "bin")
        throw SchemaError("config.output: format must be csv, json or bin");
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw SchemaError("config file '" + path + "': " + e.what());
    }
    if (j.is_object() && j.contains("tool") && j.contains("config"))
        return from_json(j.at("config"));  // run manifest
    return from_json(j);
}

}  // namespace ats::config
