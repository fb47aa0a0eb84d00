#include "ats/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "ats/config.hpp"
#include "ats/curves.hpp"
#include "ats/errors.hpp"
#include "ats/pricing.hpp"
#include "ats/sde.hpp"
#include "ats/validate.hpp"
#include "ats/version.hpp"

namespace ats::cli {

namespace {

namespace fs = std::filesystem;
using config::ExperimentConfig;
using nlohmann::json;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> threads;
    std::optional<std::string> format;
};

ExperimentConfig resolve(const std::string& config_path, const Overrides& ov) {
    ExperimentConfig cfg = ExperimentConfig::load(config_path);
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.out) cfg.output.dir = *ov.out;
    if (ov.threads) cfg.threads = *ov.threads;
    if (ov.format) cfg.output.format = *ov.format;
    if (cfg.output.format != "csv" && cfg.output.format != "json" &&
        cfg.output.format != "bin")
        throw SchemaError("--format must be csv, json or bin");
    if (cfg.threads < 1) throw SchemaError("--threads must be >= 1");
    return cfg;
}

curves::CurvePair solve_curves(const ExperimentConfig& cfg) {
    const curves::Grid grid = curves::uniform_grid(cfg.curve_grid.t_max, cfg.curve_grid.nodes);
    const sde::ShortRateModel& m = cfg.model;
    if (const auto* p = std::get_if<sde::PowerLawDiffusion>(&m.diffusion()))
        return curves::solve_stable_riccati(m.drift_a(), m.drift_b(), p->c, p->alpha, grid);
    if (const auto* c = std::get_if<sde::ConstantDiffusion>(&m.diffusion()))
        return curves::solve_constant_vol_curves(m.drift_a(), m.drift_b(), c->sigma,
                                                 m.noise(), grid);
    const auto& ms = std::get<sde::MultiStableDiffusion>(m.diffusion());
    return curves::solve_multi_noise_riccati(m.drift_a(), m.drift_b(), ms.alpha, ms.beta,
                                             grid);
}

std::ofstream open_text(const fs::path& path) {
    std::ofstream f(path);
    if (!f) throw SchemaError("cannot write '" + path.string() + "'");
    return f;
}

std::ofstream open_binary(const fs::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw SchemaError("cannot write '" + path.string() + "'");
    return f;
}

fs::path ensure_out_dir(const ExperimentConfig& cfg) {
    fs::path dir(cfg.output.dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw SchemaError("cannot create output directory '" + dir.string() + "'");
    return dir;
}

void write_manifest(const ExperimentConfig& cfg, const std::string& command,
                    const fs::path& dir) {
    json m;
    m["tool"] = kToolName;
    m["version"] = kVersion;
    m["command"] = command;
    m["config"] = cfg.to_json();
    open_text(dir / "run_manifest.json") << m.dump(2) << '\n';
}

// Persisted reports drop the runtime so re-running a manifest reproduces the
// files byte-for-byte; the runtime still goes to stdout.
json report_json_for_file(const validate::ValidationReport& rep) {
    json j = rep.to_json();
    j.erase("runtime_seconds");
    return j;
}

std::vector<Eigen::Index> stride_steps(Eigen::Index steps, Eigen::Index stride) {
    if (stride < 1) throw SchemaError("simulation.store_stride must be >= 1");
    if (steps % stride != 0)
        throw SchemaError("simulation.store_stride must divide simulation.steps");
    std::vector<Eigen::Index> out;
    for (Eigen::Index k = 0; k <= steps; k += stride) out.push_back(k);
    return out;
}

void print_clamps(std::ostream& out, const sde::PathEnsemble& ensemble) {
    const sde::ClampReport rep = sde::clamp_report(ensemble);
    out << "clamped steps: " << rep.clamped << " / " << rep.total_steps
        << " (fraction " << rep.clamp_fraction << "), worst excursion "
        << rep.worst_excursion << "\n";
}

int cmd_curve(const ExperimentConfig& cfg, std::ostream& out) {
    const curves::CurvePair pair = solve_curves(cfg);
    const auto problems = curves::invariant_violations(pair);
    const fs::path dir = ensure_out_dir(cfg);
    if (cfg.output.format == "json") {
        open_text(dir / "curve.json") << pair.to_json().dump(2) << '\n';
        out << "wrote " << (dir / "curve.json").string() << "\n";
    } else if (cfg.output.format == "csv") {
        auto f = open_text(dir / "curve.csv");
        pair.write_csv(f);
        out << "wrote " << (dir / "curve.csv").string() << "\n";
    } else {
        throw SchemaError("curve: format must be csv or json");
    }
    write_manifest(cfg, "curve", dir);
    if (!problems.empty()) {
        out << "curve invariant violations:\n";
        for (const auto& p : problems) out << "  " << p << "\n";
        return 3;
    }
    out << "curve " << pair.model_tag() << " on [0," << pair.max_maturity() << "], "
        << pair.grid().size() << " nodes\n";
    return 0;
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& out) {
    sde::SimulateOptions options;
    options.threads = cfg.threads;
    options.store_steps = stride_steps(cfg.simulation.steps, cfg.simulation.store_stride);
    const sde::PathEnsemble ensemble =
        sde::simulate(cfg.model, cfg.simulation.horizon, cfg.simulation.steps,
                      cfg.simulation.paths, cfg.seed, options);
    const fs::path dir = ensure_out_dir(cfg);
    if (cfg.output.format == "csv") {
        auto r = open_text(dir / "paths.csv");
        auto i = open_text(dir / "paths_integrated.csv");
        ensemble.write_csv(r, i);
        out << "wrote " << (dir / "paths.csv").string() << " and paths_integrated.csv\n";
    } else if (cfg.output.format == "bin") {
        auto f = open_binary(dir / "paths.bin");
        ensemble.write_binary(f);
        out << "wrote " << (dir / "paths.bin").string() << "\n";
    } else {
        throw SchemaError("simulate: format must be csv or bin");
    }
    print_clamps(out, ensemble);
    write_manifest(cfg, "simulate", dir);
    return 0;
}

int cmd_price(const ExperimentConfig& cfg, std::ostream& out) {
    const curves::CurvePair pair = solve_curves(cfg);
    sde::SimulateOptions options;
    options.threads = cfg.threads;
    options.store_steps = stride_steps(cfg.simulation.steps, cfg.simulation.store_stride);
    const sde::PathEnsemble ensemble =
        sde::simulate(cfg.model, cfg.simulation.horizon, cfg.simulation.steps,
                      cfg.simulation.paths, cfg.seed, options);
    Eigen::ArrayXd maturities(static_cast<Eigen::Index>(cfg.pricing.maturities.size()));
    for (std::size_t i = 0; i < cfg.pricing.maturities.size(); ++i)
        maturities[static_cast<Eigen::Index>(i)] = cfg.pricing.maturities[i];
    const pricing::BondSurface surface =
        cfg.pricing.path < 0
            ? pricing::bond_surface_expected(pair, ensemble, maturities)
            : pricing::bond_surface_from_path(pair, ensemble,
                                              static_cast<Eigen::Index>(cfg.pricing.path),
                                              maturities);
    const fs::path dir = ensure_out_dir(cfg);
    if (cfg.output.format == "json") {
        open_text(dir / "surface.json") << surface.to_json().dump(2) << '\n';
        out << "wrote " << (dir / "surface.json").string() << "\n";
    } else if (cfg.output.format == "csv") {
        auto f = open_text(dir / "surface.csv");
        surface.write_csv(f);
        out << "wrote " << (dir / "surface.csv").string() << "\n";
    } else {
        throw SchemaError("price: format must be csv or json");
    }
    write_manifest(cfg, "price", dir);
    return 0;
}

int cmd_validate_hjm(const ExperimentConfig& cfg, std::ostream& out) {
    const curves::CurvePair pair = solve_curves(cfg);
    const Eigen::ArrayXd x_grid =
        Eigen::ArrayXd::LinSpaced(cfg.validation.x_nodes, 0.0, cfg.validation.x_max);
    Eigen::ArrayXd v_grid(cfg.validation.v_nodes);
    const Eigen::Index last = pair.grid().size() - 1;
    for (Eigen::Index k = 0; k < cfg.validation.v_nodes; ++k) {
        const auto idx = static_cast<Eigen::Index>(std::llround(
            static_cast<double>(k) * static_cast<double>(last) /
            static_cast<double>(cfg.validation.v_nodes - 1)));
        v_grid[k] = pair.grid()[idx];
    }
    validate::ValidationReport rep =
        validate::hjm_residual(cfg.model, pair, x_grid, v_grid);

    // Cross-check the integral form of the condition on a few points.
    validate::ValidationReport consistency;
    consistency.name = "hjm-integrated-consistency";
    consistency.description = "pointwise residual vs quadrature of the drift/vol integrals";
    consistency.tolerance = 1e-8;
    // Probes sit on curve grid nodes, where stored values tie the pointwise
    // and integral forms together to quadrature accuracy.
    const Eigen::Index last_node = pair.grid().size() - 1;
    const std::vector<std::pair<double, double>> probes = {
        {pair.grid()[last_node / 4], 0.5 * cfg.validation.x_max},
        {pair.grid()[last_node / 2], cfg.validation.x_max},
        {pair.grid()[(9 * last_node) / 10], 0.25 * cfg.validation.x_max}};
    consistency.statistics.resize(static_cast<Eigen::Index>(probes.size()));
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const double v = probes[i].first;
        const double r = probes[i].second;
        const double pointwise = validate::hjm_pointwise_residual(cfg.model, pair, r, v);
        const double integrated =
            validate::integrated_hjm_check(cfg.model, pair, 0.0, v, r);
        consistency.statistics[static_cast<Eigen::Index>(i)] =
            std::abs(pointwise - integrated);
        consistency.labels.push_back("v=" + std::to_string(v) + " r=" + std::to_string(r));
    }
    consistency.pass = consistency.max_statistic() <= consistency.tolerance;

    const fs::path dir = ensure_out_dir(cfg);
    json doc;
    doc["reports"] = {report_json_for_file(rep), report_json_for_file(consistency)};
    open_text(dir / "hjm_report.json") << doc.dump(2) << '\n';
    out << rep.to_text() << consistency.to_text();
    write_manifest(cfg, "validate-hjm", dir);
    return rep.pass && consistency.pass ? 0 : 1;
}

int cmd_validate_mc(const ExperimentConfig& cfg, std::ostream& out) {
    if (cfg.validation.checkpoints.empty())
        throw SchemaError("validation.checkpoints must not be empty");
    const curves::CurvePair pair = solve_curves(cfg);
    const validate::ValidationReport rep = validate::martingale_mc_test(
        cfg.model, pair, cfg.validation.maturity, cfg.validation.checkpoints,
        cfg.validation.paths, cfg.validation.steps, cfg.seed, cfg.threads);
    const fs::path dir = ensure_out_dir(cfg);
    json doc;
    doc["reports"] = {report_json_for_file(rep)};
    open_text(dir / "mc_report.json") << doc.dump(2) << '\n';
    out << rep.to_text();
    write_manifest(cfg, "validate-mc", dir);
    return rep.pass ? 0 : 1;
}

int cmd_check_levy(const ExperimentConfig& cfg, std::ostream& out) {
    std::vector<validate::ValidationReport> reps;
    reps.push_back(validate::levy_admissibility_check(cfg.model.noise()));
    if (cfg.model.second_noise())
        reps.push_back(validate::levy_admissibility_check(*cfg.model.second_noise()));
    reps.push_back(validate::model_admissibility_check(cfg.model));
    const fs::path dir = ensure_out_dir(cfg);
    json doc;
    doc["reports"] = json::array();
    bool ok = true;
    for (const auto& r : reps) {
        doc["reports"].push_back(report_json_for_file(r));
        out << r.to_text();
        ok = ok && r.pass;
    }
    open_text(dir / "levy_report.json") << doc.dump(2) << '\n';
    write_manifest(cfg, "check-levy", dir);
    return ok ? 0 : 1;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Affine term-structure models driven by Levy martingales"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;
    std::uint64_t seed_value = 0;
    std::string out_value, format_value;
    int threads_value = 0;

    app.add_option("--config", config_path, "experiment configuration JSON or run manifest")
        ->required();
    auto* seed_opt = app.add_option("--seed", seed_value, "override the master seed");
    auto* out_opt = app.add_option("--out", out_value, "override the output directory");
    auto* threads_opt = app.add_option("--threads", threads_value, "override the thread count");
    auto* format_opt =
        app.add_option("--format", format_value, "override the output format (csv|json|bin)");

    CLI::App* c_curve = app.add_subcommand("curve", "solve the affine curve pair");
    CLI::App* c_sim = app.add_subcommand("simulate", "simulate short-rate paths");
    CLI::App* c_price = app.add_subcommand("price", "build a bond price surface");
    CLI::App* c_vhjm = app.add_subcommand("validate-hjm", "analytic martingale condition");
    CLI::App* c_vmc = app.add_subcommand("validate-mc", "Monte-Carlo martingale test");
    CLI::App* c_levy = app.add_subcommand("check-levy", "noise and model admissibility");
    for (CLI::App* sub : {c_curve, c_sim, c_price, c_vhjm, c_vmc, c_levy}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    if (seed_opt->count()) ov.seed = seed_value;
    if (out_opt->count()) ov.out = out_value;
    if (threads_opt->count()) ov.threads = threads_value;
    if (format_opt->count()) ov.format = format_value;

    try {
        const ExperimentConfig cfg = resolve(config_path, ov);
        if (c_curve->parsed()) return cmd_curve(cfg, out);
        if (c_sim->parsed()) return cmd_simulate(cfg, out);
        if (c_price->parsed()) return cmd_price(cfg, out);
        if (c_vhjm->parsed()) return cmd_validate_hjm(cfg, out);
        if (c_vmc->parsed()) return cmd_validate_mc(cfg, out);
        if (c_levy->parsed()) return cmd_check_levy(cfg, out);
        err << "no command selected\n";
        return 2;
    } catch (const SolverError& e) {
        err << "numerical failure: " << e.what() << " (at v=" << e.at << ")\n";
        return 3;
    } catch (const SchemaError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ModelError& e) {
        err << "model error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const GridError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const RangeError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace ats::cli
