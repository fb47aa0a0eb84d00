#include "ats/validate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <variant>

#include "ats/errors.hpp"
#include "ats/pricing.hpp"
#include "ats/quadrature.hpp"

namespace ats::validate {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_value(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

const char* kMcProxyNote =
    "Checks constant expectation of the discounted bond price, a necessary "
    "condition for the martingale property; a strictly local martingale is not "
    "distinguishable at this sample size. Checkpoints are tested jointly at 3 "
    "standard errors each.";

}  // namespace

double ValidationReport::max_statistic() const {
    return statistics.size() == 0 ? 0.0 : statistics.abs().maxCoeff();
}

nlohmann::json ValidationReport::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["description"] = description;
    j["labels"] = labels;
    j["statistics"] =
        std::vector<double>(statistics.data(), statistics.data() + statistics.size());
    j["tolerance"] = tolerance;
    j["pass"] = pass;
    j["runtime_seconds"] = runtime_seconds;
    j["seed"] = seed;
    j["notes"] = notes;
    return j;
}

std::string ValidationReport::to_text() const {
    std::ostringstream out;
    out << name << ": " << (pass ? "PASS" : "FAIL") << "  (tolerance " << tolerance
        << ", runtime " << format_value(runtime_seconds) << " s)\n";
    if (!description.empty()) out << "  " << description << "\n";
    std::size_t width = 0;
    for (const auto& l : labels) width = std::max(width, l.size());
    for (Eigen::Index i = 0; i < statistics.size(); ++i) {
        const std::string& label = labels[static_cast<std::size_t>(i)];
        out << "  " << label << std::string(width - label.size() + 2, ' ')
            << format_value(statistics[i]) << "\n";
    }
    if (!notes.empty()) out << "  note: " << notes << "\n";
    return out.str();
}

double hjm_equation_lhs(const sde::ShortRateModel& model, double x, double B) {
    double lhs = levy::laplace_exponent(model.noise(), model.diffusion_value(x, 0) * B);
    if (model.noise_count() == 2)
        lhs += levy::laplace_exponent(*model.second_noise(),
                                      model.diffusion_value(x, 1) * B);
    return lhs;
}

double hjm_pointwise_residual(const sde::ShortRateModel& model,
                              const curves::CurvePair& pair, double x, double v) {
    if (x < 0.0) throw DomainError("hjm_pointwise_residual: x must be >= 0");
    const curves::CurvePoint p = pair.at(v);
    const double lhs = hjm_equation_lhs(model, x, p.B);
    return std::abs(lhs + p.A_prime + (p.B_prime - 1.0) * x - p.B * model.drift(x));
}

ValidationReport hjm_residual(const sde::ShortRateModel& model, const curves::CurvePair& pair,
                              const Eigen::ArrayXd& x_grid, const Eigen::ArrayXd& v_grid,
                              double tolerance) {
    const auto start = Clock::now();
    ValidationReport rep;
    rep.name = "hjm-residual";
    rep.tolerance = tolerance;
    std::ostringstream desc;
    desc << "model " << model.tag() << ", " << x_grid.size() << "x" << v_grid.size()
         << " (x,v) grid";
    rep.description = desc.str();
    rep.statistics.resize(v_grid.size());
    rep.labels.reserve(static_cast<std::size_t>(v_grid.size()));
    for (Eigen::Index k = 0; k < v_grid.size(); ++k) {
        double row_max = 0.0;
        for (Eigen::Index i = 0; i < x_grid.size(); ++i)
            row_max = std::max(row_max,
                               hjm_pointwise_residual(model, pair, x_grid[i], v_grid[k]));
        rep.statistics[k] = row_max;
        rep.labels.push_back("v=" + format_value(v_grid[k]));
    }
    rep.pass = rep.max_statistic() <= tolerance;
    rep.runtime_seconds = elapsed(start);
    return rep;
}

double integrated_hjm_check(const sde::ShortRateModel& model, const curves::CurvePair& pair,
                            double t, double T, double r, double quad_tol) {
    if (T < t) throw RangeError("integrated_hjm_check: T must be >= t");
    if (T == t) return 0.0;
    auto drift_at = [&](double s) {
        return pricing::hjm_drift_vol(pair, model, r, t, s).drift;
    };
    const double drift_integral = quadrature::integrate(drift_at, t, T, quad_tol);
    auto vol_at = [&](int which) {
        return [&, which](double s) {
            const auto co = pricing::hjm_drift_vol(pair, model, r, t, s);
            return which == 0 ? co.vol : co.vol2;
        };
    };
    double exponent_of_vols =
        levy::laplace_exponent(model.noise(), quadrature::integrate(vol_at(0), t, T, quad_tol));
    if (model.noise_count() == 2)
        exponent_of_vols += levy::laplace_exponent(
            *model.second_noise(), quadrature::integrate(vol_at(1), t, T, quad_tol));
    return std::abs(drift_integral - exponent_of_vols);
}

ValidationReport martingale_mc_test(const sde::ShortRateModel& model,
                                    const curves::CurvePair& pair, double T,
                                    const std::vector<double>& checkpoints,
                                    Eigen::Index n_paths, Eigen::Index steps,
                                    std::uint64_t seed, int threads) {
    const auto start = Clock::now();
    if (checkpoints.empty())
        throw DomainError("martingale_mc_test: checkpoint list must not be empty");
    const double dt = T / static_cast<double>(steps);

    sde::SimulateOptions options;
    options.threads = threads;
    std::vector<Eigen::Index> idx;
    for (double t : checkpoints) {
        if (t < 0.0 || t > T + 1e-12)
            throw DomainError("martingale_mc_test: checkpoints must lie in [0,T]");
        const auto k = static_cast<Eigen::Index>(std::llround(t / dt));
        if (std::abs(static_cast<double>(k) * dt - t) > 1e-9 * std::max(1.0, T))
            throw GridError("martingale_mc_test: checkpoint not on the step grid");
        idx.push_back(k);
    }
    options.store_steps = idx;
    const sde::PathEnsemble ensemble = sde::simulate(model, T, steps, n_paths, seed, options);

    const double reference = pricing::bond_price(pair, model.x0(), 0.0, T);
    ValidationReport rep;
    rep.name = "martingale-mc";
    rep.tolerance = 3.0;
    rep.seed = seed;
    rep.notes = kMcProxyNote;
    std::ostringstream desc;
    desc << "model " << model.tag() << ", T=" << T << ", paths=" << n_paths
         << ", steps=" << steps << ", P(0,T)=" << reference;
    rep.description = desc.str();
    rep.statistics.resize(static_cast<Eigen::Index>(checkpoints.size()));

    for (std::size_t j = 0; j < checkpoints.size(); ++j) {
        const double t = static_cast<double>(idx[j]) * dt;
        const Eigen::Index col = ensemble.time_index(t);
        const curves::CurvePoint cp = pair.at(T - t);
        const Eigen::ArrayXd phat =
            (-(cp.A + cp.B * ensemble.rates().col(col)) - ensemble.integrated_rate().col(col))
                .exp();
        const double mean = phat.mean();
        const double n = static_cast<double>(n_paths);
        const double sd = n > 1 ? std::sqrt((phat - mean).square().sum() / (n - 1.0)) : 0.0;
        const double se = sd / std::sqrt(n);
        // Roundoff floor: with degenerate (identical) samples the accumulated
        // summation noise must not masquerade as a standard error.
        const double se_floor = 1e-13 * std::max(1.0, std::abs(reference));
        const double z = (mean - reference) / std::max(se, se_floor);
        rep.statistics[static_cast<Eigen::Index>(j)] = z;
        std::ostringstream label;
        label << "t=" << format_value(t) << " mean=" << format_value(mean)
              << " se=" << format_value(se) << " z";
        rep.labels.push_back(label.str());
    }
    rep.pass = (rep.statistics.abs() <= rep.tolerance).all();
    rep.runtime_seconds = elapsed(start);
    return rep;
}

ValidationReport levy_admissibility_check(const levy::LevyModel& m) {
    const auto start = Clock::now();
    ValidationReport rep;
    rep.name = "levy-admissibility";
    rep.description = "noise " + m.tag();
    rep.tolerance = 0.5;  // every statistic is a 0/1 violation flag
    std::vector<double> stats;

    // Jump support must lie in (0, +inf).
    double support_violation = 0.0;
    if (m.kind() == levy::Kind::CompoundPoissonMartingale) {
        const levy::JumpSpec& jump = *m.jump();
        if (jump.support_min() < 0.0) support_violation = 1.0;
        if (jump.family != levy::JumpFamily::Exponential && jump.support_min() <= 0.0 &&
            jump.intensity > 0.0)
            support_violation = 1.0;
    }
    rep.labels.push_back("jump support in (0,inf)");
    stats.push_back(support_violation);

    // Exponent finiteness on a lambda grid in [0,10].
    double finite_violation = 0.0;
    for (int i = 0; i <= 20; ++i) {
        const double lambda = 0.5 * i;
        double value;
        try {
            value = levy::laplace_exponent(m, lambda);
        } catch (const Error&) {
            finite_violation = 1.0;
            break;
        }
        if (!std::isfinite(value)) {
            finite_violation = 1.0;
            break;
        }
    }
    rep.labels.push_back("J finite on [0,10]");
    stats.push_back(finite_violation);

    // J(lambda)/lambda decreasing toward 0 along 1e-2, 1e-3, 1e-4.
    double limit_violation = 0.0;
    double prev = INFINITY;
    for (double lambda : {1e-2, 1e-3, 1e-4}) {
        double ratio;
        try {
            ratio = std::abs(levy::laplace_exponent(m, lambda) / lambda);
        } catch (const Error&) {
            limit_violation = 1.0;
            break;
        }
        if (!(ratio < prev || ratio == 0.0)) limit_violation = 1.0;
        if (m.kind() != levy::Kind::CompoundPoissonMartingale) {
            const double bound = 10.0 * m.stable_coefficient() *
                                 std::pow(lambda, m.alpha() - 1.0);
            if (ratio > bound) limit_violation = 1.0;
        }
        prev = ratio;
    }
    rep.labels.push_back("J(l)/l decreasing to 0");
    stats.push_back(limit_violation);

    rep.statistics = Eigen::Map<const Eigen::ArrayXd>(stats.data(),
                                                      static_cast<Eigen::Index>(stats.size()));
    rep.pass = rep.max_statistic() <= rep.tolerance;
    rep.runtime_seconds = elapsed(start);
    return rep;
}

ValidationReport model_admissibility_check(const sde::ShortRateModel& model) {
    const auto start = Clock::now();
    ValidationReport rep;
    rep.name = "model-admissibility";
    rep.description = "model " + model.tag();
    rep.tolerance = 0.5;
    const auto violations = model.admissibility_violations();
    if (violations.empty()) {
        rep.labels.push_back("admissible");
        rep.statistics = Eigen::ArrayXd::Zero(1);
    } else {
        rep.statistics = Eigen::ArrayXd::Ones(static_cast<Eigen::Index>(violations.size()));
        rep.labels = violations;
    }
    rep.pass = rep.max_statistic() <= rep.tolerance;
    rep.runtime_seconds = elapsed(start);
    return rep;
}

}  // namespace ats::validate
