#include <doctest.h>

#include <cmath>

#include "ats/errors.hpp"
#include "ats/sde.hpp"
#include "oracles.hpp"

using ats::DomainError;
using ats::GridError;
using ats::ModelError;
using namespace ats::sde;

namespace {

ats::levy::JumpSpec exp_jumps(double mean, double intensity) {
    ats::levy::JumpSpec j;
    j.family = ats::levy::JumpFamily::Exponential;
    j.mean = mean;
    j.intensity = intensity;
    return j;
}

}  // namespace

TEST_SUITE("sde") {

TEST_CASE("zero is an equilibrium for the power-law model") {
    const ShortRateModel model = ShortRateModel::power_law(0.0, 0.0, 0.3, 1.5, 0.0);
    const PathEnsemble ens = simulate(model, 1.0, 64, 8, 99);
    CHECK((ens.rates() == 0.0).all());
    CHECK((ens.integrated_rate() == 0.0).all());
}

TEST_CASE("deterministic limit reproduces the linear ODE") {
    // c = 0 switches the noise off.
    const double a = -0.5, b = 0.1, x0 = 0.05;
    const ShortRateModel model = ShortRateModel::power_law(a, b, 0.0, 1.5, x0);

    SUBCASE("discrete recursion, algebraic route") {
        const Eigen::Index steps = 128;
        const PathEnsemble ens = simulate(model, 1.0, steps, 1, 1);
        const double dt = 1.0 / static_cast<double>(steps);
        for (Eigen::Index j = 0; j < ens.n_times(); ++j)
            CHECK(std::abs(ens.rates()(0, j) - oracles::euler_recursion(a, b, x0, dt, j)) <=
                  1e-10);
    }
    SUBCASE("continuous oracle with step refinement") {
        const double exact = oracles::linear_ode(a, b, x0, 1.0);  // 0.1090204010431050
        CHECK(exact == doctest::Approx(0.1090204010431050).epsilon(1e-12));
        double errs[2];
        int k = 0;
        for (Eigen::Index steps : {1024, 2048}) {
            const PathEnsemble ens = simulate(model, 1.0, steps, 1, 1);
            errs[k++] = std::abs(ens.rates()(0, ens.n_times() - 1) - exact);
        }
        CHECK(errs[0] <= 1e-3);
        CHECK(errs[1] <= 0.6 * errs[0]);  // first-order in dt
    }
    SUBCASE("integrated rate against the closed form") {
        const Eigen::Index steps = 4096;
        const PathEnsemble ens = simulate(model, 1.0, steps, 1, 1);
        // Euler path error is first order and dominates the trapezoid rule.
        const double exact = oracles::linear_ode_integral(a, b, x0, 1.0);
        CHECK(std::abs(ens.integrated_rate()(0, ens.n_times() - 1) - exact) <= 1e-5);
        // Trapezoid of the exact recursion values matches to roundoff.
        const double dt = 1.0 / static_cast<double>(steps);
        double acc = 0.0;
        for (Eigen::Index n = 0; n < steps; ++n)
            acc += 0.5 * dt *
                   (oracles::euler_recursion(a, b, x0, dt, n) +
                    oracles::euler_recursion(a, b, x0, dt, n + 1));
        CHECK(std::abs(ens.integrated_rate()(0, ens.n_times() - 1) - acc) <= 1e-10);
    }
}

TEST_CASE("constant-volatility model with intensity 0 is the deterministic ODE") {
    const auto noise = ats::levy::LevyModel::compound_poisson(exp_jumps(1.0, 0.0));
    const ShortRateModel model = ShortRateModel::constant_vol(-0.5, 0.2, 1.0, noise, 0.05);
    const Eigen::Index steps = 256;
    const PathEnsemble ens = simulate(model, 1.0, steps, 2, 7);
    const double dt = 1.0 / static_cast<double>(steps);
    for (Eigen::Index j = 0; j < ens.n_times(); ++j) {
        const double oracle = oracles::euler_recursion(-0.5, 0.2, 0.05, dt, j);
        CHECK(std::abs(ens.rates()(0, j) - oracle) <= 1e-10);
        CHECK(std::abs(ens.rates()(1, j) - oracle) <= 1e-10);
    }
}

TEST_CASE("mean rate evolution matches the drift expectation") {
    // E R(t) = x0 e^{at} + b (e^{at} - 1)/a since the noise is a mean-zero
    // martingale; Monte-Carlo mean within 3 standard errors.
    const double a = -0.5, b = 0.1, x0 = 0.05;
    const ShortRateModel model = ShortRateModel::power_law(a, b, 0.2, 1.5, x0);
    const Eigen::Index n = 100000, steps = 256;
    SimulateOptions opt;
    opt.store_steps = {steps / 2, steps};
    opt.threads = 2;
    const PathEnsemble ens = simulate(model, 1.0, steps, n, 20250810, opt);
    for (Eigen::Index col : {Eigen::Index(1), Eigen::Index(2)}) {
        const double t = ens.times()[col];
        const auto r = ens.rates().col(col);
        const double mean = r.mean();
        const double sd = std::sqrt((r - mean).square().sum() / static_cast<double>(n - 1));
        const double se = sd / std::sqrt(static_cast<double>(n));
        CHECK(std::abs(mean - oracles::linear_ode(a, b, x0, t)) <= 3.0 * se);
    }
}

TEST_CASE("constant-volatility mean rate follows the drift") {
    // a = 0 at the admissibility boundary: R(t) = x0 + b*t + sigma*Z(t) with
    // E Z(t) = 0, so the sample mean of R(1) sits at b within 3 SE.
    const auto noise = ats::levy::LevyModel::compound_poisson(exp_jumps(0.5, 2.0));
    const ShortRateModel model = ShortRateModel::constant_vol(0.0, 1.0, 1.0, noise, 0.0);
    const Eigen::Index n = 100000;
    SimulateOptions opt;
    opt.store_steps = {256};
    opt.threads = 2;
    const PathEnsemble ens = simulate(model, 1.0, 256, n, 91, opt);
    const auto r = ens.rates().col(1);
    const double mean = r.mean();
    const double sd = std::sqrt((r - mean).square().sum() / static_cast<double>(n - 1));
    CHECK(std::abs(mean - 1.0) <= 3.0 * sd / std::sqrt(static_cast<double>(n)));
    CHECK((r >= 0.0).all());
}

TEST_CASE("two-noise simulation is admissible, positive and deterministic") {
    const ShortRateModel model = ShortRateModel::multi_stable(-0.3, 0.1, 1.5, 1.75, 0.05);
    CHECK(model.admissibility_violations().empty());
    const PathEnsemble a = simulate(model, 1.0, 256, 500, 77);
    const PathEnsemble b = simulate(model, 1.0, 256, 500, 77);
    CHECK((a.rates() >= 0.0).all());
    CHECK((a.rates() == b.rates()).all());
    CHECK(a.rates().col(0).isApproxToConstant(0.05));
}

TEST_CASE("positivity and monotone integrated rate") {
    const ShortRateModel model = ShortRateModel::power_law(-0.8, 0.05, 0.5, 1.25, 0.0);
    const PathEnsemble ens = simulate(model, 2.0, 512, 2000, 31);
    CHECK((ens.rates() >= 0.0).all());
    for (Eigen::Index j = 1; j < ens.n_times(); ++j)
        CHECK((ens.integrated_rate().col(j) >= ens.integrated_rate().col(j - 1)).all());
    CHECK(ens.rates().col(0).isApproxToConstant(0.0));
}

TEST_CASE("determinism and thread independence") {
    const ShortRateModel model = ShortRateModel::power_law(-0.5, 0.1, 0.2, 1.5, 0.05);
    SimulateOptions serial, parallel;
    serial.threads = 1;
    parallel.threads = 2;
    const PathEnsemble e1 = simulate(model, 1.0, 128, 64, 5, serial);
    const PathEnsemble e2 = simulate(model, 1.0, 128, 64, 5, serial);
    const PathEnsemble e3 = simulate(model, 1.0, 128, 64, 5, parallel);
    CHECK((e1.rates() == e2.rates()).all());
    CHECK((e1.integrated_rate() == e2.integrated_rate()).all());
    CHECK((e1.rates() == e3.rates()).all());
    CHECK(e1.seeds() == e3.seeds());
}

TEST_CASE("sparse storage matches the fully stored run") {
    const ShortRateModel model = ShortRateModel::power_law(-0.5, 0.1, 0.2, 1.5, 0.05);
    const PathEnsemble full = simulate(model, 1.0, 128, 16, 5);
    SimulateOptions opt;
    opt.store_steps = {32, 64, 128};
    const PathEnsemble sparse = simulate(model, 1.0, 128, 16, 5, opt);
    CHECK(sparse.n_times() == 4);  // index 0 is always stored
    for (Eigen::Index j = 0; j < sparse.n_times(); ++j) {
        const Eigen::Index src = full.time_index(sparse.times()[j]);
        CHECK((sparse.rates().col(j) == full.rates().col(src)).all());
        CHECK((sparse.integrated_rate().col(j) == full.integrated_rate().col(src)).all());
    }
}

TEST_CASE("clamp reporting") {
    SUBCASE("deterministic drift never clamps") {
        const ShortRateModel model = ShortRateModel::power_law(-0.5, 0.1, 0.0, 2.0, 0.05);
        const ClampReport rep = clamp_report(simulate(model, 1.0, 256, 4, 1));
        CHECK(rep.clamped == 0);
        CHECK(rep.worst_excursion == 0.0);
    }
    SUBCASE("identically zero path never clamps") {
        const ShortRateModel model = ShortRateModel::power_law(0.0, 0.0, 0.2, 1.5, 0.0);
        CHECK(clamp_report(simulate(model, 1.0, 256, 4, 1)).clamped == 0);
    }
    SUBCASE("clamp fraction shrinks with resolution") {
        // A rate hovering near zero with a dominant diffusion clamps often;
        // both the fraction and the worst excursion fall as dt shrinks.
        const ShortRateModel model = ShortRateModel::power_law(-0.5, 0.002, 0.5, 2.0, 0.002);
        double fraction[2] = {0.0, 0.0}, worst[2] = {0.0, 0.0};
        int k = 0;
        for (Eigen::Index steps : {Eigen::Index(512), Eigen::Index(4096)}) {
            SimulateOptions opt;
            opt.store_steps = {steps};
            opt.threads = 2;
            std::int64_t clamped = 0, total = 0;
            for (std::uint64_t seed = 0; seed < 8; ++seed) {
                const ClampReport rep =
                    clamp_report(simulate(model, 1.0, steps, 200, seed, opt));
                clamped += rep.clamped;
                total += rep.total_steps;
                worst[k] = std::max(worst[k], rep.worst_excursion);
            }
            fraction[k++] = static_cast<double>(clamped) / static_cast<double>(total);
        }
        CHECK(fraction[0] > 0.0);
        CHECK(fraction[1] <= fraction[0]);
        CHECK(worst[1] <= worst[0]);
    }
}

TEST_CASE("admissibility is checked before any simulation") {
    SUBCASE("negative initial rate") {
        const ShortRateModel model = ShortRateModel::power_law(-0.5, 0.1, 0.2, 1.5, -0.01);
        CHECK_THROWS_AS(simulate(model, 1.0, 16, 4, 1), ModelError);
    }
    SUBCASE("negative b") {
        const ShortRateModel model = ShortRateModel::power_law(-0.5, -0.1, 0.2, 1.5, 0.01);
        CHECK_THROWS_AS(simulate(model, 1.0, 16, 4, 1), ModelError);
    }
    SUBCASE("constant diffusion with too small b") {
        const auto noise = ats::levy::LevyModel::compound_poisson(exp_jumps(0.5, 2.0));
        const ShortRateModel model = ShortRateModel::constant_vol(0.0, 0.9, 1.0, noise, 0.0);
        CHECK_THROWS_AS(simulate(model, 1.0, 16, 4, 1), ModelError);
        CHECK(!model.admissibility_violations().empty());
    }
    SUBCASE("perturbed diffusion exponent") {
        const ShortRateModel model =
            ShortRateModel::power_law(-0.5, 0.1, 0.2, 1.5, 0.05).with_diffusion_exponent(0.9);
        CHECK_THROWS_AS(simulate(model, 1.0, 16, 4, 1), ModelError);
    }
    SUBCASE("argument domain errors") {
        const ShortRateModel model = ShortRateModel::power_law(-0.5, 0.1, 0.2, 1.5, 0.05);
        CHECK_THROWS_AS(simulate(model, 0.0, 16, 4, 1), DomainError);
        CHECK_THROWS_AS(simulate(model, 1.0, 0, 4, 1), DomainError);
        CHECK_THROWS_AS(simulate(model, 1.0, 16, 0, 1), DomainError);
        SimulateOptions opt;
        opt.store_steps = {20};
        CHECK_THROWS_AS(simulate(model, 1.0, 16, 4, 1, opt), DomainError);
    }
}

TEST_CASE("ensemble lookups and model json") {
    const ShortRateModel model = ShortRateModel::power_law(-0.5, 0.1, 0.2, 1.5, 0.05);
    const PathEnsemble ens = simulate(model, 1.0, 16, 4, 1);
    CHECK(ens.time_index(0.5) == 8);
    CHECK_THROWS_AS(ens.time_index(0.51), GridError);

    const ShortRateModel back = ShortRateModel::from_json(model.to_json());
    CHECK(back.to_json() == model.to_json());
    const auto noise = ats::levy::LevyModel::compound_poisson(exp_jumps(0.5, 2.0));
    const ShortRateModel part2 = ShortRateModel::constant_vol(0.0, 1.0, 1.0, noise, 0.0);
    CHECK(ShortRateModel::from_json(part2.to_json()).to_json() == part2.to_json());
    const ShortRateModel multi = ShortRateModel::multi_stable(-0.3, 0.1, 1.5, 1.75, 0.05);
    CHECK(ShortRateModel::from_json(multi.to_json()).to_json() == multi.to_json());

    nlohmann::json bad = model.to_json();
    bad["surprise"] = 1;
    CHECK_THROWS_AS(ShortRateModel::from_json(bad), ats::SchemaError);
}

}  // TEST_SUITE
