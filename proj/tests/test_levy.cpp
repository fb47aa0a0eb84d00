#include <doctest.h>

#include <cmath>
#include <vector>

#include "ats/errors.hpp"
#include "ats/levy.hpp"
#include "oracles.hpp"

using ats::DomainError;
using ats::ModelError;
using ats::SchemaError;
using namespace ats::levy;

namespace {

std::vector<double> to_vec(const Eigen::ArrayXd& a) {
    return std::vector<double>(a.data(), a.data() + a.size());
}

JumpSpec exp_jumps(double mean, double intensity) {
    JumpSpec j;
    j.family = JumpFamily::Exponential;
    j.mean = mean;
    j.intensity = intensity;
    return j;
}

JumpSpec atom_jumps(double location, double intensity) {
    JumpSpec j;
    j.family = JumpFamily::Atom;
    j.location = location;
    j.intensity = intensity;
    return j;
}

JumpSpec uniform_jumps(double lower, double upper, double intensity) {
    JumpSpec j;
    j.family = JumpFamily::Uniform;
    j.lower = lower;
    j.upper = upper;
    j.intensity = intensity;
    return j;
}

}  // namespace

TEST_SUITE("levy") {

TEST_CASE("stable coefficient against the gamma oracle") {
    // Anchor: Gamma(0.5) = sqrt(pi), so c_1.5 = sqrt(pi)/0.75.
    CHECK(oracles::lanczos_gamma(0.5) == doctest::Approx(std::sqrt(oracles::kPi)).epsilon(1e-13));
    CHECK(oracles::lanczos_gamma(1.0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(oracles::lanczos_gamma(5.0) == doctest::Approx(24.0).epsilon(1e-13));

    for (double alpha : {1.1, 1.25, 1.5, 1.75, 1.9, 1.99})
        CHECK(stable_coefficient(alpha) ==
              doctest::Approx(oracles::stable_coefficient(alpha)).epsilon(1e-12));
    CHECK(stable_coefficient(2.0) == 0.5);
    CHECK(stable_coefficient(1.5) == doctest::Approx(2.363271801207355).epsilon(1e-12));
    CHECK_THROWS_AS(stable_coefficient(1.0), DomainError);
    CHECK_THROWS_AS(stable_coefficient(2.5), DomainError);
}

TEST_CASE("laplace exponent values") {
    const LevyModel stable15 = LevyModel::stable(1.5);
    const LevyModel wiener = LevyModel::wiener();

    CHECK(laplace_exponent(stable15, 0.0) == 0.0);
    CHECK(laplace_exponent(wiener, 0.0) == 0.0);
    CHECK(laplace_exponent(stable15, 1.0) ==
          doctest::Approx(2.363271801207355).epsilon(1e-12));
    CHECK(laplace_exponent(wiener, 2.0) == doctest::Approx(2.0).epsilon(1e-15));

    CHECK_THROWS_AS(laplace_exponent(stable15, -0.1), DomainError);
}

TEST_CASE("laplace exponent derivative") {
    const LevyModel stable15 = LevyModel::stable(1.5);
    const LevyModel wiener = LevyModel::wiener();

    CHECK(laplace_exponent_derivative(wiener, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(laplace_exponent_derivative(stable15, 1.0) ==
          doctest::Approx(3.544907701811032).epsilon(1e-12));

    // J'(0+) = 0: decreasing along a lambda sequence toward zero.
    double prev = INFINITY;
    for (double lambda : {1e-2, 1e-3, 1e-4}) {
        const double d = laplace_exponent_derivative(stable15, lambda);
        CHECK(d < prev);
        prev = d;
    }
    CHECK_THROWS_AS(laplace_exponent_derivative(stable15, 0.0), DomainError);
    CHECK_THROWS_AS(laplace_exponent_derivative(stable15, -1.0), DomainError);
}

TEST_CASE("J(l)/l bound for stable kinds") {
    for (double alpha : {1.25, 1.5, 1.75}) {
        const LevyModel m = LevyModel::stable(alpha);
        const double c = m.stable_coefficient();
        double prev = INFINITY;
        for (double lambda : {1e-2, 1e-3, 1e-4}) {
            const double ratio = std::abs(laplace_exponent(m, lambda) / lambda);
            CHECK(ratio < prev);
            CHECK(ratio <= 10.0 * c * std::pow(lambda, alpha - 1.0));
            prev = ratio;
        }
    }
}

TEST_CASE("compound-Poisson exponent quadrature vs closed forms") {
    const LevyModel exp_model = LevyModel::compound_poisson(exp_jumps(0.5, 2.0));
    for (double l : {0.3, 0.5, 1.0, 2.0, 5.0}) {
        CHECK(laplace_exponent(exp_model, l) ==
              doctest::Approx(oracles::cpp_exp_exponent(2.0, 0.5, l)).epsilon(1e-9));
        CHECK(laplace_exponent_derivative(exp_model, l) ==
              doctest::Approx(oracles::cpp_exp_exponent_derivative(2.0, 0.5, l)).epsilon(1e-9));
        CHECK(one_minus_exp_integral(exp_model, l) ==
              doctest::Approx(oracles::cpp_exp_one_minus(2.0, 0.5, l)).epsilon(1e-9));
    }

    const LevyModel uni_model = LevyModel::compound_poisson(uniform_jumps(0.2, 0.8, 1.5));
    for (double l : {0.5, 1.0, 3.0})
        CHECK(laplace_exponent(uni_model, l) ==
              doctest::Approx(oracles::cpp_uniform_exponent(1.5, 0.2, 0.8, l)).epsilon(1e-9));
    CHECK(one_minus_exp_integral(uni_model, 2.0) ==
          doctest::Approx(oracles::cpp_uniform_one_minus(1.5, 0.2, 0.8, 2.0)).epsilon(1e-9));

    const LevyModel atom_model = LevyModel::compound_poisson(atom_jumps(0.75, 1.5));
    const double l = 1.3;
    CHECK(laplace_exponent(atom_model, l) ==
          doctest::Approx(1.5 * (std::exp(-l * 0.75) - 1.0 + l * 0.75)).epsilon(1e-12));
    CHECK(laplace_exponent(exp_model, 0.0) == 0.0);
}

TEST_CASE("mean jump mass") {
    CHECK(mean_jump_mass(LevyModel::compound_poisson(exp_jumps(0.5, 2.0))) ==
          doctest::Approx(1.0).epsilon(1e-15));
    CHECK(mean_jump_mass(LevyModel::compound_poisson(exp_jumps(1.0, 3.0))) ==
          doctest::Approx(3.0).epsilon(1e-15));
    CHECK(mean_jump_mass(LevyModel::compound_poisson(exp_jumps(1.0, 0.0))) == 0.0);
    CHECK(mean_jump_mass(LevyModel::compound_poisson(atom_jumps(0.75, 1.5))) ==
          doctest::Approx(1.125).epsilon(1e-15));
    CHECK_THROWS_AS(mean_jump_mass(LevyModel::stable(1.5)), ModelError);
}

TEST_CASE("compensating drift makes the increments mean zero") {
    // Stable triplet drift cancels the jump mass above 1: -1/(alpha-1).
    CHECK(LevyModel::stable(1.5).compensator_drift() == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(LevyModel::stable(1.25).compensator_drift() == doctest::Approx(-4.0).epsilon(1e-15));
    CHECK(LevyModel::wiener().compensator_drift() == 0.0);
    CHECK(LevyModel::compound_poisson(exp_jumps(0.5, 2.0)).compensator_drift() ==
          doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("model construction guards") {
    CHECK_THROWS_AS(LevyModel::compound_poisson(exp_jumps(-0.5, 2.0)), ModelError);
    CHECK_THROWS_AS(LevyModel::compound_poisson(atom_jumps(0.0, 1.0)), ModelError);
    CHECK_THROWS_AS(LevyModel::compound_poisson(uniform_jumps(0.0, 0.5, 1.0)), ModelError);
    CHECK_THROWS_AS(LevyModel::compound_poisson(uniform_jumps(0.6, 0.5, 1.0)), ModelError);
    CHECK_THROWS_AS(LevyModel::stable(1.0), DomainError);
}

TEST_CASE("wiener sampler moments") {
    const LevyModel wiener = LevyModel::wiener();
    const Eigen::Index n = 1000000;
    const Eigen::ArrayXd z = sample_increments(wiener, 1.0, n, 20250809);
    const double m = z.mean();
    const double var = (z - m).square().sum() / static_cast<double>(n - 1);
    CHECK(std::abs(m) <= 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - 1.0) <= 0.01);
}

TEST_CASE("stable sampler matches the exponent (empirical Laplace)") {
    const LevyModel m = LevyModel::stable(1.5);
    const Eigen::Index n = 1000000;
    const std::vector<double> z = to_vec(sample_increments(m, 1.0, n, 777));
    const double c = m.stable_coefficient();
    for (double lambda : {0.5, 1.0}) {
        const auto est = oracles::log_laplace_bootstrap(z, lambda, 60, 4242);
        CHECK(std::abs(est.log_mean - c * std::pow(lambda, 1.5)) <=
              3.0 * est.bootstrap_se);
    }
    double sum = 0.0;
    for (double v : z) sum += v;
    CHECK(std::abs(sum / static_cast<double>(n)) < 0.05);  // mean-zero martingale
}

TEST_CASE("empirical Laplace transform for every kind") {
    const Eigen::Index n = 200000;
    const double dt = 0.7;
    int k = 0;
    for (const LevyModel& m :
         {LevyModel::stable(1.75), LevyModel::wiener(),
          LevyModel::compound_poisson(exp_jumps(0.5, 2.0)),
          LevyModel::compound_poisson(atom_jumps(0.75, 1.5)),
          LevyModel::compound_poisson(uniform_jumps(0.2, 0.8, 1.0))}) {
        const std::vector<double> z =
            to_vec(sample_increments(m, dt, n, 900 + static_cast<std::uint64_t>(k)));
        for (double lambda : {0.5, 1.0, 2.0}) {
            const auto est = oracles::log_laplace_bootstrap(z, lambda, 50, 31 + k);
            const double expected = dt * laplace_exponent(m, lambda);
            CHECK(std::abs(est.log_mean - expected) <= 3.0 * est.bootstrap_se);
        }
        ++k;
    }
}

TEST_CASE("stable scaling: Z(t)/t^(1/alpha) is t-independent") {
    const LevyModel m = LevyModel::stable(1.5);
    const Eigen::Index n = 100000;
    std::vector<double> a = to_vec(sample_increments(m, 0.5, n, 11));
    std::vector<double> b = to_vec(sample_increments(m, 1.0, n, 12));
    const double scale = std::pow(0.5, -1.0 / 1.5);
    for (double& v : a) v *= scale;
    CHECK(oracles::ks_distance(a, b) < 0.01);
}

TEST_CASE("compensated compound Poisson has mean zero") {
    const JumpSpec spec = exp_jumps(0.5, 2.0);
    const LevyModel m = LevyModel::compound_poisson(spec);
    const Eigen::Index n = 1000000;
    const Eigen::ArrayXd z = sample_increments(m, 1.0, n, 55);
    const double mean = z.mean();
    const double sd = std::sqrt((z - mean).square().sum() / static_cast<double>(n - 1));
    const double se = sd / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mean) <= 3.0 * se);
    // Uncompensated part: direct expectation lambda_P * mu * dt.
    const double uncompensated = mean + spec.intensity * spec.mean * 1.0;
    CHECK(uncompensated == doctest::Approx(1.0).epsilon(3.0 * se + 1e-12));
}

TEST_CASE("raw jump draws are strictly positive") {
    ats::rng::Engine g = ats::rng::make_engine(99);
    for (const JumpSpec& spec :
         {exp_jumps(0.5, 2.0), atom_jumps(0.75, 1.5), uniform_jumps(0.2, 0.8, 1.0)}) {
        for (int i = 0; i < 100000; ++i) CHECK(draw_jump(spec, g) > 0.0);
    }
}

TEST_CASE("sampler determinism") {
    const LevyModel m = LevyModel::stable(1.25);
    const Eigen::ArrayXd a = sample_increments(m, 0.01, 1000, 123);
    const Eigen::ArrayXd b = sample_increments(m, 0.01, 1000, 123);
    CHECK((a == b).all());
    CHECK_THROWS_AS(sample_increments(m, 0.0, 10, 1), DomainError);
    CHECK_THROWS_AS(sample_increments(m, 1.0, 0, 1), DomainError);
}

TEST_CASE("json round trip and strictness") {
    for (const LevyModel& m :
         {LevyModel::stable(1.5), LevyModel::wiener(),
          LevyModel::compound_poisson(exp_jumps(0.5, 2.0)),
          LevyModel::compound_poisson(atom_jumps(0.75, 1.5)),
          LevyModel::compound_poisson(uniform_jumps(0.2, 0.8, 1.0))}) {
        const LevyModel back = LevyModel::from_json(m.to_json());
        CHECK(back.to_json() == m.to_json());
    }
    nlohmann::json bad = {{"kind", "stable"}, {"alpha", 1.5}, {"extra", 1}};
    CHECK_THROWS_AS(LevyModel::from_json(bad), SchemaError);
    nlohmann::json bad_alpha = {{"kind", "stable"}, {"alpha", 0.9}};
    CHECK_THROWS_AS(LevyModel::from_json(bad_alpha), SchemaError);
    nlohmann::json bad_kind = {{"kind", "gamma"}};
    CHECK_THROWS_AS(LevyModel::from_json(bad_kind), SchemaError);
}

}  // TEST_SUITE
