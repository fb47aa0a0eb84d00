#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "ats/rng.hpp"

namespace ats::levy {

enum class Kind { StableMartingale, WienerUnit, CompoundPoissonMartingale };

enum class JumpFamily { Exponential, Atom, Uniform };

// Parametric jump menu for the compound-Poisson kind. Every admissible family
// has support in (0, +inf) and finite mean jump mass.
struct JumpSpec {
    JumpFamily family = JumpFamily::Exponential;
    double intensity = 0.0;           // expected jump count per unit time
    double mean = 0.0;                // Exponential: mean jump size
    double location = 0.0;            // Atom: the single jump size
    double lower = 0.0, upper = 0.0;  // Uniform: jump size bounds

    double mean_jump_size() const;  // E[Y] of one jump
    double support_min() const;
    double support_max() const;      // +inf for Exponential
    double density(double y) const;  // size density times intensity (Levy density)
};

// Levy martingale driving the short rate: spectrally positive stable
// (exponent c_alpha * lambda^alpha), unit Wiener (lambda^2/2), or compensated
// compound Poisson from the jump menu. Immutable after construction.
class LevyModel {
public:
    static LevyModel stable(double alpha);  // alpha in (1,2]; alpha=2 is the Wiener case
    static LevyModel wiener();
    static LevyModel compound_poisson(const JumpSpec& jump);
    // No validation; lets tests build inadmissible specimens (e.g. two-sided jumps).
    static LevyModel unchecked(Kind kind, double alpha, std::optional<JumpSpec> jump);

    Kind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    // c in J(lambda) = c * lambda^alpha for the stable kinds (1/2 at alpha=2).
    double stable_coefficient() const { return c_alpha_; }
    double gaussian_q() const { return q_; }
    // Triplet drift making E Z(t) = 0.
    double compensator_drift() const;
    const std::optional<JumpSpec>& jump() const { return jump_; }
    std::string tag() const;

    nlohmann::json to_json() const;
    static LevyModel from_json(const nlohmann::json& j);

private:
    LevyModel() = default;
    Kind kind_ = Kind::WienerUnit;
    double alpha_ = 2.0;
    double c_alpha_ = 0.5;
    double q_ = 1.0;
    std::optional<JumpSpec> jump_;
};

// Gamma(2-alpha) / (alpha*(alpha-1)) for alpha in (1,2); 1/2 at alpha = 2.
double stable_coefficient(double alpha);

// J(lambda) with E[exp(-lambda Z(t))] = exp(t J(lambda)); lambda >= 0.
double laplace_exponent(const LevyModel& m, double lambda);

// J'(lambda), lambda > 0.
double laplace_exponent_derivative(const LevyModel& m, double lambda);

// Integral of y against the jump measure; compound-Poisson kinds only.
double mean_jump_mass(const LevyModel& m);

// Integral of (1 - exp(-theta*y)) against the jump measure, theta >= 0.
// This is the jump term of the constant-volatility curve system.
double one_minus_exp_integral(const LevyModel& m, double theta);

// One raw jump size from the menu law (always > 0 for admissible specs).
double draw_jump(const JumpSpec& jump, rng::Engine& g);

// Draws increments of Z over a fixed step dt; per-(model, dt) constants are
// precomputed so the call is cheap inside simulation loops.
class IncrementSampler {
public:
    IncrementSampler(const LevyModel& m, double dt);
    double operator()(rng::Engine& g) const;

private:
    enum class Mode { Stable, Gaussian, CompoundPoisson };
    Mode mode_;
    double alpha_ = 0, inv_alpha_ = 0, skew_shift_ = 0, exp_ratio_ = 0, scale_ = 0;
    double gauss_scale_ = 0;
    double jump_rate_ = 0, compensation_ = 0;
    JumpSpec jump_;
};

// n independent draws of Z(dt) for the given seed.
Eigen::ArrayXd sample_increments(const LevyModel& m, double dt, Eigen::Index n,
                                 std::uint64_t seed);

}  // namespace ats::levy
