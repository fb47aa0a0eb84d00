#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ats/levy.hpp"

namespace ats::sde {

// G(x) = c^(1/alpha) * x^exponent; exponent defaults to 1/alpha and is only
// overridden by falsification experiments (such models are inadmissible).
// c = 0 switches the noise off entirely (deterministic limit).
struct PowerLawDiffusion {
    double c = 0.0;
    double alpha = 2.0;
    double exponent = 0.5;
};

// G(x) = sigma with a compensated compound-Poisson noise.
struct ConstantDiffusion {
    double sigma = 1.0;
};

// Two independent stable noises entering as x^(1/alpha) and x^(1/beta).
struct MultiStableDiffusion {
    double alpha = 1.5;
    double beta = 1.5;
};

using DiffusionSpec = std::variant<PowerLawDiffusion, ConstantDiffusion, MultiStableDiffusion>;

// Short-rate equation dR = (a*R + b) dt + G(R-) dZ with the noise bound to the
// diffusion family. Immutable after construction.
class ShortRateModel {
public:
    ShortRateModel() = default;  // degenerate deterministic model (all zero)

    static ShortRateModel power_law(double a, double b, double c, double alpha, double x0);
    static ShortRateModel constant_vol(double a, double b, double sigma,
                                       const levy::LevyModel& noise, double x0);
    static ShortRateModel multi_stable(double a, double b, double alpha, double beta,
                                       double x0);
    // Copy with G(x) = c^(1/alpha) * x^gamma; used to probe the curve system
    // with a diffusion it was not solved for.
    ShortRateModel with_diffusion_exponent(double gamma) const;

    // Structural conditions the noise/drift/diffusion must satisfy; empty when
    // the model is admissible.
    std::vector<std::string> admissibility_violations() const;
    void ensure_admissible() const;  // throws ModelError listing the violations

    double drift_a() const { return a_; }
    double drift_b() const { return b_; }
    double x0() const { return x0_; }
    double drift(double x) const { return a_ * x + b_; }
    const DiffusionSpec& diffusion() const { return diffusion_; }
    const levy::LevyModel& noise() const { return noise_; }
    const std::optional<levy::LevyModel>& second_noise() const { return noise2_; }
    int noise_count() const { return noise2_ ? 2 : 1; }
    // G_j(x), evaluated at max(x, 0).
    double diffusion_value(double x, int which = 0) const;

    std::string tag() const;
    nlohmann::json to_json() const;
    static ShortRateModel from_json(const nlohmann::json& j);

private:
    double a_ = 0.0, b_ = 0.0, x0_ = 0.0;
    DiffusionSpec diffusion_ = PowerLawDiffusion{};
    levy::LevyModel noise_ = levy::LevyModel::wiener();
    std::optional<levy::LevyModel> noise2_;
};

struct ClampStats {
    std::int64_t clamped = 0;
    std::int64_t total_steps = 0;
    double worst_excursion = 0.0;  // magnitude of the most negative pre-clamp state
};

// Simulated trajectories sampled on a stored subset of the stepping grid.
class PathEnsemble {
public:
    PathEnsemble(Eigen::ArrayXd times, Eigen::ArrayXXd rates, Eigen::ArrayXXd integrated,
                 std::vector<std::uint64_t> seeds, std::string model_tag, ClampStats clamps);

    const Eigen::ArrayXd& times() const { return times_; }
    const Eigen::ArrayXXd& rates() const { return rates_; }                      // paths x times
    const Eigen::ArrayXXd& integrated_rate() const { return integrated_; }      // trapezoid
    const std::vector<std::uint64_t>& seeds() const { return seeds_; }
    const std::string& model_tag() const { return model_tag_; }
    const ClampStats& clamp_stats() const { return clamps_; }
    Eigen::Index n_paths() const { return rates_.rows(); }
    Eigen::Index n_times() const { return rates_.cols(); }

    // Index of a stored time; throws GridError if t is not on the stored grid.
    Eigen::Index time_index(double t) const;

    void write_csv(std::ostream& rates_out, std::ostream& integrated_out) const;
    void write_binary(std::ostream& out) const;

private:
    Eigen::ArrayXd times_;
    Eigen::ArrayXXd rates_, integrated_;
    std::vector<std::uint64_t> seeds_;
    std::string model_tag_;
    ClampStats clamps_;
};

struct SimulateOptions {
    // Step indices to store (0-based, in units of dt); empty means every step.
    // Index 0 is always stored.
    std::vector<Eigen::Index> store_steps;
    int threads = 1;
};

// Explicit Euler with full truncation: the diffusion argument is max(R,0) and
// a negative post-step state is clamped at zero with the event counted.
// Deterministic given (model, horizon, steps, n_paths, seed) regardless of the
// thread count: path i uses rng::stream_seed(seed, i).
PathEnsemble simulate(const ShortRateModel& model, double horizon, Eigen::Index steps,
                      Eigen::Index n_paths, std::uint64_t seed,
                      const SimulateOptions& options = {});

struct ClampReport {
    double clamp_fraction = 0.0;
    double worst_excursion = 0.0;
    std::int64_t clamped = 0;
    std::int64_t total_steps = 0;
};

ClampReport clamp_report(const PathEnsemble& ensemble);

}  // namespace ats::sde
