#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ats/curves.hpp"
#include "ats/sde.hpp"

namespace ats::validate {

// Outcome of one validator run: labelled statistics against a tolerance.
// Analytic checks pass when max |statistic| <= tolerance; Monte-Carlo checks
// use z-scores with tolerance 3.
struct ValidationReport {
    std::string name;
    std::string description;
    std::vector<std::string> labels;
    Eigen::ArrayXd statistics;
    double tolerance = 0.0;
    bool pass = false;
    double runtime_seconds = 0.0;
    std::uint64_t seed = 0;
    std::string notes;

    double max_statistic() const;
    nlohmann::json to_json() const;
    std::string to_text() const;
};

// Left side of the martingale functional equation: sum over noises of
// J_j(G_j(x) * B).
double hjm_equation_lhs(const sde::ShortRateModel& model, double x, double B);

// | J(G(x)B(v)) + A'(v) + (B'(v)-1)x - B(v)F(x) | at one point.
double hjm_pointwise_residual(const sde::ShortRateModel& model,
                              const curves::CurvePair& pair, double x, double v);

// Residual tabulated over an (x,v) grid; pass when the maximum is within
// tolerance. x >= 0, v inside the curve grid.
ValidationReport hjm_residual(const sde::ShortRateModel& model, const curves::CurvePair& pair,
                              const Eigen::ArrayXd& x_grid, const Eigen::ArrayXd& v_grid,
                              double tolerance = 1e-6);

// Integral form of the same condition: |A(t,T) - sum_j J_j(Sigma_j(t,T))| with
// both sides computed by quadrature of the forward-rate drift/volatility.
double integrated_hjm_check(const sde::ShortRateModel& model, const curves::CurvePair& pair,
                            double t, double T, double r, double quad_tol = 1e-10);

// Monte-Carlo martingale test: sample mean of the discounted bond price at
// each checkpoint against P(0,T), pass when every |z| <= 3. This checks
// constant expectation, a proxy necessary condition; see the report notes.
ValidationReport martingale_mc_test(const sde::ShortRateModel& model,
                                    const curves::CurvePair& pair, double T,
                                    const std::vector<double>& checkpoints,
                                    Eigen::Index n_paths, Eigen::Index steps,
                                    std::uint64_t seed, int threads = 1);

// Structural noise checks: positive jump support, exponent finite on [0,10],
// and the J(l)/l -> 0 limit on a decreasing sequence.
ValidationReport levy_admissibility_check(const levy::LevyModel& m);

// Short-rate model admissibility surfaced as a report.
ValidationReport model_admissibility_check(const sde::ShortRateModel& model);

}  // namespace ats::validate
