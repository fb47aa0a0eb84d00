#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ats/levy.hpp"

namespace ats::curves {

using Grid = Eigen::ArrayXd;

// Uniform maturity grid starting at 0.
Grid uniform_grid(double t_max, Eigen::Index nodes = 512);

struct CurvePoint {
    double A = 0, B = 0, A_prime = 0, B_prime = 0;
};

// Tabulated affine curve pair with derivative arrays filled from the
// generating equations. Evaluation between nodes is cubic Hermite with the
// stored derivatives, so grid nodes reproduce bit-exactly.
class CurvePair {
public:
    CurvePair(Grid grid, Grid A, Grid B, Grid A_prime, Grid B_prime, std::string model_tag);

    const Grid& grid() const { return grid_; }
    const Grid& A() const { return A_; }
    const Grid& B() const { return B_; }
    const Grid& A_prime() const { return A_prime_; }
    const Grid& B_prime() const { return B_prime_; }
    const std::string& model_tag() const { return model_tag_; }
    double max_maturity() const { return grid_[grid_.size() - 1]; }

    CurvePoint at(double v) const;

    void write_csv(std::ostream& out) const;  // header v,A,B,A_prime,B_prime
    nlohmann::json to_json() const;

private:
    Grid grid_, A_, B_, A_prime_, B_prime_;
    std::string model_tag_;
};

// B' = -c*c_alpha*B^alpha + a*B + 1, A' = b*B, both starting from 0; adaptive
// Runge-Kutta at relative tolerance 1e-10 sampled onto the grid. c = 0 is the
// degenerate linear case.
CurvePair solve_stable_riccati(double a, double b, double c, double alpha, const Grid& grid);

// Constant-volatility jump model: B closed form from B' = a*B + 1, and
// A'(v) = B(v)*(b - sigma*m1) + integral of (1 - exp(-sigma*B(v)*y)) d(nu),
// with A integrated by quadrature. Requires b >= sigma * mean jump mass.
CurvePair solve_constant_vol_curves(double a, double b, double sigma,
                                    const levy::LevyModel& noise, const Grid& grid);

// Two-noise system B' = -w_a*c_alpha*B^alpha - w_b*c_beta*B^beta + a*B + 1,
// A' = b*B. The weights default to 1 and exist so degenerate single-noise
// limits can be compared against solve_stable_riccati.
CurvePair solve_multi_noise_riccati(double a, double b, double alpha, double beta,
                                    const Grid& grid, double weight_alpha = 1.0,
                                    double weight_beta = 1.0);

// Structural requirements on a solved pair (zero at zero, unit initial slope,
// non-negative and non-decreasing). Violations are returned, never clipped.
std::vector<std::string> invariant_violations(const CurvePair& pair);

}  // namespace ats::curves
