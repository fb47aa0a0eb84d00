#pragma once

#include <Eigen/Core>
#include <iosfwd>

#include <json.hpp>

#include "ats/curves.hpp"
#include "ats/sde.hpp"

namespace ats::pricing {

// exp(-A(T-t) - B(T-t)*r); T-t must lie inside the curve grid.
double bond_price(const curves::CurvePair& pair, double r, double t, double T);

// bond_price at the path's stored rate, discounted by exp(-integral of R to t).
double discounted_price_path(const curves::CurvePair& pair, const sde::PathEnsemble& ensemble,
                             Eigen::Index path, double t, double T);

// A'(T-t) + B'(T-t)*r; equals r at T = t.
double forward_rate(const curves::CurvePair& pair, double r, double t, double T);

// Curve second derivatives obtained by differentiating the generating ODE
// right-hand side (chain rule through B), never by numerical differencing.
struct CurveSecond {
    double A_second = 0;
    double B_second = 0;
};
CurveSecond curve_second_derivatives(const sde::ShortRateModel& model, double B,
                                     double B_prime);

// Forward-rate drift and volatility under the model:
//   drift = F(r) B'(v) - A''(v) - B''(v) r,   vol_j = B'(v) G_j(r),  v = T - t.
struct HjmCoefficients {
    double drift = 0;
    double vol = 0;
    double vol2 = 0;  // second noise, multi-noise models only
    int n_vols = 1;
};
HjmCoefficients hjm_drift_vol(const curves::CurvePair& pair, const sde::ShortRateModel& model,
                              double r, double t, double T);

// Bond price table over observation times and maturities; entries with T < t
// are NaN. per_path marks a single-trajectory surface as opposed to the
// ensemble average.
struct BondSurface {
    Eigen::ArrayXd times;
    Eigen::ArrayXd maturities;
    Eigen::ArrayXXd prices;  // times x maturities
    bool per_path = false;

    void write_csv(std::ostream& out) const;  // header t,T,P
    nlohmann::json to_json() const;
};

BondSurface bond_surface_from_path(const curves::CurvePair& pair,
                                   const sde::PathEnsemble& ensemble, Eigen::Index path,
                                   const Eigen::ArrayXd& maturities);

BondSurface bond_surface_expected(const curves::CurvePair& pair,
                                  const sde::PathEnsemble& ensemble,
                                  const Eigen::ArrayXd& maturities);

}  // namespace ats::pricing
