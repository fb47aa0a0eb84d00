#include "ats/pricing.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <variant>

#include "ats/errors.hpp"

namespace ats::pricing {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double pow_pos(double x, double p) { return x <= 0.0 ? 0.0 : std::exp(p * std::log(x)); }

void check_rate(double r) {
    if (r < 0.0) throw DomainError("short rate must be >= 0");
}

void validate_surface(const BondSurface& s) {
    for (Eigen::Index i = 0; i < s.times.size(); ++i) {
        double prev = kNaN;
        for (Eigen::Index j = 0; j < s.maturities.size(); ++j) {
            const double p = s.prices(i, j);
            if (std::isnan(p)) continue;
            if (!(p > 0.0 && p <= 1.0)) throw ModelError("bond surface: P outside (0,1]");
            if (!std::isnan(prev) && p > prev + 1e-15)
                throw ModelError("bond surface: P increasing in maturity");
            prev = p;
        }
    }
}

template <class RateAt>
BondSurface build_surface(const sde::PathEnsemble& ensemble, const Eigen::ArrayXd& maturities,
                          bool per_path, const RateAt& price_at) {
    BondSurface s;
    s.times = ensemble.times();
    s.maturities = maturities;
    s.per_path = per_path;
    s.prices.resize(s.times.size(), maturities.size());
    for (Eigen::Index i = 0; i < s.times.size(); ++i)
        for (Eigen::Index j = 0; j < maturities.size(); ++j) {
            const double t = s.times[i];
            const double T = maturities[j];
            s.prices(i, j) = T < t ? kNaN : price_at(i, t, T);
        }
    validate_surface(s);
    return s;
}

}  // namespace

double bond_price(const curves::CurvePair& pair, double r, double t, double T) {
    check_rate(r);
    if (T < t) throw RangeError("bond_price: maturity before observation time");
    const curves::CurvePoint p = pair.at(T - t);
    return std::exp(-p.A - p.B * r);
}

double discounted_price_path(const curves::CurvePair& pair, const sde::PathEnsemble& ensemble,
                             Eigen::Index path, double t, double T) {
    if (path < 0 || path >= ensemble.n_paths())
        throw GridError("discounted_price_path: path index out of range");
    const Eigen::Index j = ensemble.time_index(t);
    const double r = ensemble.rates()(path, j);
    const double discount = std::exp(-ensemble.integrated_rate()(path, j));
    return bond_price(pair, r, t, T) * discount;
}

double forward_rate(const curves::CurvePair& pair, double r, double t, double T) {
    check_rate(r);
    if (T < t) throw RangeError("forward_rate: maturity before observation time");
    const curves::CurvePoint p = pair.at(T - t);
    return p.A_prime + p.B_prime * r;
}

CurveSecond curve_second_derivatives(const sde::ShortRateModel& model, double B,
                                     double B_prime) {
    const double a = model.drift_a();
    const double b = model.drift_b();
    CurveSecond out;
    if (const auto* p = std::get_if<sde::PowerLawDiffusion>(&model.diffusion())) {
        const double alpha = p->alpha;
        const double k = p->c * levy::stable_coefficient(alpha);
        out.B_second = (-k * alpha * pow_pos(B, alpha - 1.0) + a) * B_prime;
        out.A_second = b * B_prime;
    } else if (const auto* cst = std::get_if<sde::ConstantDiffusion>(&model.diffusion())) {
        const double arg = cst->sigma * B;
        const double jprime =
            arg > 0.0 ? levy::laplace_exponent_derivative(model.noise(), arg) : 0.0;
        out.B_second = a * B_prime;
        out.A_second = B_prime * (b - cst->sigma * jprime);
    } else {
        const auto& ms = std::get<sde::MultiStableDiffusion>(model.diffusion());
        const double ka = levy::stable_coefficient(ms.alpha);
        const double kb = levy::stable_coefficient(ms.beta);
        out.B_second = (-ka * ms.alpha * pow_pos(B, ms.alpha - 1.0) -
                        kb * ms.beta * pow_pos(B, ms.beta - 1.0) + a) *
                       B_prime;
        out.A_second = b * B_prime;
    }
    return out;
}

HjmCoefficients hjm_drift_vol(const curves::CurvePair& pair, const sde::ShortRateModel& model,
                              double r, double t, double T) {
    check_rate(r);
    if (T < t) throw RangeError("hjm_drift_vol: maturity before observation time");
    const curves::CurvePoint p = pair.at(T - t);
    const CurveSecond sec = curve_second_derivatives(model, p.B, p.B_prime);
    HjmCoefficients out;
    out.drift = model.drift(r) * p.B_prime - sec.A_second - sec.B_second * r;
    out.vol = p.B_prime * model.diffusion_value(r, 0);
    if (model.noise_count() == 2) {
        out.vol2 = p.B_prime * model.diffusion_value(r, 1);
        out.n_vols = 2;
    }
    return out;
}

void BondSurface::write_csv(std::ostream& out) const {
    char buf[3][40];
    out << "t,T,P\n";
    for (Eigen::Index i = 0; i < times.size(); ++i)
        for (Eigen::Index j = 0; j < maturities.size(); ++j) {
            if (std::isnan(prices(i, j))) continue;
            std::snprintf(buf[0], sizeof(buf[0]), "%.17g", times[i]);
            std::snprintf(buf[1], sizeof(buf[1]), "%.17g", maturities[j]);
            std::snprintf(buf[2], sizeof(buf[2]), "%.17g", prices(i, j));
            out << buf[0] << ',' << buf[1] << ',' << buf[2] << '\n';
        }
}

nlohmann::json BondSurface::to_json() const {
    nlohmann::json j;
    j["per_path"] = per_path;
    j["t"] = std::vector<double>(times.data(), times.data() + times.size());
    j["T"] = std::vector<double>(maturities.data(), maturities.data() + maturities.size());
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < times.size(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index jj = 0; jj < maturities.size(); ++jj) {
            if (std::isnan(prices(i, jj)))
                row.push_back(nullptr);
            else
                row.push_back(prices(i, jj));
        }
        rows.push_back(row);
    }
    j["P"] = rows;
    return j;
}

BondSurface bond_surface_from_path(const curves::CurvePair& pair,
                                   const sde::PathEnsemble& ensemble, Eigen::Index path,
                                   const Eigen::ArrayXd& maturities) {
    if (path < 0 || path >= ensemble.n_paths())
        throw GridError("bond_surface_from_path: path index out of range");
    return build_surface(ensemble, maturities, true,
                         [&](Eigen::Index i, double t, double T) {
                             return bond_price(pair, ensemble.rates()(path, i), t, T);
                         });
}

BondSurface bond_surface_expected(const curves::CurvePair& pair,
                                  const sde::PathEnsemble& ensemble,
                                  const Eigen::ArrayXd& maturities) {
    return build_surface(ensemble, maturities, false,
                         [&](Eigen::Index i, double t, double T) {
                             const curves::CurvePoint p = pair.at(T - t);
                             const auto r = ensemble.rates().col(i);
                             return (-(p.A + p.B * r)).exp().mean();
                         });
}

}  // namespace ats::pricing
