#include "ats/levy.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ats/errors.hpp"
#include "ats/jsonio.hpp"
#include "ats/quadrature.hpp"

namespace ats::levy {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kQuadTol = 1e-10;  // absolute tolerance for exponent quadrature
constexpr double kInf = std::numeric_limits<double>::infinity();

// Integration cutoff for the exponential family: beyond mean*(60 + log terms)
// the Levy-density tail contributes below 1e-22 for every integrand we use.
double exponential_cutoff(const JumpSpec& jump, double lambda) {
    return jump.mean * (60.0 + std::log1p(lambda * jump.mean) + std::log1p(jump.intensity));
}

// Quadrature of `f(y) * levy_density(y)` over the jump support.
template <class F>
double jump_integral(const JumpSpec& jump, double lambda_scale, const F& f) {
    if (jump.intensity == 0.0) return 0.0;
    const double lo = jump.support_min();
    const double hi = jump.family == JumpFamily::Exponential
                          ? exponential_cutoff(jump, lambda_scale)
                          : jump.support_max();
    auto integrand = [&](double y) { return f(y) * jump.density(y); };
    return quadrature::integrate(integrand, lo, hi, kQuadTol);
}

}  // namespace

double JumpSpec::mean_jump_size() const {
    switch (family) {
        case JumpFamily::Exponential: return mean;
        case JumpFamily::Atom: return location;
        case JumpFamily::Uniform: return 0.5 * (lower + upper);
    }
    return 0.0;
}

double JumpSpec::support_min() const {
    switch (family) {
        case JumpFamily::Exponential: return 0.0;
        case JumpFamily::Atom: return location;
        case JumpFamily::Uniform: return lower;
    }
    return 0.0;
}

double JumpSpec::support_max() const {
    switch (family) {
        case JumpFamily::Exponential: return kInf;
        case JumpFamily::Atom: return location;
        case JumpFamily::Uniform: return upper;
    }
    return 0.0;
}

double JumpSpec::density(double y) const {
    switch (family) {
        case JumpFamily::Exponential:
            return y >= 0.0 ? intensity / mean * std::exp(-y / mean) : 0.0;
        case JumpFamily::Atom:
            throw ModelError("atom jump family has no density");
        case JumpFamily::Uniform:
            return (y >= lower && y <= upper) ? intensity / (upper - lower) : 0.0;
    }
    return 0.0;
}

double stable_coefficient(double alpha) {
    if (!(alpha > 1.0 && alpha <= 2.0))
        throw DomainError("stable index must lie in (1,2]");
    if (alpha == 2.0) return 0.5;
    return std::tgamma(2.0 - alpha) / (alpha * (alpha - 1.0));
}

LevyModel LevyModel::stable(double alpha) {
    LevyModel m;
    m.alpha_ = alpha;
    m.c_alpha_ = ats::levy::stable_coefficient(alpha);
    if (alpha == 2.0) {
        m.kind_ = Kind::WienerUnit;
        m.q_ = 1.0;
    } else {
        m.kind_ = Kind::StableMartingale;
        m.q_ = 0.0;
    }
    return m;
}

LevyModel LevyModel::wiener() { return stable(2.0); }

LevyModel LevyModel::compound_poisson(const JumpSpec& jump) {
    if (jump.intensity < 0.0) throw ModelError("jump intensity must be >= 0");
    switch (jump.family) {
        case JumpFamily::Exponential:
            if (jump.mean <= 0.0) throw ModelError("exponential jump mean must be > 0");
            break;
        case JumpFamily::Atom:
            if (jump.location <= 0.0) throw ModelError("atom jump size must be > 0");
            break;
        case JumpFamily::Uniform:
            if (!(jump.lower > 0.0 && jump.upper > jump.lower))
                throw ModelError("uniform jump bounds must satisfy 0 < lower < upper");
            break;
    }
    LevyModel m;
    m.kind_ = Kind::CompoundPoissonMartingale;
    m.alpha_ = 0.0;
    m.c_alpha_ = 0.0;
    m.q_ = 0.0;
    m.jump_ = jump;
    return m;
}

LevyModel LevyModel::unchecked(Kind kind, double alpha, std::optional<JumpSpec> jump) {
    LevyModel m;
    m.kind_ = kind;
    m.alpha_ = alpha;
    m.q_ = kind == Kind::WienerUnit ? 1.0 : 0.0;
    m.c_alpha_ = kind == Kind::CompoundPoissonMartingale
                     ? 0.0
                     : (alpha > 1.0 && alpha <= 2.0 ? ats::levy::stable_coefficient(alpha) : 0.0);
    m.jump_ = std::move(jump);
    return m;
}

double LevyModel::compensator_drift() const {
    switch (kind_) {
        case Kind::StableMartingale:
            // Martingale condition: drift cancels the jump mass above 1.
            return -1.0 / (alpha_ - 1.0);
        case Kind::WienerUnit: return 0.0;
        case Kind::CompoundPoissonMartingale:
            return -jump_->intensity * jump_->mean_jump_size();
    }
    return 0.0;
}

std::string LevyModel::tag() const {
    std::ostringstream out;
    switch (kind_) {
        case Kind::StableMartingale: out << "stable(alpha=" << alpha_ << ")"; break;
        case Kind::WienerUnit: out << "wiener"; break;
        case Kind::CompoundPoissonMartingale:
            out << "cpp(";
            switch (jump_->family) {
                case JumpFamily::Exponential: out << "exp mean=" << jump_->mean; break;
                case JumpFamily::Atom: out << "atom at=" << jump_->location; break;
                case JumpFamily::Uniform:
                    out << "uniform [" << jump_->lower << "," << jump_->upper << "]";
                    break;
            }
            out << " intensity=" << jump_->intensity << ")";
            break;
    }
    return out.str();
}

nlohmann::json LevyModel::to_json() const {
    nlohmann::json j;
    switch (kind_) {
        case Kind::StableMartingale:
            j["kind"] = "stable";
            j["alpha"] = alpha_;
            break;
        case Kind::WienerUnit: j["kind"] = "wiener"; break;
        case Kind::CompoundPoissonMartingale: {
            j["kind"] = "cpp";
            nlohmann::json jump;
            jump["intensity"] = jump_->intensity;
            switch (jump_->family) {
                case JumpFamily::Exponential:
                    jump["family"] = "exp";
                    jump["mean"] = jump_->mean;
                    break;
                case JumpFamily::Atom:
                    jump["family"] = "atom";
                    jump["location"] = jump_->location;
                    break;
                case JumpFamily::Uniform:
                    jump["family"] = "uniform";
                    jump["lower"] = jump_->lower;
                    jump["upper"] = jump_->upper;
                    break;
            }
            j["jump"] = jump;
            break;
        }
    }
    return j;
}

LevyModel LevyModel::from_json(const nlohmann::json& j) {
    const std::string ctx = "noise";
    const std::string kind = jsonio::text(j, "kind", ctx);
    if (kind == "stable") {
        jsonio::reject_unknown(j, {"kind", "alpha"}, ctx);
        const double alpha = jsonio::number(j, "alpha", ctx);
        if (!(alpha > 1.0 && alpha <= 2.0))
            throw SchemaError(ctx + ": alpha must lie in (1,2]");
        return stable(alpha);
    }
    if (kind == "wiener") {
        jsonio::reject_unknown(j, {"kind"}, ctx);
        return wiener();
    }
    if (kind == "cpp") {
        jsonio::reject_unknown(j, {"kind", "jump"}, ctx);
        const nlohmann::json& jj = jsonio::require(j, "jump", ctx);
        const std::string jctx = "noise.jump";
        const std::string family = jsonio::text(jj, "family", jctx);
        JumpSpec spec;
        spec.intensity = jsonio::number(jj, "intensity", jctx);
        if (family == "exp") {
            jsonio::reject_unknown(jj, {"family", "intensity", "mean"}, jctx);
            spec.family = JumpFamily::Exponential;
            spec.mean = jsonio::number(jj, "mean", jctx);
        } else if (family == "atom") {
            jsonio::reject_unknown(jj, {"family", "intensity", "location"}, jctx);
            spec.family = JumpFamily::Atom;
            spec.location = jsonio::number(jj, "location", jctx);
        } else if (family == "uniform") {
            jsonio::reject_unknown(jj, {"family", "intensity", "lower", "upper"}, jctx);
            spec.family = JumpFamily::Uniform;
            spec.lower = jsonio::number(jj, "lower", jctx);
            spec.upper = jsonio::number(jj, "upper", jctx);
        } else {
            throw SchemaError(jctx + ": unknown family '" + family + "'");
        }
        try {
            return compound_poisson(spec);
        } catch (const ModelError& e) {
            throw SchemaError(jctx + ": " + e.what());
        }
    }
    throw SchemaError(ctx + ": unknown kind '" + kind + "'");
}

double laplace_exponent(const LevyModel& m, double lambda) {
    if (lambda < 0.0) throw DomainError("laplace_exponent: lambda must be >= 0");
    if (lambda == 0.0) return 0.0;
    switch (m.kind()) {
        case Kind::StableMartingale:
            return m.stable_coefficient() * std::pow(lambda, m.alpha());
        case Kind::WienerUnit: return 0.5 * m.gaussian_q() * lambda * lambda;
        case Kind::CompoundPoissonMartingale: {
            const JumpSpec& jump = *m.jump();
            if (jump.family == JumpFamily::Atom) {
                const double y = jump.location;
                return jump.intensity * (std::expm1(-lambda * y) + lambda * y);
            }
            return jump_integral(jump, lambda, [lambda](double y) {
                return std::expm1(-lambda * y) + lambda * y;
            });
        }
    }
    return 0.0;
}

double laplace_exponent_derivative(const LevyModel& m, double lambda) {
    if (lambda <= 0.0)
        throw DomainError("laplace_exponent_derivative: lambda must be > 0");
    switch (m.kind()) {
        case Kind::StableMartingale:
            return m.alpha() * m.stable_coefficient() * std::pow(lambda, m.alpha() - 1.0);
        case Kind::WienerUnit: return m.gaussian_q() * lambda;
        case Kind::CompoundPoissonMartingale: {
            const JumpSpec& jump = *m.jump();
            if (jump.family == JumpFamily::Atom) {
                const double y = jump.location;
                return jump.intensity * y * -std::expm1(-lambda * y);
            }
            return jump_integral(jump, lambda, [lambda](double y) {
                return y * -std::expm1(-lambda * y);
            });
        }
    }
    return 0.0;
}

double mean_jump_mass(const LevyModel& m) {
    if (m.kind() != Kind::CompoundPoissonMartingale)
        throw ModelError("mean_jump_mass: model kind has no jump measure");
    const JumpSpec& jump = *m.jump();
    return jump.intensity * jump.mean_jump_size();
}

double one_minus_exp_integral(const LevyModel& m, double theta) {
    if (theta < 0.0) throw DomainError("one_minus_exp_integral: theta must be >= 0");
    if (m.kind() != Kind::CompoundPoissonMartingale)
        throw ModelError("one_minus_exp_integral: model kind has no jump measure");
    if (theta == 0.0) return 0.0;
    const JumpSpec& jump = *m.jump();
    if (jump.family == JumpFamily::Atom)
        return jump.intensity * -std::expm1(-theta * jump.location);
    return jump_integral(jump, theta,
                         [theta](double y) { return -std::expm1(-theta * y); });
}

double draw_jump(const JumpSpec& jump, rng::Engine& g) {
    switch (jump.family) {
        case JumpFamily::Exponential: return jump.mean * rng::exponential(g);
        case JumpFamily::Atom: return jump.location;
        case JumpFamily::Uniform:
            return jump.lower + (jump.upper - jump.lower) * rng::uniform_open(g);
    }
    return 0.0;
}

IncrementSampler::IncrementSampler(const LevyModel& m, double dt) {
    if (dt <= 0.0) throw DomainError("IncrementSampler: dt must be > 0");
    switch (m.kind()) {
        case Kind::StableMartingale: {
            // Totally-skewed trigonometric sampler matched to J = c_alpha*l^alpha:
            // Z(dt) = (c_alpha*dt)^(1/alpha) * sin(a(V+B0))/cos(V)^(1/a)
            //         * (cos(V - a(V+B0))/W)^((1-a)/a),
            // V uniform on (-pi/2, pi/2), W unit exponential, B0 = pi/2 - pi/alpha.
            // The skew-one scale factor (1+tan^2(pi a/2))^(1/(2a)) cancels against
            // the |cos(pi a/2)| of the Laplace-transform match.
            mode_ = Mode::Stable;
            alpha_ = m.alpha();
            inv_alpha_ = 1.0 / alpha_;
            skew_shift_ = kPi / 2.0 - kPi / alpha_;
            exp_ratio_ = (1.0 - alpha_) / alpha_;
            scale_ = std::pow(m.stable_coefficient() * dt, inv_alpha_);
            break;
        }
        case Kind::WienerUnit:
            mode_ = Mode::Gaussian;
            gauss_scale_ = std::sqrt(m.gaussian_q() * dt);
            break;
        case Kind::CompoundPoissonMartingale:
            mode_ = Mode::CompoundPoisson;
            jump_ = *m.jump();
            jump_rate_ = jump_.intensity * dt;
            compensation_ = jump_.intensity * jump_.mean_jump_size() * dt;
            break;
    }
}

double IncrementSampler::operator()(rng::Engine& g) const {
    switch (mode_) {
        case Mode::Stable: {
            const double v = kPi * (rng::uniform_open(g) - 0.5);
            const double w = rng::exponential(g);
            const double shifted = alpha_ * (v + skew_shift_);
            const double x = std::sin(shifted) * std::pow(std::cos(v), -inv_alpha_) *
                             std::pow(std::cos(v - shifted) / w, exp_ratio_);
            return scale_ * x;
        }
        case Mode::Gaussian: return gauss_scale_ * rng::normal(g);
        case Mode::CompoundPoisson: {
            const std::int64_t n = rng::poisson(g, jump_rate_);
            double sum = 0.0;
            for (std::int64_t i = 0; i < n; ++i) sum += draw_jump(jump_, g);
            return sum - compensation_;
        }
    }
    return 0.0;
}

Eigen::ArrayXd sample_increments(const LevyModel& m, double dt, Eigen::Index n,
                                 std::uint64_t seed) {
    if (dt <= 0.0) throw DomainError("sample_increments: dt must be > 0");
    if (n < 1) throw DomainError("sample_increments: n must be >= 1");
    IncrementSampler sampler(m, dt);
    rng::Engine g = rng::make_engine(seed);
    Eigen::ArrayXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = sampler(g);
    return out;
}

}  // namespace ats::levy
