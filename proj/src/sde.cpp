#include "ats/sde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <sstream>
#include <thread>

#include "ats/errors.hpp"
#include "ats/jsonio.hpp"

namespace ats::sde {

namespace {

double pow_pos(double x, double p) { return x <= 0.0 ? 0.0 : std::exp(p * std::log(x)); }

void append_csv_row(std::ostream& out, std::uint64_t path, std::uint64_t seed,
                    const Eigen::ArrayXXd& values, Eigen::Index row) {
    char buf[40];
    out << path << ',' << seed;
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g", values(row, j));
        out << ',' << buf;
    }
    out << '\n';
}

}  // namespace

ShortRateModel ShortRateModel::power_law(double a, double b, double c, double alpha,
                                         double x0) {
    ShortRateModel m;
    m.a_ = a;
    m.b_ = b;
    m.x0_ = x0;
    m.diffusion_ = PowerLawDiffusion{c, alpha, 1.0 / alpha};
    m.noise_ = levy::LevyModel::stable(alpha);
    return m;
}

ShortRateModel ShortRateModel::constant_vol(double a, double b, double sigma,
                                            const levy::LevyModel& noise, double x0) {
    ShortRateModel m;
    m.a_ = a;
    m.b_ = b;
    m.x0_ = x0;
    m.diffusion_ = ConstantDiffusion{sigma};
    m.noise_ = noise;
    return m;
}

ShortRateModel ShortRateModel::multi_stable(double a, double b, double alpha, double beta,
                                            double x0) {
    ShortRateModel m;
    m.a_ = a;
    m.b_ = b;
    m.x0_ = x0;
    m.diffusion_ = MultiStableDiffusion{alpha, beta};
    m.noise_ = levy::LevyModel::stable(alpha);
    m.noise2_ = levy::LevyModel::stable(beta);
    return m;
}

ShortRateModel ShortRateModel::with_diffusion_exponent(double gamma) const {
    const auto* p = std::get_if<PowerLawDiffusion>(&diffusion_);
    if (!p) throw ModelError("diffusion exponent override requires a power-law diffusion");
    ShortRateModel m = *this;
    m.diffusion_ = PowerLawDiffusion{p->c, p->alpha, gamma};
    return m;
}

std::vector<std::string> ShortRateModel::admissibility_violations() const {
    std::vector<std::string> v;
    if (x0_ < 0.0) v.push_back("initial rate x0 must be >= 0");
    if (b_ < 0.0) v.push_back("drift constant b must be >= 0");
    if (const auto* p = std::get_if<PowerLawDiffusion>(&diffusion_)) {
        if (p->c < 0.0) v.push_back("power-law scale c must be >= 0");
        if (!(p->alpha > 1.0 && p->alpha <= 2.0))
            v.push_back("power-law index alpha must lie in (1,2]");
        else if (p->exponent != 1.0 / p->alpha)
            v.push_back("diffusion exponent does not equal 1/alpha");
        if (noise_.kind() == levy::Kind::CompoundPoissonMartingale)
            v.push_back("power-law diffusion requires a stable (or Wiener) noise");
        else if (noise_.alpha() != p->alpha)
            v.push_back("noise index does not match the diffusion alpha");
    } else if (const auto* cst = std::get_if<ConstantDiffusion>(&diffusion_)) {
        if (cst->sigma <= 0.0) v.push_back("constant diffusion sigma must be > 0");
        if (noise_.kind() != levy::Kind::CompoundPoissonMartingale) {
            v.push_back("constant diffusion requires a compound-Poisson noise");
        } else {
            if (noise_.jump()->support_min() < 0.0)
                v.push_back("jump law must be supported on (0,+inf)");
            const double mass = levy::mean_jump_mass(noise_);
            if (b_ < cst->sigma * mass) {
                std::ostringstream msg;
                msg << "drift constant b = " << b_ << " is below sigma*mean jump mass = "
                    << cst->sigma * mass;
                v.push_back(msg.str());
            }
        }
    } else if (const auto* ms = std::get_if<MultiStableDiffusion>(&diffusion_)) {
        if (!(ms->alpha > 1.0 && ms->alpha <= 2.0 && ms->beta > 1.0 && ms->beta <= 2.0))
            v.push_back("multi-noise indexes must lie in (1,2]");
        if (!noise2_) v.push_back("multi-noise model requires two noises");
    }
    return v;
}

void ShortRateModel::ensure_admissible() const {
    const auto violations = admissibility_violations();
    if (violations.empty()) return;
    std::string msg = "model inadmissible:";
    for (const auto& s : violations) msg += " [" + s + "]";
    throw ModelError(msg);
}

double ShortRateModel::diffusion_value(double x, int which) const {
    const double xp = std::max(x, 0.0);
    if (const auto* p = std::get_if<PowerLawDiffusion>(&diffusion_)) {
        if (p->c == 0.0) return 0.0;
        return pow_pos(p->c, 1.0 / p->alpha) * pow_pos(xp, p->exponent);
    }
    if (const auto* cst = std::get_if<ConstantDiffusion>(&diffusion_)) return cst->sigma;
    const auto& ms = std::get<MultiStableDiffusion>(diffusion_);
    return which == 0 ? pow_pos(xp, 1.0 / ms.alpha) : pow_pos(xp, 1.0 / ms.beta);
}

std::string ShortRateModel::tag() const {
    std::ostringstream out;
    if (const auto* p = std::get_if<PowerLawDiffusion>(&diffusion_)) {
        out << "power(a=" << a_ << ",b=" << b_ << ",c=" << p->c << ",alpha=" << p->alpha;
        if (p->exponent != 1.0 / p->alpha) out << ",exponent=" << p->exponent;
        out << ")";
    } else if (const auto* cst = std::get_if<ConstantDiffusion>(&diffusion_)) {
        out << "constant(a=" << a_ << ",b=" << b_ << ",sigma=" << cst->sigma << ","
            << noise_.tag() << ")";
    } else {
        const auto& ms = std::get<MultiStableDiffusion>(diffusion_);
        out << "multi(a=" << a_ << ",b=" << b_ << ",alpha=" << ms.alpha
            << ",beta=" << ms.beta << ")";
    }
    out << "/x0=" << x0_;
    return out.str();
}

nlohmann::json ShortRateModel::to_json() const {
    nlohmann::json j;
    j["a"] = a_;
    j["b"] = b_;
    j["x0"] = x0_;
    nlohmann::json d;
    if (const auto* p = std::get_if<PowerLawDiffusion>(&diffusion_)) {
        d["kind"] = "power";
        d["c"] = p->c;
        d["alpha"] = p->alpha;
        d["exponent"] = p->exponent;
    } else if (const auto* cst = std::get_if<ConstantDiffusion>(&diffusion_)) {
        d["kind"] = "constant";
        d["sigma"] = cst->sigma;
        j["noise"] = noise_.to_json();
    } else {
        const auto& ms = std::get<MultiStableDiffusion>(diffusion_);
        d["kind"] = "multi";
        d["alpha"] = ms.alpha;
        d["beta"] = ms.beta;
    }
    j["diffusion"] = d;
    return j;
}

ShortRateModel ShortRateModel::from_json(const nlohmann::json& j) {
    const std::string ctx = "model";
    jsonio::reject_unknown(j, {"a", "b", "x0", "diffusion", "noise"}, ctx);
    const double a = jsonio::number(j, "a", ctx);
    const double b = jsonio::number(j, "b", ctx);
    const double x0 = jsonio::number(j, "x0", ctx);
    const nlohmann::json& d = jsonio::require(j, "diffusion", ctx);
    const std::string dctx = "model.diffusion";
    const std::string kind = jsonio::text(d, "kind", dctx);
    if (kind == "power") {
        jsonio::reject_unknown(d, {"kind", "c", "alpha", "exponent"}, dctx);
        const double c = jsonio::number(d, "c", dctx);
        const double alpha = jsonio::number(d, "alpha", dctx);
        if (!(alpha > 1.0 && alpha <= 2.0))
            throw SchemaError(dctx + ": alpha must lie in (1,2]");
        if (j.contains("noise"))
            throw SchemaError(ctx + ": power-law models derive their noise; drop 'noise'");
        ShortRateModel m = power_law(a, b, c, alpha, x0);
        if (d.contains("exponent"))
            m = m.with_diffusion_exponent(jsonio::number(d, "exponent", dctx));
        return m;
    }
    if (kind == "constant") {
        jsonio::reject_unknown(d, {"kind", "sigma"}, dctx);
        const double sigma = jsonio::number(d, "sigma", dctx);
        const nlohmann::json& n = jsonio::require(j, "noise", ctx);
        return constant_vol(a, b, sigma, levy::LevyModel::from_json(n), x0);
    }
    if (kind == "multi") {
        jsonio::reject_unknown(d, {"kind", "alpha", "beta"}, dctx);
        if (j.contains("noise"))
            throw SchemaError(ctx + ": multi-noise models derive their noises; drop 'noise'");
        const double alpha = jsonio::number(d, "alpha", dctx);
        const double beta = jsonio::number(d, "beta", dctx);
        if (!(alpha > 1.0 && alpha <= 2.0 && beta > 1.0 && beta <= 2.0))
            throw SchemaError(dctx + ": indexes must lie in (1,2]");
        return multi_stable(a, b, alpha, beta, x0);
    }
    throw SchemaError(dctx + ": unknown kind '" + kind + "'");
}

PathEnsemble::PathEnsemble(Eigen::ArrayXd times, Eigen::ArrayXXd rates,
                           Eigen::ArrayXXd integrated, std::vector<std::uint64_t> seeds,
                           std::string model_tag, ClampStats clamps)
    : times_(std::move(times)),
      rates_(std::move(rates)),
      integrated_(std::move(integrated)),
      seeds_(std::move(seeds)),
      model_tag_(std::move(model_tag)),
      clamps_(clamps) {
    if (rates_.rows() != integrated_.rows() || rates_.cols() != integrated_.cols() ||
        rates_.cols() != times_.size() ||
        static_cast<Eigen::Index>(seeds_.size()) != rates_.rows())
        throw GridError("PathEnsemble: inconsistent array shapes");
}

Eigen::Index PathEnsemble::time_index(double t) const {
    const double tol = 1e-12 * std::max(1.0, std::abs(times_[times_.size() - 1]));
    for (Eigen::Index j = 0; j < times_.size(); ++j)
        if (std::abs(times_[j] - t) <= tol) return j;
    std::ostringstream msg;
    msg << "time " << t << " is not on the stored grid";
    throw GridError(msg.str());
}

void PathEnsemble::write_csv(std::ostream& rates_out, std::ostream& integrated_out) const {
    char buf[40];
    auto header = [&](std::ostream& out) {
        out << "path,seed";
        for (Eigen::Index j = 0; j < times_.size(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", times_[j]);
            out << ",t=" << buf;
        }
        out << '\n';
    };
    header(rates_out);
    header(integrated_out);
    for (Eigen::Index i = 0; i < n_paths(); ++i) {
        append_csv_row(rates_out, i, seeds_[i], rates_, i);
        append_csv_row(integrated_out, i, seeds_[i], integrated_, i);
    }
}

void PathEnsemble::write_binary(std::ostream& out) const {
    // Layout (little-endian host): magic "ATSENS01", u64 n_paths, u64 n_times,
    // f64 times[n_times], f64 rates[path][time], f64 integrated[path][time],
    // u64 seeds[n_paths].
    out.write("ATSENS01", 8);
    const std::uint64_t np = static_cast<std::uint64_t>(n_paths());
    const std::uint64_t nt = static_cast<std::uint64_t>(n_times());
    out.write(reinterpret_cast<const char*>(&np), 8);
    out.write(reinterpret_cast<const char*>(&nt), 8);
    for (Eigen::Index j = 0; j < times_.size(); ++j) {
        const double t = times_[j];
        out.write(reinterpret_cast<const char*>(&t), 8);
    }
    auto write_matrix = [&](const Eigen::ArrayXXd& m) {
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                const double x = m(i, j);
                out.write(reinterpret_cast<const char*>(&x), 8);
            }
    };
    write_matrix(rates_);
    write_matrix(integrated_);
    for (std::uint64_t s : seeds_) out.write(reinterpret_cast<const char*>(&s), 8);
}

PathEnsemble simulate(const ShortRateModel& model, double horizon, Eigen::Index steps,
                      Eigen::Index n_paths, std::uint64_t seed,
                      const SimulateOptions& options) {
    if (horizon <= 0.0) throw DomainError("simulate: horizon must be > 0");
    if (steps < 1) throw DomainError("simulate: steps must be >= 1");
    if (n_paths < 1) throw DomainError("simulate: n_paths must be >= 1");
    model.ensure_admissible();

    const double dt = horizon / static_cast<double>(steps);

    std::vector<Eigen::Index> stored = options.store_steps;
    if (stored.empty()) {
        stored.resize(static_cast<std::size_t>(steps) + 1);
        for (Eigen::Index k = 0; k <= steps; ++k) stored[static_cast<std::size_t>(k)] = k;
    } else {
        std::sort(stored.begin(), stored.end());
        stored.erase(std::unique(stored.begin(), stored.end()), stored.end());
        if (stored.front() != 0) stored.insert(stored.begin(), 0);
        if (stored.back() > steps)
            throw DomainError("simulate: stored step index beyond the last step");
    }

    const Eigen::Index n_stored = static_cast<Eigen::Index>(stored.size());
    Eigen::ArrayXd times(n_stored);
    for (Eigen::Index j = 0; j < n_stored; ++j)
        times[j] = static_cast<double>(stored[static_cast<std::size_t>(j)]) * dt;

    Eigen::ArrayXXd rates(n_paths, n_stored);
    Eigen::ArrayXXd integrated(n_paths, n_stored);
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(n_paths));
    for (Eigen::Index i = 0; i < n_paths; ++i)
        seeds[static_cast<std::size_t>(i)] = rng::stream_seed(seed, static_cast<std::uint64_t>(i));

    const levy::IncrementSampler sampler(model.noise(), dt);
    std::optional<levy::IncrementSampler> sampler2;
    if (model.second_noise()) sampler2.emplace(*model.second_noise(), dt);

    const double a = model.drift_a();
    const double b = model.drift_b();
    const double x0 = model.x0();

    // Diffusion dispatch hoisted out of the stepping loop.
    const auto* power = std::get_if<PowerLawDiffusion>(&model.diffusion());
    const auto* constant = std::get_if<ConstantDiffusion>(&model.diffusion());
    const auto* multi = std::get_if<MultiStableDiffusion>(&model.diffusion());
    const double power_coef = power && power->c > 0.0 ? std::pow(power->c, 1.0 / power->alpha) : 0.0;
    const double power_expo = power ? power->exponent : 0.0;
    const double sigma = constant ? constant->sigma : 0.0;
    const double multi_expo1 = multi ? 1.0 / multi->alpha : 0.0;
    const double multi_expo2 = multi ? 1.0 / multi->beta : 0.0;

    auto run_range = [&](Eigen::Index lo, Eigen::Index hi, ClampStats& stats) {
        for (Eigen::Index i = lo; i < hi; ++i) {
            rng::Engine g = rng::make_engine(seeds[static_cast<std::size_t>(i)]);
            double r = x0;
            double acc = 0.0;  // trapezoidal integral of R
            std::size_t next = 0;
            if (stored[next] == 0) {
                rates(i, 0) = r;
                integrated(i, 0) = acc;
                ++next;
            }
            for (Eigen::Index n = 0; n < steps; ++n) {
                double dz;
                if (power) {
                    dz = sampler(g) * (power_coef == 0.0 ? 0.0 : power_coef * pow_pos(r, power_expo));
                } else if (constant) {
                    dz = sampler(g) * sigma;
                } else {
                    dz = sampler(g) * pow_pos(r, multi_expo1) +
                         (*sampler2)(g)*pow_pos(r, multi_expo2);
                }
                double r_next = r + (a * r + b) * dt + dz;
                if (r_next < 0.0) {
                    ++stats.clamped;
                    stats.worst_excursion = std::max(stats.worst_excursion, -r_next);
                    r_next = 0.0;
                }
                acc += 0.5 * dt * (r + r_next);
                r = r_next;
                if (next < stored.size() && stored[next] == n + 1) {
                    rates(i, static_cast<Eigen::Index>(next)) = r;
                    integrated(i, static_cast<Eigen::Index>(next)) = acc;
                    ++next;
                }
            }
            stats.total_steps += steps;
        }
    };

    ClampStats clamps;
    const int threads = std::max(1, options.threads);
    if (threads == 1 || n_paths < 2 * threads) {
        run_range(0, n_paths, clamps);
    } else {
        std::vector<std::thread> pool;
        std::vector<ClampStats> stats(static_cast<std::size_t>(threads));
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
        const Eigen::Index chunk = (n_paths + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const Eigen::Index lo = t * chunk;
            const Eigen::Index hi = std::min<Eigen::Index>(lo + chunk, n_paths);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi, t]() {
                try {
                    run_range(lo, hi, stats[static_cast<std::size_t>(t)]);
                } catch (...) {
                    errors[static_cast<std::size_t>(t)] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
        for (const auto& s : stats) {
            clamps.clamped += s.clamped;
            clamps.total_steps += s.total_steps;
            clamps.worst_excursion = std::max(clamps.worst_excursion, s.worst_excursion);
        }
    }

    return PathEnsemble(std::move(times), std::move(rates), std::move(integrated),
                        std::move(seeds), model.tag(), clamps);
}

ClampReport clamp_report(const PathEnsemble& ensemble) {
    const ClampStats& s = ensemble.clamp_stats();
    ClampReport r;
    r.clamped = s.clamped;
    r.total_steps = s.total_steps;
    r.worst_excursion = s.worst_excursion;
    r.clamp_fraction =
        s.total_steps > 0 ? static_cast<double>(s.clamped) / static_cast<double>(s.total_steps)
                          : 0.0;
    return r;
}

}  // namespace ats::sde
