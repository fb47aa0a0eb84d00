#include "ats/curves.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "ats/errors.hpp"
#include "ats/ode.hpp"
#include "ats/quadrature.hpp"

namespace ats::curves {

namespace {

// B^p with the zero branch pinned to 0; continuous at B=0 since p > 1 callers.
double pow_pos(double x, double p) { return x <= 0.0 ? 0.0 : std::exp(p * std::log(x)); }

void check_grid(const Grid& grid) {
    if (grid.size() < 2) throw DomainError("curve grid needs at least two nodes");
    if (grid[0] != 0.0) throw DomainError("curve grid must start at 0");
    for (Eigen::Index i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw DomainError("curve grid must be strictly increasing");
}

std::vector<double> to_nodes(const Grid& grid) {
    return std::vector<double>(grid.data(), grid.data() + grid.size());
}

// Shared driver: integrates (B, A) with the given B-slope and tabulates
// curves plus derivatives straight from the right-hand side.
template <class BSlope>
CurvePair solve_system(double b, const BSlope& b_slope, const Grid& grid,
                       std::string tag) {
    const Eigen::Index n = grid.size();
    Grid B(n), A(n), Bp(n), Ap(n);
    auto rhs = [&](double, const Eigen::Array<double, 2, 1>& y,
                   Eigen::Array<double, 2, 1>& dy) {
        dy[0] = b_slope(y[0]);
        dy[1] = b * y[0];
    };
    ode::Options opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-13;
    Eigen::Array<double, 2, 1> y0{0.0, 0.0};
    ode::integrate_grid<double, 2>(
        rhs, y0, to_nodes(grid), opt,
        [&](Eigen::Index k, double, const Eigen::Array<double, 2, 1>& y,
            const Eigen::Array<double, 2, 1>& dy) {
            B[k] = y[0];
            A[k] = y[1];
            Bp[k] = dy[0];
            Ap[k] = dy[1];
        });
    return CurvePair(grid, std::move(A), std::move(B), std::move(Ap), std::move(Bp),
                     std::move(tag));
}

}  // namespace

Grid uniform_grid(double t_max, Eigen::Index nodes) {
    if (t_max <= 0.0) throw DomainError("uniform_grid: t_max must be > 0");
    if (nodes < 2) throw DomainError("uniform_grid: need at least two nodes");
    Grid g(nodes);
    for (Eigen::Index i = 0; i < nodes; ++i)
        g[i] = t_max * static_cast<double>(i) / static_cast<double>(nodes - 1);
    return g;
}

CurvePair::CurvePair(Grid grid, Grid A, Grid B, Grid A_prime, Grid B_prime,
                     std::string model_tag)
    : grid_(std::move(grid)),
      A_(std::move(A)),
      B_(std::move(B)),
      A_prime_(std::move(A_prime)),
      B_prime_(std::move(B_prime)),
      model_tag_(std::move(model_tag)) {
    check_grid(grid_);
    const Eigen::Index n = grid_.size();
    if (A_.size() != n || B_.size() != n || A_prime_.size() != n || B_prime_.size() != n)
        throw DomainError("CurvePair: array sizes do not match the grid");
}

CurvePoint CurvePair::at(double v) const {
    const double vmax = max_maturity();
    const double slack = 1e-12 * std::max(1.0, vmax);
    if (v < -slack || v > vmax + slack) {
        std::ostringstream msg;
        msg << "maturity " << v << " outside the curve grid [0," << vmax << "]";
        throw RangeError(msg.str());
    }
    v = std::clamp(v, 0.0, vmax);

    const double* begin = grid_.data();
    const double* end = begin + grid_.size();
    Eigen::Index k = std::upper_bound(begin, end, v) - begin;
    if (k > 0) --k;
    if (k >= grid_.size() - 1) k = grid_.size() - 2;

    if (v == grid_[k]) return {A_[k], B_[k], A_prime_[k], B_prime_[k]};
    if (v == grid_[k + 1]) return {A_[k + 1], B_[k + 1], A_prime_[k + 1], B_prime_[k + 1]};

    const double h = grid_[k + 1] - grid_[k];
    const double s = (v - grid_[k]) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    // d/dv of the Hermite basis (chain rule through s).
    const double d00 = (6 * s2 - 6 * s) / h;
    const double d10 = (3 * s2 - 4 * s + 1);
    const double d01 = (-6 * s2 + 6 * s) / h;
    const double d11 = (3 * s2 - 2 * s);

    CurvePoint p;
    p.A = h00 * A_[k] + h10 * h * A_prime_[k] + h01 * A_[k + 1] + h11 * h * A_prime_[k + 1];
    p.B = h00 * B_[k] + h10 * h * B_prime_[k] + h01 * B_[k + 1] + h11 * h * B_prime_[k + 1];
    p.A_prime = d00 * A_[k] + d10 * A_prime_[k] + d01 * A_[k + 1] + d11 * A_prime_[k + 1];
    p.B_prime = d00 * B_[k] + d10 * B_prime_[k] + d01 * B_[k + 1] + d11 * B_prime_[k + 1];
    return p;
}

void CurvePair::write_csv(std::ostream& out) const {
    char buf[4][32];
    out << "v,A,B,A_prime,B_prime\n";
    for (Eigen::Index i = 0; i < grid_.size(); ++i) {
        char vbuf[32];
        std::snprintf(vbuf, sizeof(vbuf), "%.10g", grid_[i]);
        std::snprintf(buf[0], sizeof(buf[0]), "%.10g", A_[i]);
        std::snprintf(buf[1], sizeof(buf[1]), "%.10g", B_[i]);
        std::snprintf(buf[2], sizeof(buf[2]), "%.10g", A_prime_[i]);
        std::snprintf(buf[3], sizeof(buf[3]), "%.10g", B_prime_[i]);
        out << vbuf << ',' << buf[0] << ',' << buf[1] << ',' << buf[2] << ',' << buf[3]
            << '\n';
    }
}

nlohmann::json CurvePair::to_json() const {
    nlohmann::json j;
    j["model"] = model_tag_;
    auto dump = [](const Grid& g) {
        return std::vector<double>(g.data(), g.data() + g.size());
    };
    j["v"] = dump(grid_);
    j["A"] = dump(A_);
    j["B"] = dump(B_);
    j["A_prime"] = dump(A_prime_);
    j["B_prime"] = dump(B_prime_);
    return j;
}

CurvePair solve_stable_riccati(double a, double b, double c, double alpha,
                               const Grid& grid) {
    check_grid(grid);
    if (b < 0.0) throw DomainError("solve_stable_riccati: b must be >= 0");
    if (c < 0.0) throw DomainError("solve_stable_riccati: c must be >= 0");
    const double c_alpha = levy::stable_coefficient(alpha);
    const double k = c * c_alpha;
    std::ostringstream tag;
    tag << "riccati(a=" << a << ",b=" << b << ",c=" << c << ",alpha=" << alpha << ")";
    return solve_system(
        b, [a, k, alpha](double B) { return -k * pow_pos(B, alpha) + a * B + 1.0; }, grid,
        tag.str());
}

CurvePair solve_constant_vol_curves(double a, double b, double sigma,
                                    const levy::LevyModel& noise, const Grid& grid) {
    check_grid(grid);
    if (sigma <= 0.0) throw DomainError("solve_constant_vol_curves: sigma must be > 0");
    if (noise.kind() != levy::Kind::CompoundPoissonMartingale)
        throw ModelError("solve_constant_vol_curves: noise must be compound Poisson");
    const double mass = levy::mean_jump_mass(noise);
    if (b < sigma * mass) {
        std::ostringstream msg;
        msg << "model inadmissible: b = " << b << " is below sigma*mean jump mass = "
            << sigma * mass;
        throw ModelError(msg.str());
    }

    const Eigen::Index n = grid.size();
    Grid B(n), Bp(n), A(n), Ap(n);
    auto B_of = [a](double v) { return a == 0.0 ? v : std::expm1(a * v) / a; };
    for (Eigen::Index i = 0; i < n; ++i) {
        B[i] = B_of(grid[i]);
        Bp[i] = a * B[i] + 1.0;
    }
    auto A_slope = [&](double v) {
        const double Bv = B_of(v);
        return Bv * (b - sigma * mass) + levy::one_minus_exp_integral(noise, sigma * Bv);
    };
    // A by quadrature of A'; the RHS depends on v only.
    auto rhs = [&](double v, const Eigen::Array<double, 1, 1>&,
                   Eigen::Array<double, 1, 1>& dy) { dy[0] = A_slope(v); };
    ode::Options opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-13;
    Eigen::Array<double, 1, 1> y0{0.0};
    ode::integrate_grid<double, 1>(
        rhs, y0, to_nodes(grid), opt,
        [&](Eigen::Index k, double, const Eigen::Array<double, 1, 1>& y,
            const Eigen::Array<double, 1, 1>& dy) {
            A[k] = y[0];
            Ap[k] = dy[0];
        });

    std::ostringstream tag;
    tag << "constant_vol(a=" << a << ",b=" << b << ",sigma=" << sigma << ","
        << noise.tag() << ")";
    return CurvePair(grid, std::move(A), std::move(B), std::move(Ap), std::move(Bp),
                     tag.str());
}

CurvePair solve_multi_noise_riccati(double a, double b, double alpha, double beta,
                                    const Grid& grid, double weight_alpha,
                                    double weight_beta) {
    check_grid(grid);
    if (b < 0.0) throw DomainError("solve_multi_noise_riccati: b must be >= 0");
    if (weight_alpha < 0.0 || weight_beta < 0.0)
        throw DomainError("solve_multi_noise_riccati: weights must be >= 0");
    const double ka = weight_alpha * levy::stable_coefficient(alpha);
    const double kb = weight_beta * levy::stable_coefficient(beta);
    std::ostringstream tag;
    tag << "multi_riccati(a=" << a << ",b=" << b << ",alpha=" << alpha
        << ",beta=" << beta << ")";
    return solve_system(
        b,
        [a, ka, kb, alpha, beta](double B) {
            return -ka * pow_pos(B, alpha) - kb * pow_pos(B, beta) + a * B + 1.0;
        },
        grid, tag.str());
}

std::vector<std::string> invariant_violations(const CurvePair& pair) {
    std::vector<std::string> out;
    auto note = [&](Eigen::Index i, const std::string& what) {
        std::ostringstream msg;
        msg << what << " at v=" << pair.grid()[i];
        out.push_back(msg.str());
    };
    if (pair.A()[0] != 0.0) out.push_back("A(0) != 0");
    if (pair.B()[0] != 0.0) out.push_back("B(0) != 0");
    if (std::abs(pair.A_prime()[0]) > 1e-12) out.push_back("A'(0) != 0");
    if (std::abs(pair.B_prime()[0] - 1.0) > 1e-12) out.push_back("B'(0) != 1");
    for (Eigen::Index i = 0; i < pair.grid().size(); ++i) {
        // Monotonicity up to roundoff; near an equilibrium the true increment
        // between nodes drops below one ulp.
        const double slack =
            1e-12 * std::max({1.0, std::abs(pair.A()[i]), std::abs(pair.B()[i])});
        if (pair.A()[i] < -slack) note(i, "A < 0");
        if (pair.B()[i] < -slack) note(i, "B < 0");
        if (i > 0 && pair.A()[i] < pair.A()[i - 1] - slack) note(i, "A decreasing");
        if (i > 0 && pair.B()[i] < pair.B()[i - 1] - slack) note(i, "B decreasing");
    }
    return out;
}

}  // namespace ats::curves
