#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "xva/models.hpp"
#include "xva/parallel.hpp"

namespace xva {

namespace {

constexpr double kAMin = 1e-4, kAMax = 2.0;
constexpr double kSMin = 1e-5, kSMax = 0.2;
constexpr double kRhoMax = 0.99;

using Vec5 = Eigen::Matrix<double, 5, 1>;

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

struct Bounds {
    double rho_lo = -kRhoMax, rho_hi = kRhoMax;
};

// Unconstrained coordinates -> bounded parameters.
G2Params decode(const Vec5& u, const Bounds& b) {
    G2Params p;
    p.a1 = kAMin + (kAMax - kAMin) * logistic(u[0]);
    p.a2 = kAMin + (kAMax - kAMin) * logistic(u[1]);
    p.sigma1 = kSMin + (kSMax - kSMin) * logistic(u[2]);
    p.sigma2 = kSMin + (kSMax - kSMin) * logistic(u[3]);
    p.rho = b.rho_lo + (b.rho_hi - b.rho_lo) * logistic(u[4]);
    return p;
}

Vec5 encode(const G2Params& p, const Bounds& b) {
    auto inv = [](double x, double lo, double hi) {
        const double w = std::clamp((x - lo) / (hi - lo), 1e-9, 1.0 - 1e-9);
        return logit(w);
    };
    Vec5 u;
    u << inv(p.a1, kAMin, kAMax), inv(p.a2, kAMin, kAMax), inv(p.sigma1, kSMin, kSMax),
        inv(p.sigma2, kSMin, kSMax), inv(p.rho, b.rho_lo, b.rho_hi);
    return u;
}

struct Instrument {
    SwaptionSpec spec;
    SwapQuote quote;
    double market_price;
    double vega;
    double market_vol;
};

struct Problem {
    const YieldCurve& curve;
    Bounds bounds;
    std::vector<Instrument> instruments;

    Eigen::VectorXd residuals(const G2Params& p) const {
        const G2Model model(p, curve);
        Eigen::VectorXd r(instruments.size());
        for (std::size_t k = 0; k < instruments.size(); ++k) {
            const auto& ins = instruments[k];
            const double price = g2_swaption(model, ins.spec, ins.quote.forward, 1);
            r[static_cast<Eigen::Index>(k)] = (price - ins.market_price) / ins.vega;
        }
        return r;
    }
};

struct LmResult {
    G2Params params;
    double cost;
    int iterations;
    bool converged;
};

LmResult levenberg_marquardt(const Problem& prob, const G2Params& start, int max_iter) {
    Vec5 u = encode(start, prob.bounds);
    Eigen::VectorXd r = prob.residuals(decode(u, prob.bounds));
    double cost = 0.5 * r.squaredNorm();
    if (!std::isfinite(cost)) return {decode(u, prob.bounds), cost, 0, false};
    double lambda = 1e-3;
    bool converged = false;
    int it = 0;
    const auto m = r.size();
    for (; it < max_iter; ++it) {
        Eigen::MatrixXd J(m, 5);
        for (int j = 0; j < 5; ++j) {
            Vec5 up = u;
            const double h = 1e-6 * std::max(1.0, std::abs(u[j]));
            up[j] += h;
            J.col(j) = (prob.residuals(decode(up, prob.bounds)) - r) / h;
        }
        const Eigen::Matrix<double, 5, 5> JtJ = J.transpose() * J;
        const Vec5 g = J.transpose() * r;
        if (g.lpNorm<Eigen::Infinity>() < 1e-14) {
            converged = true;
            break;
        }
        bool improved = false;
        for (int attempt = 0; attempt < 12; ++attempt) {
            Eigen::Matrix<double, 5, 5> A = JtJ;
            for (int d = 0; d < 5; ++d) A(d, d) += lambda * std::max(JtJ(d, d), 1e-12);
            const Vec5 step = A.ldlt().solve(-g);
            if (!step.allFinite()) {
                lambda *= 4.0;
                continue;
            }
            const Vec5 trial = u + step;
            const Eigen::VectorXd rt = prob.residuals(decode(trial, prob.bounds));
            const double ct = 0.5 * rt.squaredNorm();
            if (std::isfinite(ct) && ct < cost) {
                const double rel = (cost - ct) / std::max(cost, 1e-300);
                u = trial;
                r = rt;
                cost = ct;
                lambda = std::max(lambda / 3.0, 1e-12);
                improved = true;
                if (rel < 1e-10 || step.norm() < 1e-10) converged = true;
                break;
            }
            lambda *= 4.0;
        }
        if (!improved || converged) {
            converged = true;
            break;
        }
    }
    return {decode(u, prob.bounds), cost, it, converged};
}

}  // namespace

CalibrationReport calibrate_g2(const SwaptionVolSurface& surface, const YieldCurve& curve,
                               const CalibrationOptions& options) {
    surface.validate();
    if (!(options.rho_min >= -kRhoMax && options.rho_min < options.rho_max && options.rho_max <= kRhoMax)) {
        throw InputError("calibration correlation bounds must satisfy -0.99 <= min < max <= 0.99");
    }
    Problem prob{curve, {options.rho_min, options.rho_max}, {}};
    for (std::size_t i = 0; i < surface.expiries.size(); ++i) {
        for (std::size_t j = 0; j < surface.tenors.size(); ++j) {
            Instrument ins;
            ins.spec = {surface.expiries[i], surface.tenors[j]};
            ins.quote = swap_quote(curve, ins.spec);
            ins.market_vol = surface.vols[i][j];
            ins.market_price = black_payer(ins.quote, ins.quote.forward, ins.market_vol, ins.spec.expiry);
            ins.vega = black_atm_vega(ins.quote, ins.market_vol, ins.spec.expiry);
            // A vanishing vega leaves the quote without information on the model.
            if (!(std::isfinite(ins.market_price) && ins.vega > 1e-12 * ins.quote.annuity)) {
                std::ostringstream msg;
                msg << "swaption " << ins.spec.expiry << "y x " << ins.spec.tenor
                    << "y has no usable vega at the quoted volatility";
                throw CalibrationError(msg.str());
            }
            prob.instruments.push_back(ins);
        }
    }

    std::vector<G2Params> starts = options.starts;
    if (starts.empty()) {
        starts = {{0.5, 0.05, 0.010, 0.008, -0.7},
                  {1.0, 0.10, 0.020, 0.012, -0.9},
                  {0.2, 0.02, 0.008, 0.006, -0.3},
                  {0.05, 0.8, 0.006, 0.015, 0.2}};
    }
    std::vector<LmResult> results(starts.size());
    parallel_tasks(starts.size(), options.threads, [&](std::size_t k) {
        results[k] = levenberg_marquardt(prob, starts[k], options.max_iterations);
    });
    std::size_t best = 0;
    for (std::size_t k = 1; k < results.size(); ++k) {
        if (results[k].cost < results[best].cost) best = k;
    }
    if (!std::isfinite(results[best].cost)) throw CalibrationError("no starting point gives a finite fit error");

    CalibrationReport rep;
    rep.params = results[best].params;
    rep.iterations = results[best].iterations;
    rep.converged = results[best].converged;
    const G2Model model(rep.params, curve);
    double sq = 0.0;
    for (const auto& ins : prob.instruments) {
        const double price = g2_swaption(model, ins.spec, ins.quote.forward, 1);
        double vol = black_atm_implied_vol(ins.quote, price, ins.spec.expiry);
        if (!std::isfinite(vol)) vol = 0.0;
        rep.model_vols.push_back(vol);
        const double err = vol - ins.market_vol;
        sq += err * err;
        rep.max_abs_error = std::max(rep.max_abs_error, std::abs(err));
    }
    rep.rmse_vol = std::sqrt(sq / static_cast<double>(prob.instruments.size()));
    return rep;
}

}  // namespace xva
