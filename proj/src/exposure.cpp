#include "xva/exposure.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/roots.hpp>

#include "xva/normal.hpp"
#include "xva/parallel.hpp"

namespace xva {

namespace {
constexpr double kTol = 1e-9;

std::vector<double> regular_dates(double maturity, double period) {
    std::vector<double> out;
    const int n = static_cast<int>(std::lround(maturity / period));
    for (int k = 1; k <= n; ++k) out.push_back(k == n ? maturity : k * period);
    return out;
}
}  // namespace

Direction parse_direction(const std::string& s) {
    if (s == "payer") return Direction::Payer;
    if (s == "receiver") return Direction::Receiver;
    throw InputError("direction must be 'payer' or 'receiver', got '" + s + "'");
}

std::string to_string(Direction d) { return d == Direction::Payer ? "payer" : "receiver"; }

void TradeSpec::validate() const {
    if (!(maturity > 0.0)) throw InputError("trade maturity must be positive");
    if (!(fixed_period > 0.0) || !(float_period > 0.0)) throw InputError("payment periods must be positive");
    auto whole = [this](double period) {
        const double n = maturity / period;
        return std::abs(n - std::round(n)) < 1e-9;
    };
    if (!whole(fixed_period) || !whole(float_period)) {
        throw InputError("payment periods must divide the maturity");
    }
    if (!std::isfinite(fixed_rate)) throw InputError("fixed rate must be finite");
}

std::vector<double> TradeSpec::fixed_dates() const { return regular_dates(maturity, fixed_period); }
std::vector<double> TradeSpec::float_dates() const { return regular_dates(maturity, float_period); }

std::vector<double> TradeSpec::schedule_dates() const {
    std::vector<double> out = fixed_dates();
    for (double t : float_dates()) {
        out.push_back(t);
        out.push_back(t - float_period);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return std::abs(a - b) < kTol; }),
              out.end());
    return out;
}

SwapValuer::SwapValuer(const G2Model& model, TradeSpec trade)
    : model_(model), trade_(trade), fixed_pay_(trade.fixed_dates()), float_pay_(trade.float_dates()) {
    trade_.validate();
}

double SwapValuer::fixing(std::size_t k, double x1, double x2) const {
    return model_.zcb(reset_time(k), pay_time(k), x1, x2);
}

std::size_t SwapValuer::current_period(double t) const {
    for (std::size_t k = 0; k < float_pay_.size(); ++k) {
        if (reset_time(k) <= t + kTol && t + kTol < float_pay_[k]) return k;
    }
    return npos;
}

SwapValuer::Slice SwapValuer::slice(double t) const {
    const auto& p = model_.params();
    Slice out;
    auto add = [&](double T, double amount, double per_fixing) {
        const double tau = T - t;
        out.flows.push_back({amount, per_fixing, model_.log_a(t, T), g2_b(p.a1, tau), g2_b(p.a2, tau)});
    };
    const double s = trade_.sign() * trade_.notional;
    double prev = 0.0;
    for (double T : fixed_pay_) {
        if (T > t + kTol) add(T, s * trade_.fixed_rate * (T - prev), 0.0);
        prev = T;
    }
    const double end = float_pay_.back();
    if (end > t + kTol) {
        // Float leg: current period at its fixing, later periods telescope.
        const std::size_t k = current_period(t);
        if (k != npos) {
            // On a reset date the period fixes at the current state: worth par.
            if (std::abs(t - reset_time(k)) <= kTol) add(t, -s, 0.0);
            else add(float_pay_[k], 0.0, -s);
        } else {
            add(reset_time(0), -s, 0.0);
        }
        add(end, s, 0.0);
    }
    return out;
}

SwapValuer::Value SwapValuer::value(const Slice& s, double x1, double x2, double current_fixing) {
    Value v{0.0, 0.0, 0.0};
    for (const auto& f : s.flows) {
        const double cf = f.per_fixing == 0.0 ? f.amount : f.amount + f.per_fixing / current_fixing;
        const double P = std::exp(f.log_a - f.b1 * x1 - f.b2 * x2);
        v.pv += cf * P;
        v.d_x1 -= cf * f.b1 * P;
        v.d_x2 -= cf * f.b2 * P;
    }
    return v;
}

SwapValuer::Value SwapValuer::value(double t, double x1, double x2, double current_fixing) const {
    return value(slice(t), x1, x2, current_fixing);
}

std::vector<std::pair<double, double>> SwapValuer::flows_between(double t0, double t1,
                                                                 const std::vector<double>& fixings) const {
    std::vector<std::pair<double, double>> out;
    const double s = trade_.sign() * trade_.notional;
    double prev = 0.0;
    for (double T : fixed_pay_) {
        if (T > t0 + kTol && T <= t1 + kTol) out.emplace_back(T, s * trade_.fixed_rate * (T - prev));
        prev = T;
    }
    for (std::size_t k = 0; k < float_pay_.size(); ++k) {
        const double T = float_pay_[k];
        if (T > t0 + kTol && T <= t1 + kTol) out.emplace_back(T, -s * (1.0 / fixings[k] - 1.0));
    }
    return out;
}

double par_rate(const G2Model& model, TradeSpec trade) {
    trade.direction = Direction::Receiver;
    auto f = [&](double k) {
        trade.fixed_rate = k;
        return SwapValuer(model, trade).value(0.0, 0.0, 0.0, 1.0).pv;
    };
    // Receiver value is increasing and linear in the fixed rate.
    double lo = -0.5, hi = 0.5;
    std::uintmax_t iters = 100;
    auto tol = [](double a, double b) { return std::abs(a - b) <= 1e-16; };
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
    const double fa = std::abs(f(a)), fb = std::abs(f(b));
    return fa <= fb ? a : b;
}

std::vector<double> path_fixings(const SwapValuer& swap, const PathSet& paths, int threads) {
    const std::size_t nf = swap.n_float();
    std::vector<std::size_t> idx(nf);
    for (std::size_t k = 0; k < nf; ++k) idx[k] = paths.grid.index_of(swap.reset_time(k));
    std::vector<double> out(paths.n_paths * nf);
    parallel_chunks(paths.n_paths, threads, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p) {
            for (std::size_t k = 0; k < nf; ++k) {
                const std::size_t a = paths.at(idx[k], p);
                out[p * nf + k] = swap.fixing(k, paths.x1[a], paths.x2[a]);
            }
        }
    });
    return out;
}

double exposure(const SwapValuer& swap, const PathSet& paths, const std::vector<double>& fixings,
                std::size_t i, std::size_t p) {
    const double t = paths.grid.times[i];
    const std::size_t k = swap.current_period(t);
    const double fix = k == SwapValuer::npos ? 1.0 : fixings[p * swap.n_float() + k];
    const std::size_t a = paths.at(i, p);
    return swap.value(t, paths.x1[a], paths.x2[a], fix).pv;
}

double exposure_delayed(const SwapValuer& swap, const PathSet& paths, const std::vector<double>& fixings,
                        double t, double delta, std::size_t p) {
    const auto& g = paths.grid;
    const std::size_t i0 = g.index_of(t);
    if (delta <= 0.0) return exposure(swap, paths, fixings, i0, p);
    const std::size_t i1 = g.index_of(t + delta);
    const double e0 = paths.int_e[paths.at(i0, p)];
    const std::vector<double> fix(fixings.begin() + static_cast<std::ptrdiff_t>(p * swap.n_float()),
                                  fixings.begin() + static_cast<std::ptrdiff_t>((p + 1) * swap.n_float()));
    double v = 0.0;
    for (const auto& [T, cf] : swap.flows_between(t, t + delta, fix)) {
        v += cf * std::exp(-(paths.int_e[paths.at(g.index_of(T), p)] - e0));
    }
    v += std::exp(-(paths.int_e[paths.at(i1, p)] - e0)) * exposure(swap, paths, fixings, i1, p);
    return v;
}

// ---------------------------------------------------------------------------

MarginMode parse_margin_mode(const std::string& s) {
    if (s == "uncollateralized") return MarginMode::Uncollateralized;
    if (s == "csa_vm_only") return MarginMode::CsaVmOnly;
    if (s == "csa_vm_im") return MarginMode::CsaVmIm;
    if (s == "ccp") return MarginMode::Ccp;
    throw InputError("unknown margin mode '" + s + "'");
}

std::string to_string(MarginMode m) {
    switch (m) {
        case MarginMode::Uncollateralized: return "uncollateralized";
        case MarginMode::CsaVmOnly: return "csa_vm_only";
        case MarginMode::CsaVmIm: return "csa_vm_im";
        case MarginMode::Ccp: return "ccp";
    }
    return "?";
}

void MarginConfig::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("alpha must lie in [0,1]");
    if (!(delta_days >= 0.0)) throw InputError("margin period of risk must be non-negative");
    if (has_im() && !(q > 0.0 && q < 1.0)) throw InputError("IM confidence q must lie in (0,1)");
}

double im_stddev(const G2Model& model, double grad_x1, double grad_x2, double delta) {
    if (delta <= 0.0) return 0.0;
    const Eigen::Matrix2d c = model.state_covariance(delta);
    const Eigen::Vector2d g(grad_x1, grad_x2);
    return std::sqrt(std::max(g.dot(c * g), 0.0));
}

InitialMargins initial_margin(const MarginConfig& cfg, double nu) {
    if (!cfg.has_im()) return {0.0, 0.0};
    if (!(cfg.q > 0.0 && cfg.q < 1.0)) throw InputError("IM confidence q must lie in (0,1)");
    const double nc = std::max(0.0, nu * normal_quantile(cfg.q));
    return {nc, cfg.mode == MarginMode::CsaVmIm ? -nc : 0.0};
}

GapComponents gap_components(double eps_before, double eps_at, double eps_after, double margin,
                             double n_contagion, double n_mtm) {
    return {eps_before - margin, eps_at - eps_before - n_contagion, eps_after - eps_at - n_mtm};
}

}  // namespace xva
