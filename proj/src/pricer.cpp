#include "xva/pricer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "xva/normal.hpp"
#include "xva/parallel.hpp"

namespace xva {

Perspective parse_perspective(const std::string& s) {
    if (s == "investor") return Perspective::Investor;
    if (s == "counterparty") return Perspective::Counterparty;
    throw InputError("perspective must be 'investor' or 'counterparty', got '" + s + "'");
}

std::string to_string(Perspective p) { return p == Perspective::Investor ? "investor" : "counterparty"; }

void FundingConfig::validate() const {
    if (!(beta_plus >= 0.0 && beta_plus <= 1.0) || !(beta_minus >= 0.0 && beta_minus <= 1.0)) {
        throw InputError("liquidity multipliers must lie in [0,1]");
    }
}

void PricingConfig::validate() const {
    trade.validate();
    margin.validate();
    credit.validate();
    funding.validate();
}

Estimate batch_mean(const std::vector<double>& values, int batches) {
    const std::size_t n = values.size();
    if (n == 0) return {};
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    const std::size_t b = std::min<std::size_t>(static_cast<std::size_t>(std::max(batches, 2)), n);
    std::vector<double> means(b, 0.0);
    for (std::size_t k = 0; k < b; ++k) {
        const std::size_t lo = k * n / b, hi = (k + 1) * n / b;
        for (std::size_t p = lo; p < hi; ++p) means[k] += values[p];
        means[k] /= static_cast<double>(hi - lo);
    }
    double var = 0.0;
    for (double m : means) var += (m - mean) * (m - mean);
    var /= static_cast<double>(b - 1);
    return {mean, std::sqrt(var / static_cast<double>(b))};
}

namespace {

bool same_schedule(const TradeSpec& a, const TradeSpec& b) {
    return a.maturity == b.maturity && a.fixed_rate == b.fixed_rate && a.notional == b.notional &&
           a.fixed_period == b.fixed_period && a.float_period == b.float_period;
}

/// Per-config data fixed for the whole sweep.
struct Setup {
    std::size_t trade;  // index into the unique trades
    double inv_sign;    // receiver value -> investor-labelled exposure
    double own_sign;    // investor-labelled cash flow -> reported sign
    bool investor;
    double alpha, delta;
    std::size_t delta_slot;
    Eigen::Matrix2d cov;
    double im_quantile;  // Phi^{-1}(q), or 0 without initial margin
    bool bilateral_im;
    bool funded;  // beta_plus or beta_minus nonzero
};

struct PathState {
    std::vector<double> z, r, yb;    // realized V0 adjustment, FVA process, backward V0
    std::vector<double> cva, dva, mva;
};

struct Sweep {
    std::vector<ValuationResult> results;
    std::vector<std::vector<double>> fva0;
};

Sweep sweep(const HybridModel& model, const PathSet& paths, const std::vector<PricingConfig>& configs,
            const PricingOptions& opt) {
    for (const auto& c : configs) c.validate();
    const auto& grid = paths.grid;
    const std::size_t n = paths.n_paths;
    const std::size_t nt = grid.size();

    // Unique trades (receiver view) and their fixings.
    std::vector<TradeSpec> trades;
    std::vector<Setup> setup;
    std::vector<double> deltas;
    for (const auto& c : configs) {
        Setup s{};
        auto it = std::find_if(trades.begin(), trades.end(), [&](const TradeSpec& t) { return same_schedule(t, c.trade); });
        s.trade = static_cast<std::size_t>(it - trades.begin());
        if (it == trades.end()) {
            TradeSpec t = c.trade;
            t.direction = Direction::Receiver;
            trades.push_back(t);
        }
        s.investor = c.funding.perspective == Perspective::Investor;
        const double dir = c.trade.sign();
        s.inv_sign = s.investor ? dir : -dir;
        s.own_sign = (s.investor ? 1.0 : -1.0) * (c.short_position ? -1.0 : 1.0);
        s.alpha = c.margin.effective_alpha();
        s.delta = c.margin.delta();
        auto dit = std::find(deltas.begin(), deltas.end(), s.delta);
        s.delta_slot = static_cast<std::size_t>(dit - deltas.begin());
        if (dit == deltas.end()) deltas.push_back(s.delta);
        s.cov = s.delta > 0.0 ? model.rates.state_covariance(s.delta) : Eigen::Matrix2d::Zero();
        s.im_quantile = c.margin.has_im() ? std::max(0.0, normal_quantile(c.margin.q)) : 0.0;
        s.bilateral_im = c.margin.mode == MarginMode::CsaVmIm;
        s.funded = c.funding.beta_plus != 0.0 || c.funding.beta_minus != 0.0;
        setup.push_back(s);
    }
    std::vector<SwapValuer> valuers;
    std::vector<std::vector<double>> fixings;
    for (const auto& t : trades) {
        valuers.emplace_back(model.rates, t);
        fixings.push_back(path_fixings(valuers.back(), paths, opt.threads));
    }

    const std::size_t nc = configs.size();
    std::vector<PathState> st(nc);
    for (auto& s : st) {
        for (auto* v : {&s.z, &s.r, &s.yb, &s.cva, &s.dva, &s.mva}) v->assign(n, 0.0);
    }

    std::vector<double> eps(trades.size() * n), g1(trades.size() * n), g2(trades.size() * n);
    std::vector<double> surv_c(deltas.size() * n), surv_i(deltas.size() * n);
    std::vector<double> disc(n), disc0(n), rate_dt(n), lam_c(n), lam_i(n);
    std::vector<double> dpi(n), tmp(n), fit(n), y0fit(n);

    for (std::size_t i = nt - 1; i-- > 0;) {
        const double t = grid.times[i];
        const double dt = grid.dt(i);
        const double psi_c = model.credit_c.shift(t), psi_i = model.credit_i.shift(t);

        std::vector<SwapValuer::Slice> slices;
        std::vector<std::size_t> periods;
        for (const auto& sw : valuers) {
            slices.push_back(sw.slice(t));
            periods.push_back(sw.current_period(t));
        }
        parallel_chunks(n, opt.threads, [&](std::size_t, std::size_t b, std::size_t e) {
            for (std::size_t p = b; p < e; ++p) {
                const std::size_t a0 = paths.at(i, p), a1 = paths.at(i + 1, p);
                const double step = (paths.int_e[a1] - paths.int_e[a0]) + (paths.int_lc[a1] - paths.int_lc[a0]) +
                                    (paths.int_li[a1] - paths.int_li[a0]);
                disc[p] = std::exp(-step);
                rate_dt[p] = step;
                disc0[p] = std::exp(-(paths.int_e[a0] + paths.int_lc[a0] + paths.int_li[a0]));
                lam_c[p] = paths.yc[a0] + psi_c;
                lam_i[p] = paths.yi[a0] + psi_i;
                for (std::size_t d = 0; d < deltas.size(); ++d) {
                    const double h = deltas[d];
                    surv_c[d * n + p] = h > 0.0 ? model.credit_c.survival(t, t + h, paths.yc[a0]) : 1.0;
                    surv_i[d * n + p] = h > 0.0 ? model.credit_i.survival(t, t + h, paths.yi[a0]) : 1.0;
                }
                for (std::size_t k = 0; k < valuers.size(); ++k) {
                    const std::size_t cp = periods[k];
                    const double fix = cp == SwapValuer::npos ? 1.0 : fixings[k][p * valuers[k].n_float() + cp];
                    const auto v = SwapValuer::value(slices[k], paths.x1[a0], paths.x2[a0], fix);
                    eps[k * n + p] = v.pv;
                    g1[k * n + p] = v.d_x1;
                    g2[k * n + p] = v.d_x2;
                }
            }
        });

        const Regressor reg({paths.row(paths.x1, i), paths.row(paths.x2, i), paths.row(paths.yc, i),
                             paths.row(paths.yi, i)},
                            n);

        for (std::size_t c = 0; c < nc; ++c) {
            const auto& cfg = configs[c];
            const auto& s = setup[c];
            auto& ps = st[c];
            const double lgd_c = cfg.credit.lgd_c(), lgd_i = cfg.credit.lgd_i();
            const double bp = cfg.funding.beta_plus, bm = cfg.funding.beta_minus;
            parallel_chunks(n, opt.threads, [&](std::size_t, std::size_t b, std::size_t e) {
                for (std::size_t p = b; p < e; ++p) {
                    const std::size_t k = s.trade * n + p;
                    const double ep = s.inv_sign * eps[k];
                    const double gx1 = s.inv_sign * g1[k], gx2 = s.inv_sign * g2[k];
                    const double nu =
                        s.delta > 0.0 ? std::sqrt(std::max(0.0, Eigen::Vector2d(gx1, gx2).dot(s.cov * Eigen::Vector2d(gx1, gx2))))
                                      : 0.0;
                    const double n_c = nu * s.im_quantile;
                    const double n_i = s.bilateral_im ? -n_c : 0.0;
                    const auto lam = lambda_delta(lam_c[p], lam_i[p], surv_c[s.delta_slot * n + p],
                                                  surv_i[s.delta_slot * n + p]);
                    // Gap eps_{t+delta} - alpha eps_t - N with eps_{t+delta} - eps_t ~ N(0, nu^2).
                    const double shortfall = (1.0 - s.alpha) * ep;
                    const double cva = -lam.c * lgd_c * bachelier_call(n_c - shortfall, nu) * dt;
                    const double dva = -lam.i * lgd_i * bachelier_put_negative(n_i - shortfall, nu) * dt;
                    const double lam_self = s.investor ? lam_i[p] : lam_c[p];
                    const double l_nc = s.investor ? 0.0 : bm * lam_self;
                    const double l_ni = s.investor ? bp * lam_self : 0.0;
                    const double mva = (l_nc * n_c + l_ni * n_i) * dt;

                    const double own_cva = s.own_sign * (s.investor ? cva : dva);
                    const double own_dva = s.own_sign * (s.investor ? dva : cva);
                    const double own_mva = s.own_sign * mva;
                    ps.cva[p] += disc0[p] * own_cva;
                    ps.dva[p] += disc0[p] * own_dva;
                    ps.mva[p] += disc0[p] * own_mva;
                    dpi[p] = own_cva + own_dva + own_mva;
                    tmp[p] = disc[p] * ps.z[p];
                    ps.z[p] = dpi[p] + tmp[p];
                }
            });

            if (opt.backward_check) {
                reg.fit(ps.yb.data(), fit.data());
                for (std::size_t p = 0; p < n; ++p) ps.yb[p] = dpi[p] + (1.0 - rate_dt[p]) * fit[p];
            }
            if (!s.funded) continue;

            // Funding: only the l+/l- charge on the estimated price gap remains
            // once the collateral and default discounting is carried by D.
            reg.fit(tmp.data(), fit.data());
            for (std::size_t p = 0; p < n; ++p) y0fit[p] = dpi[p] + fit[p];
            for (std::size_t p = 0; p < n; ++p) tmp[p] = disc[p] * ps.r[p];
            reg.fit(tmp.data(), fit.data());
            for (std::size_t p = 0; p < n; ++p) {
                const double y = y0fit[p] + fit[p];
                const double lam_self = s.investor ? lam_i[p] : lam_c[p];
                const double l = (y >= 0.0 ? bp : bm) * lam_self;
                ps.r[p] = tmp[p] - l * y * dt;
            }
        }
    }

    Sweep out;
    for (std::size_t c = 0; c < nc; ++c) {
        const auto& s = setup[c];
        auto& ps = st[c];
        ValuationResult r;
        r.label = configs[c].label;
        r.n_paths = n;
        r.seed = paths.seed;
        const double e0 = s.inv_sign * valuers[s.trade].value(0.0, 0.0, 0.0, 1.0).pv;
        r.mtm = {s.own_sign * e0, 0.0};
        r.cva = batch_mean(ps.cva, opt.batches);
        r.dva = batch_mean(ps.dva, opt.batches);
        r.mva = batch_mean(ps.mva, opt.batches);
        r.fva = batch_mean(ps.r, opt.batches);
        std::vector<double> total(n);
        for (std::size_t p = 0; p < n; ++p) total[p] = r.mtm.value + ps.cva[p] + ps.dva[p] + ps.mva[p] + ps.r[p];
        r.total = batch_mean(total, opt.batches);
        // Keep the bookkeeping identity exact rather than up to summation order.
        r.total.value = r.mtm.value + r.cva.value + r.dva.value + r.mva.value + r.fva.value;
        if (opt.backward_check) r.v0_adjustment_backward = batch_mean(ps.yb, opt.batches);
        out.results.push_back(std::move(r));
        out.fva0.push_back(std::move(ps.r));
    }
    return out;
}

}  // namespace

std::vector<ValuationResult> price(const HybridModel& model, const PathSet& paths,
                                   const std::vector<PricingConfig>& configs, const PricingOptions& opt) {
    return sweep(model, paths, configs, opt).results;
}

std::vector<double> fva_pathwise(const HybridModel& model, const PathSet& paths, const PricingConfig& config,
                                 int threads) {
    PricingOptions opt;
    opt.threads = threads;
    return std::move(sweep(model, paths, {config}, opt).fva0.front());
}

Estimate long_plus_short(const HybridModel& model, const PathSet& paths, PricingConfig config,
                         const PricingOptions& opt) {
    config.short_position = false;
    PricingConfig other = config;
    other.short_position = true;
    const auto s = sweep(model, paths, {config, other}, opt);
    const auto& a = s.results[0];
    const auto& b = s.results[1];
    // Every integrand cancels except funding; the pathwise sum carries the error.
    std::vector<double> sum(paths.n_paths);
    for (std::size_t p = 0; p < sum.size(); ++p) sum[p] = s.fva0[0][p] + s.fva0[1][p];
    Estimate e = batch_mean(sum, opt.batches);
    e.value = a.total.value + b.total.value;
    return e;
}

std::vector<ProfilePoint> exposure_profile(const HybridModel& model, const PathSet& paths,
                                           const PricingConfig& config, int threads) {
    config.validate();
    TradeSpec rec = config.trade;
    rec.direction = Direction::Receiver;
    const SwapValuer sw(model.rates, rec);
    const auto fix = path_fixings(sw, paths, threads);
    const bool investor = config.funding.perspective == Perspective::Investor;
    const double sign = (investor ? 1.0 : -1.0) * config.trade.sign();
    const double delta = config.margin.delta();
    const double zq = config.margin.has_im() ? std::max(0.0, normal_quantile(config.margin.q)) : 0.0;
    const std::size_t n = paths.n_paths;

    std::vector<ProfilePoint> out;
    std::vector<double> e(n), im(n);
    for (std::size_t i = 0; i < paths.grid.size(); ++i) {
        const double t = paths.grid.times[i];
        const std::size_t cp = sw.current_period(t);
        const auto slice = sw.slice(t);
        parallel_chunks(n, threads, [&](std::size_t, std::size_t b, std::size_t end) {
            for (std::size_t p = b; p < end; ++p) {
                const std::size_t a = paths.at(i, p);
                const double f = cp == SwapValuer::npos ? 1.0 : fix[p * sw.n_float() + cp];
                const auto v = SwapValuer::value(slice, paths.x1[a], paths.x2[a], f);
                e[p] = sign * v.pv;
                im[p] = zq * im_stddev(model.rates, v.d_x1, v.d_x2, delta);
            }
        });
        double epe = 0.0, ene = 0.0, imm = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            epe += std::max(e[p], 0.0);
            ene += std::min(e[p], 0.0);
            imm += im[p];
        }
        std::sort(im.begin(), im.end());
        auto q = [&](double level) { return im[std::min(n - 1, static_cast<std::size_t>(level * static_cast<double>(n)))]; };
        const double dn = static_cast<double>(n);
        out.push_back({t, epe / dn, ene / dn, imm / dn, q(0.05), q(0.5), q(0.95)});
    }
    return out;
}

}  // namespace xva
