// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Every tolerance is the one stated by the criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "xva/credit.hpp"
#include "xva/normal.hpp"
#include "xva/pricer.hpp"
#include "xva/scenario.hpp"

using namespace xva;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

std::string source_path(const std::string& rel) { return std::string(XVA_SOURCE_DIR) + "/" + rel; }

const Environment& environment() {
    static const Environment env = [] {
        ScenarioConfig cfg;
        cfg.market_data = source_path("data/market_data.json");
        cfg.g2_params = source_path("configs/g2_params.json");
        return load_environment(cfg);
    }();
    return env;
}

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << "[fail] " << what << "; ";
        }
    }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Sample {
    double mean = 0.0, se = 0.0;
};

template <typename F>
Sample sample(std::size_t n, F&& f) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        const double v = f(p);
        s += v;
        s2 += v * v;
    }
    const double m = s / static_cast<double>(n);
    return {m, std::sqrt(std::max(0.0, s2 / static_cast<double>(n) - m * m) / static_cast<double>(n - 1))};
}

PathSet simulate(const HybridModel& model, const std::vector<PricingConfig>& configs, std::size_t n,
                 std::uint64_t seed, double horizon = 0.0) {
    std::vector<double> dates;
    for (const auto& c : configs) {
        const auto d = c.trade.schedule_dates();
        dates.insert(dates.end(), d.begin(), d.end());
        horizon = std::max(horizon, c.trade.maturity);
    }
    SimulationOptions so;
    so.n_paths = n;
    so.seed = seed;
    so.substeps = 4;
    return generate_paths(model, TimeGrid::build(horizon, 1.0 / 12.0, dates), so);
}

PricingConfig ten_year(const HybridModel& model, Direction dir) {
    PricingConfig c;
    c.trade.direction = dir;
    c.trade.maturity = 10.0;
    c.trade.fixed_rate = par_rate(model.rates, c.trade);
    return c;
}

double bp(double v) { return v * 1e4; }

// ---------------------------------------------------------------------------

Outcome closeout_algebra() {
    Outcome o;
    const auto t0 = Clock::now();
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> u(-1.0, 1.0), unit(0.0, 1.0);
    auto amount = [&] {
        const double x = unit(gen);
        return x < 0.05 ? 0.0 : u(gen) * (x < 0.5 ? 1.0 : 10.0);
    };
    long bad_case = 0, bad_rehyp = 0, bad_norehyp = 0;
    double worst = 0.0;
    for (int k = 0; k < 100000; ++k) {
        DefaultScenario s{amount(), amount(), std::abs(amount()), -std::abs(amount()),
                          static_cast<DefaultOrdering>(gen() % 4)};
        const double tie = unit(gen);
        if (tie < 0.05) s.eps = s.m + s.nc;
        else if (tie < 0.1) s.eps = s.m + s.ni;
        CreditConfig c;
        c.r_c = unit(gen);
        c.r_i = unit(gen);
        c.r_c_collateral = c.r_c + (1.0 - c.r_c) * unit(gen);
        c.r_i_collateral = c.r_i + (1.0 - c.r_i) * unit(gen);
        c.rehypothecation = gen() % 2 == 0;
        const double scale = 1.0 + std::abs(s.eps) + std::abs(s.m) + s.nc - s.ni;
        const double d = std::abs(closeout_casewise(s, c) - closeout_compact(s, c, CloseoutVariant::Explicit));
        worst = std::max(worst, d / scale);
        if (d > 1e-12 * scale) ++bad_case;

        CreditConfig rh = c;
        rh.rehypothecation = true;
        rh.r_c_collateral = rh.r_c;
        rh.r_i_collateral = rh.r_i;
        if (std::abs(closeout_compact(s, c, CloseoutVariant::Rehyp) - closeout_casewise(s, rh)) > 1e-12 * scale) ++bad_rehyp;
        CreditConfig nr = c;
        nr.rehypothecation = true;
        nr.r_c_collateral = nr.r_i_collateral = 1.0;
        if (std::abs(closeout_compact(s, c, CloseoutVariant::NoRehyp) - closeout_casewise(s, nr)) > 1e-12 * scale) {
            ++bad_norehyp;
        }
    }
    const double secs = seconds_since(t0);
    o.require(bad_case == 0, std::to_string(bad_case) + " casewise mismatches");
    o.require(bad_rehyp == 0, std::to_string(bad_rehyp) + " rehyp mismatches");
    o.require(bad_norehyp == 0, std::to_string(bad_norehyp) + " norehyp mismatches");
    o.require(secs < 10.0, "runtime above 10 s");
    o.detail << "1e5 scenarios, max rel diff " << worst << ", " << secs << " s";
    return o;
}

Outcome null_fva() {
    Outcome o;
    const auto t0 = Clock::now();
    double worst = 0.0;
    int cases = 0;
    for (double rho : {-0.5, 0.0, 0.5}) {
        const HybridModel model = build_model(environment(), "H/M", rho, 1.0);
        std::vector<PricingConfig> configs;
        for (auto dir : {Direction::Receiver, Direction::Payer}) {
            for (auto mode : {MarginMode::Uncollateralized, MarginMode::CsaVmOnly, MarginMode::CsaVmIm, MarginMode::Ccp}) {
                for (auto persp : {Perspective::Investor, Perspective::Counterparty}) {
                    PricingConfig c = ten_year(model, dir);
                    c.margin.mode = mode;
                    c.margin.alpha = mode == MarginMode::CsaVmOnly ? 0.6 : 1.0;
                    c.funding.perspective = persp;
                    configs.push_back(c);
                }
            }
        }
        const PathSet paths = simulate(model, configs, 10000, 101);
        for (const auto& c : configs) {
            for (double x : fva_pathwise(model, paths, c)) worst = std::max(worst, std::abs(x));
            ++cases;
        }
    }
    const double secs = seconds_since(t0);
    o.require(worst <= 1e-12, "pathwise FVA above 1e-12");
    o.require(secs / 3.0 < 60.0, "runtime above 1 min per scenario set");
    o.detail << cases << " scenarios at 1e4 paths, max |FVA| " << worst << ", " << secs << " s";
    return o;
}

Outcome full_collateral_zero() {
    Outcome o;
    const HybridModel model = build_model(environment(), "H/M", 0.0, 1.0);
    std::vector<PricingConfig> configs;
    for (auto dir : {Direction::Receiver, Direction::Payer}) {
        PricingConfig c = ten_year(model, dir);
        c.margin.mode = MarginMode::CsaVmOnly;
        c.margin.alpha = 1.0;
        c.margin.delta_days = 0.0;
        c.funding.beta_plus = c.funding.beta_minus = 1.0;
        configs.push_back(c);
    }
    const PathSet paths = simulate(model, configs, 20000, 202);
    for (const auto& r : price(model, paths, configs)) {
        for (const auto* e : {&r.mtm, &r.cva, &r.dva, &r.mva, &r.fva, &r.total}) {
            o.require(std::abs(e->value) <= 3.0 * e->se + 1e-12, "component away from zero");
        }
        o.detail << "total " << bp(r.total.value) << " bp (se " << bp(r.total.se) << "); ";
    }
    return o;
}

Outcome alpha_linearity() {
    Outcome o;
    const std::vector<double> alphas = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    double worst = 0.0;
    for (double rho : {-0.6, 0.0, 0.6}) {
        const HybridModel model = build_model(environment(), "H/M", rho, 1.0);
        std::vector<PricingConfig> configs;
        for (auto dir : {Direction::Receiver, Direction::Payer}) {
            for (double a : alphas) {
                PricingConfig c = ten_year(model, dir);
                c.margin.mode = MarginMode::CsaVmOnly;
                c.margin.alpha = a;
                c.margin.delta_days = 0.0;
                c.funding.beta_plus = c.funding.beta_minus = 1.0;
                configs.push_back(c);
            }
        }
        const PathSet paths = simulate(model, configs, 10000, 303);
        const auto res = price(model, paths, configs);
        for (std::size_t d = 0; d < 2; ++d) {
            const auto& base = res[d * alphas.size()];
            for (std::size_t k = 0; k < alphas.size(); ++k) {
                const auto& r = res[d * alphas.size() + k];
                const double target = (1.0 - alphas[k]) * base.total.value;
                const double se = std::hypot(r.total.se, (1.0 - alphas[k]) * base.total.se);
                worst = std::max(worst, std::abs(r.total.value - target) / std::max(se, 1e-300));
                o.require(std::abs(r.total.value - target) <= 3.0 * se + 1e-15, "total(alpha) off the line");
            }
            o.detail << (d == 0 ? "rec" : "pay") << " rho=" << rho << " total(0)=" << bp(base.total.value) << "bp; ";
        }
    }
    o.detail << "max deviation " << worst << " se";
    return o;
}

Outcome bid_ask() {
    Outcome o;
    for (double rho : {-0.6, 0.0, 0.6}) {
        const HybridModel model = build_model(environment(), "H/M", rho, 1.0);
        PricingConfig c = ten_year(model, Direction::Receiver);
        c.margin.mode = MarginMode::Uncollateralized;
        const PathSet paths = simulate(model, {c}, 10000, 404);
        for (double b : {0.2, 0.6, 1.0}) {
            c.funding.beta_plus = c.funding.beta_minus = b;
            const auto e = long_plus_short(model, paths, c);
            o.require(std::abs(e.value) <= 3.0 * e.se + 1e-15, "long+short nonzero under symmetric funding");
        }
        c.funding.beta_minus = 0.0;
        double prev = 0.0;
        o.detail << "rho=" << rho << " spreads";
        for (double b : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
            c.funding.beta_plus = b;
            const double spread = -long_plus_short(model, paths, c).value;
            if (b == 0.0) {
                o.require(spread == 0.0, "nonzero spread at beta+=0");
            } else {
                o.require(spread > prev, "spread not increasing in beta+");
            }
            o.detail << " " << bp(spread);
            prev = spread;
        }
        o.detail << " bp; ";
    }
    return o;
}

Outcome decomposition() {
    Outcome o;
    const auto t0 = Clock::now();
    const std::vector<double> qs = {0.5, 0.68, 0.9, 0.95, 0.99, 0.995, 0.997, 0.999};
    // Client = counterparty (High), clearing member / investor (Mid). Client view.
    const HybridModel model = build_model(environment(), "H/M", 0.0, 1.0);
    std::vector<PricingConfig> configs;
    for (int bilateral = 0; bilateral < 2; ++bilateral) {
        for (double q : qs) {
            PricingConfig c = ten_year(model, Direction::Receiver);
            c.margin.mode = bilateral ? MarginMode::CsaVmIm : MarginMode::Ccp;
            c.margin.alpha = 1.0;
            c.margin.q = q;
            c.margin.delta_days = bilateral ? 10.0 : 5.0;
            c.credit.r_c = c.credit.r_c_collateral = 0.4;
            c.credit.r_i = c.credit.r_i_collateral = bilateral ? 0.4 : 0.95;
            c.funding.beta_plus = c.funding.beta_minus = 1.0;
            c.funding.perspective = Perspective::Counterparty;
            configs.push_back(c);
        }
    }
    const PathSet paths = simulate(model, configs, 100000, 606);
    const auto res = price(model, paths, configs);
    const std::size_t nq = qs.size();
    auto ccp = [&](std::size_t k) -> const ValuationResult& { return res[k]; };
    auto bil = [&](std::size_t k) -> const ValuationResult& { return res[nq + k]; };

    o.require(ccp(0).mva.value == 0.0, "CCP MVA(q=0.5) not exactly zero");
    for (std::size_t k = 1; k < nq; ++k) {
        o.require(std::abs(ccp(k).mva.value) > std::abs(ccp(k - 1).mva.value), "CCP |MVA| not increasing at q=" + std::to_string(qs[k]));
        o.require(std::abs(ccp(k).cva.value) < std::abs(ccp(k - 1).cva.value), "CCP |CVA| not decreasing at q=" + std::to_string(qs[k]));
        o.require(std::abs(ccp(k).dva.value) < std::abs(ccp(k - 1).dva.value), "CCP |DVA| not decreasing at q=" + std::to_string(qs[k]));
        o.require(std::abs(bil(k).mva.value) > std::abs(ccp(k).mva.value), "bilateral |MVA| not above CCP at q=" + std::to_string(qs[k]));
    }
    for (std::size_t k = 0; k < nq; ++k) {
        const double ratio = std::abs(ccp(k).cva.value) / std::abs(bil(k).cva.value);
        o.require(ratio < 0.1, "CCP/bilateral |CVA| ratio " + std::to_string(ratio) + " at q=" + std::to_string(qs[k]));
    }
    const double secs = seconds_since(t0);
    o.require(secs < 1800.0, "runtime above 30 min");
    o.detail << "q: CCP CVA/DVA/MVA/FVA | bilateral CVA/DVA/MVA/FVA (bp):";
    for (std::size_t k = 0; k < nq; ++k) {
        char line[320];
        std::snprintf(line, sizeof line, " %.3f: %.4f/%.4f/%.4f/%.4f | %.4f/%.4f/%.4f/%.4f;", qs[k], bp(ccp(k).cva.value),
                      bp(ccp(k).dva.value), bp(ccp(k).mva.value), bp(ccp(k).fva.value), bp(bil(k).cva.value),
                      bp(bil(k).dva.value), bp(bil(k).mva.value), bp(bil(k).fva.value));
        o.detail << line;
    }
    o.detail << " " << secs << " s";
    return o;
}

Outcome wrong_way() {
    Outcome o;
    const std::vector<double> rhos = {-0.6, -0.4, -0.2, 0.0, 0.2, 0.4, 0.6};
    std::vector<double> rec, pay;
    for (double rho : rhos) {
        const HybridModel model = build_model(environment(), "H/M", rho, 1.0);
        std::vector<PricingConfig> configs;
        for (auto dir : {Direction::Receiver, Direction::Payer}) {
            PricingConfig c = ten_year(model, dir);
            c.margin.mode = MarginMode::Uncollateralized;
            c.funding.beta_plus = c.funding.beta_minus = 1.0;
            configs.push_back(c);
        }
        const PathSet paths = simulate(model, configs, 20000, 707);
        const auto res = price(model, paths, configs);
        rec.push_back(res[0].total.value);
        pay.push_back(res[1].total.value);
    }
    for (std::size_t k = 1; k < rhos.size(); ++k) {
        o.require(rec[k] > rec[k - 1], "receiver not increasing at rho=" + std::to_string(rhos[k]));
        o.require(pay[k] < pay[k - 1], "payer not decreasing at rho=" + std::to_string(rhos[k]));
    }
    // Sign change near zero: negative at -0.2, positive at +0.2.
    o.require(rec[2] < 0.0 && rec[4] > 0.0, "receiver sign change not bracketed by rho=-0.2 and 0.2");
    for (double v : pay) o.require(v < 0.0, "payer total not negative");
    o.detail << "receiver";
    for (double v : rec) o.detail << " " << bp(v);
    o.detail << " | payer";
    for (double v : pay) o.detail << " " << bp(v);
    o.detail << " bp";
    return o;
}

Outcome model_oracles() {
    Outcome o;
    const auto& env = environment();
    const HybridModel model = build_model(env, "H/M", 0.0, 1.0);
    {
        SimulationOptions so;
        so.n_paths = 100000;
        so.seed = 808;
        so.substeps = 4;
        const PathSet paths = generate_paths(model, TimeGrid::build(10.0, 1.0 / 12.0, {1.0, 5.0}), so);
        for (double T : {1.0, 5.0, 10.0}) {
            const std::size_t i = paths.grid.index_of(T);
            const auto s = sample(paths.n_paths, [&](std::size_t p) { return std::exp(-paths.int_e[paths.at(i, p)]); });
            const double ref = env.market.curve.discount(T);
            o.require(std::abs(s.mean - ref) <= 3.0 * s.se, "discount T=" + std::to_string(T));
            o.detail << "P(" << T << ") " << (s.mean - ref) / s.se << " se; ";
        }
        for (double T : {1.0, 5.0, 10.0}) {
            const std::size_t i = paths.grid.index_of(T);
            const auto sc = sample(paths.n_paths, [&](std::size_t p) { return std::exp(-paths.int_lc[paths.at(i, p)]); });
            const auto si = sample(paths.n_paths, [&](std::size_t p) { return std::exp(-paths.int_li[paths.at(i, p)]); });
            const double rc = model.credit_c.survival0(T), ri = model.credit_i.survival0(T);
            o.require(std::abs(sc.mean - rc) <= 3.0 * sc.se, "High survival T=" + std::to_string(T));
            o.require(std::abs(si.mean - ri) <= 3.0 * si.se, "Mid survival T=" + std::to_string(T));
            o.detail << "Q(" << T << ") " << (sc.mean - rc) / sc.se << "/" << (si.mean - ri) / si.se << " se; ";
        }
    }
    {
        // Margin volatility: first-order propagation against nested simulation.
        TradeSpec t;
        t.maturity = 10.0;
        t.fixed_rate = par_rate(model.rates, t);
        const SwapValuer v(model.rates, t);
        const auto& p = model.rates.params();
        std::mt19937_64 gen(909);
        std::normal_distribution<double> nd;
        const double pts[3][2] = {{1.0, 10.0 / 360.0}, {4.25, 5.0 / 360.0}, {7.1, 30.0 / 360.0}};
        for (const auto& pt : pts) {
            const double x1 = 0.004, x2 = -0.003;
            const double fix = v.fixing(v.current_period(pt[0]), x1, x2);
            const auto val = v.value(pt[0], x1, x2, fix);
            const double nu = im_stddev(model.rates, val.d_x1, val.d_x2, pt[1]);
            const Eigen::Matrix2d L = Eigen::LLT<Eigen::Matrix2d>(model.rates.state_covariance(pt[1])).matrixL();
            const double e1 = std::exp(-p.a1 * pt[1]), e2 = std::exp(-p.a2 * pt[1]);
            const double disc = model.rates.zcb(pt[0], pt[0] + pt[1], x1, x2);
            const std::size_t n = 100000;
            std::vector<double> y(n);
            for (auto& yy : y) {
                const Eigen::Vector2d w = L * Eigen::Vector2d(nd(gen), nd(gen));
                yy = disc * v.value(pt[0] + pt[1], e1 * x1 + w[0], e2 * x2 + w[1], fix).pv;
            }
            const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
            double var = 0.0;
            for (double yy : y) var += (yy - mean) * (yy - mean);
            const double sd = std::sqrt(var / (n - 1));
            o.require(std::abs(nu / sd - 1.0) <= 0.1, "nu off by more than 10%");
            o.detail << "nu rel err " << nu / sd - 1.0 << "; ";
        }
    }
    {
        // Regression against nested simulation on a two-factor toy.
        std::mt19937_64 gen(1010);
        std::normal_distribution<double> nd;
        auto value = [](double a, double b, double z) {
            const double s = a + 0.5 * b + 0.3 * z;
            return 0.5 * s * s + s;
        };
        std::vector<std::pair<double, double>> deep;
        for (int k = 0; k < 10; ++k) deep.emplace_back(1.6 + 0.08 * k, 1.0 - 0.1 * k);
        const std::size_t n = 5000;
        const int reps = 40;
        std::vector<std::vector<double>> fitted(deep.size());
        for (int r = 0; r < reps; ++r) {
            std::vector<double> x1(n), x2(n), y(n);
            for (std::size_t q = 0; q < n; ++q) {
                x1[q] = q < deep.size() ? deep[q].first : nd(gen);
                x2[q] = q < deep.size() ? deep[q].second : nd(gen);
                y[q] = value(x1[q], x2[q], nd(gen));
            }
            const auto fit = regress_conditional(y, {x1.data(), x2.data()});
            for (std::size_t k = 0; k < deep.size(); ++k) fitted[k].push_back(fit[k]);
        }
        int bad = 0;
        for (std::size_t k = 0; k < deep.size(); ++k) {
            const auto reg = sample(reps, [&](std::size_t r) { return fitted[k][r]; });
            const auto nested = sample(20000, [&](std::size_t) { return value(deep[k].first, deep[k].second, nd(gen)); });
            if (std::abs(reg.mean - nested.mean) > 3.0 * std::hypot(reg.se, nested.se)) ++bad;
        }
        o.require(bad == 0, std::to_string(bad) + " regression points outside 3 se");
        o.detail << "regression points outside 3 se: " << bad;
    }
    return o;
}

Outcome round_trips() {
    Outcome o;
    const auto& env = environment();
    // Yield pillars.
    const auto raw = load_json(source_path("data/market_data.json"));
    const Date anchor = parse_iso_date(raw.at("anchor_date").get<std::string>());
    double worst_curve = 0.0;
    for (const auto& p : raw.at("yield_pillars")) {
        const double t = act360(anchor, parse_iso_date(p.at("date").get<std::string>()));
        const double df = std::exp(-p.at("rate").get<double>() * t);
        worst_curve = std::max(worst_curve, std::abs(env.market.curve.discount(t) / df - 1.0));
    }
    o.require(worst_curve <= 1e-10, "yield pillar repricing");
    // CDS spreads.
    double worst_cds = 0.0;
    for (const auto& cds : env.market.cds_curves) {
        const auto& h = *env.hazards.at(cds.name);
        for (std::size_t k = 0; k < cds.maturities.size(); ++k) {
            const auto legs = cds_legs(h, env.market.curve, cds.maturities[k], cds.recovery);
            const double fair = legs.protection / legs.premium_annuity * 1e4;
            worst_cds = std::max(worst_cds, std::abs(fair / cds.spreads_bp[k] - 1.0));
        }
    }
    o.require(worst_cds <= 1e-10, "CDS spread repricing");
    // Synthetic calibration.
    const G2Params truth{0.4, 0.04, 0.012, 0.009, -0.75};
    const auto synthetic = g2_implied_surface(G2Model(truth, env.market.curve), env.market.swaption_vols);
    const auto rep = calibrate_g2(synthetic, env.market.curve);
    o.require(rep.max_abs_error <= 1e-3, "synthetic calibration beyond 0.1 vol point");
    o.detail << "curve " << worst_curve << ", cds " << worst_cds << " (relative); synthetic max err "
             << rep.max_abs_error * 100 << " vol pts";
    return o;
}

Outcome determinism() {
    Outcome o;
    nlohmann::json j = load_json(source_path("configs/determinism.json"));
    const fs::path cfg_dir = source_path("configs");
    const ScenarioConfig cfg = scenario_from_json(j, cfg_dir);
    const Environment env = load_environment(cfg);
    const fs::path base = fs::temp_directory_path() / "xva_acceptance_determinism";
    fs::remove_all(base);
    const auto a = run_scenario(cfg, env, base / "t1", 1);
    const auto b = run_scenario(cfg, env, base / "t4", 4);
    const auto c = run_scenario(cfg, env, base / "t1_again", 1);
    auto slurp = [](const fs::path& f) {
        std::ifstream in(f, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    o.require(a.files.size() == b.files.size() && !a.files.empty(), "file lists differ");
    int compared = 0;
    for (std::size_t k = 0; k < std::min(a.files.size(), b.files.size()); ++k) {
        const std::string x = slurp(a.files[k]);
        o.require(x == slurp(b.files[k]), "thread counts differ: " + a.files[k].filename().string());
        o.require(x == slurp(c.files[k]), "reruns differ: " + a.files[k].filename().string());
        ++compared;
    }
    o.detail << compared << " files identical for 1 and 4 threads";
    fs::remove_all(base);
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"close-out algebra", closeout_algebra},
        {"null FVA", null_fva},
        {"full-collateral zero", full_collateral_zero},
        {"alpha linearity", alpha_linearity},
        {"bid-ask symmetry", bid_ask},
        {"decomposition monotonicity", decomposition},
        {"wrong-way pattern", wrong_way},
        {"model oracles", model_oracles},
        {"bootstrap round trips", round_trips},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        if (!o.pass) ++failed;
        std::cout << "criterion " << k + 1 << " [" << criteria[k].name << "]: " << (o.pass ? "PASS" : "FAIL") << " - "
                  << o.detail.str() << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
