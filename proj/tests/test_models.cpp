#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "xva/models.hpp"
#include "xva/simulation.hpp"

using namespace xva;
using xva::test::environment;

namespace {

PathSet simulate(const HybridModel& m, double horizon, std::size_t n, std::vector<double> mandatory = {},
                 std::uint64_t seed = 7) {
    SimulationOptions so;
    so.n_paths = n;
    so.seed = seed;
    so.substeps = 4;
    return generate_paths(m, TimeGrid::build(horizon, 1.0 / 12.0, std::move(mandatory)), so);
}

}  // namespace

TEST_CASE("g2 bond prices fit the initial curve") {
    const auto& env = environment();
    const G2Model m(env.g2, env.market.curve);
    CHECK(g2_b(0.0, 3.0) == doctest::Approx(3.0));
    CHECK(g2_b(1e-14, 3.0) == doctest::Approx(3.0));
    for (double T : {0.1, 1.0, 5.0, 10.0, 20.0}) {
        CHECK(m.zcb(0.0, T, 0.0, 0.0) == doctest::Approx(env.market.curve.discount(T)).epsilon(1e-12));
        CHECK(m.zcb(T, T, 0.01, -0.02) == doctest::Approx(1.0).epsilon(1e-14));
    }
    // Affine in the state.
    const double t = 2.0, T = 7.0, x1 = 0.01, x2 = -0.004;
    const double expect = std::exp(m.log_a(t, T) - g2_b(m.params().a1, T - t) * x1 - g2_b(m.params().a2, T - t) * x2);
    CHECK(m.zcb(t, T, x1, x2) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("zero volatility collapses to forward discount factors") {
    const auto& env = environment();
    G2Params p = env.g2;
    p.sigma1 = p.sigma2 = 0.0;
    const G2Model m(p, env.market.curve);
    const auto& c = env.market.curve;
    CHECK(m.V(5.0) == 0.0);
    for (double t : {0.5, 3.0, 8.0}) {
        CHECK(m.zcb(t, t + 2.0, 0.0, 0.0) == doctest::Approx(c.discount(t + 2.0) / c.discount(t)).epsilon(1e-13));
        CHECK(m.phi_integral(t, 0.25) == doctest::Approx(c.log_discount(t) - c.log_discount(t + 0.25)).epsilon(1e-12));
    }
}

TEST_CASE("integrated variance matches its defining double integral") {
    const G2Params p{0.3, 0.05, 0.012, 0.009, -0.6};
    const G2Model m(p, YieldCurve::flat(0.02));
    const double tau = 4.0;
    // Var int_0^tau x_i = sigma_i sigma_j / (a_i a_j) int_0^tau (1-e^{-a_i s})(1-e^{-a_j s}) ds
    auto term = [&](double ai, double aj) {
        const int n = 20000;
        double s = 0.0;
        const double h = tau / n;
        for (int k = 0; k < n; ++k) {
            const double u = (k + 0.5) * h;
            s += (1.0 - std::exp(-ai * u)) * (1.0 - std::exp(-aj * u)) * h;
        }
        return s / (ai * aj);
    };
    const double v = p.sigma1 * p.sigma1 * term(p.a1, p.a1) + p.sigma2 * p.sigma2 * term(p.a2, p.a2) +
                     2.0 * p.rho * p.sigma1 * p.sigma2 * term(p.a1, p.a2);
    CHECK(m.V(tau) == doctest::Approx(v).epsilon(1e-7));
}

TEST_CASE("monte carlo discount factors reprice the curve") {
    const auto model = xva::test::model();
    const auto paths = simulate(model, 10.0, 20000, {1.0, 5.0});
    for (double T : {1.0, 5.0, 10.0}) {
        const std::size_t i = paths.grid.index_of(T);
        const auto s = xva::test::sample(paths.n_paths, [&](std::size_t p) { return std::exp(-paths.int_e[paths.at(i, p)]); });
        const double expect = environment().market.curve.discount(T);
        CHECK(std::abs(s.mean - expect) < 3.0 * s.se + 1e-12);
    }
}

TEST_CASE("cir++ reproduces market survival and its shift") {
    const auto& env = environment();
    for (const char* name : {"Mid", "High"}) {
        const CirPPModel m(env.cir.at(name), env.hazards.at(name));
        for (double T : {0.5, 1.0, 3.7, 10.0, 15.0}) {
            CHECK(m.survival0(T) == doctest::Approx(env.hazards.at(name)->survival(T)).epsilon(1e-12));
        }
        CHECK(m.survival(2.0, 2.0, 0.03) == doctest::Approx(1.0));
        // psi integrates to Psi
        const int n = 4000;
        double integral = 0.0;
        for (int k = 0; k < n; ++k) integral += m.shift((k + 0.5) * 3.0 / n) * 3.0 / n;
        CHECK(m.shift_integral(3.0) == doctest::Approx(integral).epsilon(1e-4));
    }
}

TEST_CASE("cir bond against the defining expectation") {
    const CirParams p{0.01, 0.8, 0.02, 0.2};
    CHECK(cir_bond(p, 0.0, 0.05) == 1.0);
    // deterministic limit: nu = 0 integrates the ODE
    const CirParams det{0.03, 0.5, 0.02, 0.0};
    const double tau = 3.0;
    const double integral = det.mu * tau + (det.y0 - det.mu) * (1.0 - std::exp(-det.kappa * tau)) / det.kappa;
    CHECK(cir_bond(det, tau, det.y0) == doctest::Approx(std::exp(-integral)).epsilon(1e-10));
}

TEST_CASE("monte carlo survival matches cir++ closed form") {
    const auto model = xva::test::model();
    const auto paths = simulate(model, 5.0, 20000);
    const std::size_t i = paths.grid.size() - 1;
    const auto sc = xva::test::sample(paths.n_paths, [&](std::size_t p) { return std::exp(-paths.int_lc[paths.at(i, p)]); });
    const auto si = xva::test::sample(paths.n_paths, [&](std::size_t p) { return std::exp(-paths.int_li[paths.at(i, p)]); });
    CHECK(std::abs(sc.mean - model.credit_c.survival0(5.0)) < 3.0 * sc.se);
    CHECK(std::abs(si.mean - model.credit_i.survival0(5.0)) < 3.0 * si.se);
}

TEST_CASE("driver correlations reproduce target rate-intensity correlations") {
    const G2Params p = environment().g2;
    for (double t : {-0.6, -0.3, 0.0, 0.3, 0.6}) {
        const auto spec = solve_driver_correlations(t, -0.5 * t, p);
        CHECK(spec.is_psd());
        CHECK(effective_correlation(spec, p, kWC) == doctest::Approx(t).epsilon(1e-12));
        CHECK(effective_correlation(spec, p, kWI) == doctest::Approx(-0.5 * t).epsilon(1e-12));
        CHECK(spec.m(kWC, kWI) == 0.0);
        CHECK(spec.m(kW1, kWC) == spec.m(kW2, kWC));
    }
    CHECK(max_attainable_correlation(p) >= 0.6);
    CHECK_THROWS_AS(solve_driver_correlations(1.5, 0.0, p), InputError);
}

TEST_CASE("correlation matrix validation") {
    CorrelationSpec s;
    s.m(0, 1) = 0.5;
    CHECK_THROWS_AS(s.validate(), InputError);
    s.m(1, 0) = 0.5;
    CHECK_NOTHROW(s.validate());
    s.m(0, 2) = s.m(2, 0) = 0.9;
    s.m(1, 2) = s.m(2, 1) = -0.9;
    CHECK_FALSE(s.is_psd());
}

TEST_CASE("g2 swaption price matches monte carlo") {
    const auto model = xva::test::model();
    const SwaptionSpec spec{2.0, 3.0, 1.0};
    const auto q = swap_quote(model.rates.curve(), spec);
    const double strike = q.forward;
    const double price = g2_swaption(model.rates, spec, strike, 1);
    const double receiver = g2_swaption(model.rates, spec, strike, -1);
    // Put-call parity at the forward.
    CHECK(price == doctest::Approx(receiver).epsilon(1e-8));

    const auto paths = simulate(model, 2.0, 40000);
    const std::size_t i = paths.grid.size() - 1;
    const auto s = xva::test::sample(paths.n_paths, [&](std::size_t p) {
        const double x1 = paths.x1[paths.at(i, p)], x2 = paths.x2[paths.at(i, p)];
        double annuity = 0.0;
        for (int k = 1; k <= 3; ++k) annuity += model.rates.zcb(2.0, 2.0 + k, x1, x2);
        const double payoff = 1.0 - model.rates.zcb(2.0, 5.0, x1, x2) - strike * annuity;
        return std::exp(-paths.int_e[paths.at(i, p)]) * std::max(payoff, 0.0);
    });
    CHECK(std::abs(s.mean - price) < 3.0 * s.se);
}

TEST_CASE("black formula round trip") {
    const SwapQuote q{0.03, 4.2};
    const double price = black_payer(q, q.forward, 0.25, 3.0);
    CHECK(black_atm_implied_vol(q, price, 3.0) == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(std::isnan(black_atm_implied_vol(q, 10.0, 3.0)));
}

TEST_CASE("synthetic calibration round trip") {
    const auto& env = environment();
    const G2Params truth{0.4, 0.04, 0.012, 0.009, -0.75};
    const G2Model m(truth, env.market.curve);
    const auto synthetic = g2_implied_surface(m, env.market.swaption_vols);
    const auto rep = calibrate_g2(synthetic, env.market.curve);
    CHECK(rep.rmse_vol < 1e-3);
    CHECK(rep.max_abs_error < 1e-3);
    const auto refit = g2_implied_surface(G2Model(rep.params, env.market.curve), synthetic);
    for (std::size_t e = 0; e < synthetic.expiries.size(); ++e) {
        for (std::size_t k = 0; k < synthetic.tenors.size(); ++k) {
            CHECK(std::abs(refit.vols[e][k] - synthetic.vols[e][k]) < 1e-3);
        }
    }
}

TEST_CASE("parameter serialization round trip") {
    const G2Params p{0.3, 0.02, 0.011, 0.007, -0.8};
    const auto q = g2_params_from_json(to_json(p));
    CHECK(q.a1 == p.a1);
    CHECK(q.rho == p.rho);
    const CirParams c{0.02, 0.5, 0.03, 0.1};
    CHECK(cir_params_from_json(to_json(c)).nu == c.nu);
    CHECK_THROWS_AS(g2_params_from_json(nlohmann::json{{"a1", 0.1}}), InputError);
}
