#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "xva/models.hpp"
#include "xva/normal.hpp"

namespace xva {

void G2Params::validate() const {
    if (!(a1 > 0.0 && a2 > 0.0)) throw InputError("G2 mean reversions must be positive");
    if (!(sigma1 >= 0.0 && sigma2 >= 0.0)) throw InputError("G2 volatilities must be non-negative");
    if (!(rho >= -1.0 && rho <= 1.0)) throw InputError("G2 factor correlation must lie in [-1,1]");
}

G2Params G2Params::with_vol_multiplier(double m) const {
    G2Params out = *this;
    out.sigma1 *= m;
    out.sigma2 *= m;
    return out;
}

double g2_b(double a, double tau) {
    if (std::abs(a * tau) < 1e-12) return tau;
    return -std::expm1(-a * tau) / a;
}

G2Model::G2Model(G2Params params, YieldCurve curve) : p_(params), curve_(std::move(curve)) {
    p_.validate();
}

double G2Model::V(double tau) const {
    const auto& p = p_;
    auto term = [tau](double a) { return tau - 2.0 * g2_b(a, tau) + g2_b(2.0 * a, tau); };
    const double cross = tau - g2_b(p.a1, tau) - g2_b(p.a2, tau) + g2_b(p.a1 + p.a2, tau);
    return p.sigma1 * p.sigma1 / (p.a1 * p.a1) * term(p.a1) +
           p.sigma2 * p.sigma2 / (p.a2 * p.a2) * term(p.a2) +
           2.0 * p.rho * p.sigma1 * p.sigma2 / (p.a1 * p.a2) * cross;
}

double G2Model::log_a(double t, double T) const {
    return curve_.log_discount(T) - curve_.log_discount(t) + 0.5 * (V(T - t) - V(T) + V(t));
}

double G2Model::zcb(double t, double T, double x1, double x2) const {
    if (t > T) throw std::domain_error("zcb: t must not exceed T");
    if (t == T) return 1.0;
    const double tau = T - t;
    return std::exp(log_a(t, T) - g2_b(p_.a1, tau) * x1 - g2_b(p_.a2, tau) * x2);
}

double G2Model::phi_integral(double t, double h) const {
    return curve_.log_discount(t) - curve_.log_discount(t + h) + 0.5 * (V(t + h) - V(t));
}

Eigen::Matrix2d G2Model::state_covariance(double h) const {
    const double a[2] = {p_.a1, p_.a2};
    const double s[2] = {p_.sigma1, p_.sigma2};
    Eigen::Matrix2d c;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double r = i == j ? 1.0 : p_.rho;
            c(i, j) = s[i] * s[j] * r * g2_b(a[i] + a[j], h);
        }
    }
    return c;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> fixed_schedule(const SwaptionSpec& s) {
    std::vector<double> times;
    const int n = static_cast<int>(std::lround(s.tenor / s.fixed_period));
    for (int k = 1; k <= n; ++k) times.push_back(s.expiry + k * s.fixed_period);
    return times;
}

}  // namespace

SwapQuote swap_quote(const YieldCurve& curve, const SwaptionSpec& s) {
    double annuity = 0.0;
    double prev = s.expiry;
    for (double t : fixed_schedule(s)) {
        annuity += (t - prev) * curve.discount(t);
        prev = t;
    }
    const double fwd = (curve.discount(s.expiry) - curve.discount(prev)) / annuity;
    return {fwd, annuity};
}

double black_payer(const SwapQuote& q, double strike, double vol, double expiry) {
    const double sd = vol * std::sqrt(expiry);
    if (sd <= 0.0) return q.annuity * std::max(q.forward - strike, 0.0);
    const double d1 = (std::log(q.forward / strike) + 0.5 * sd * sd) / sd;
    return q.annuity * (q.forward * normal_cdf(d1) - strike * normal_cdf(d1 - sd));
}

double black_atm_vega(const SwapQuote& q, double vol, double expiry) {
    const double sq = std::sqrt(expiry);
    return q.annuity * q.forward * sq * normal_pdf(0.5 * vol * sq);
}

double black_atm_implied_vol(const SwapQuote& q, double price, double expiry) {
    const double u = 0.5 * (price / (q.annuity * q.forward) + 1.0);
    if (!(u > 0.5 && u < 1.0)) return std::numeric_limits<double>::quiet_NaN();
    return 2.0 * normal_quantile(u) / std::sqrt(expiry);
}

double g2_swaption(const G2Model& model, const SwaptionSpec& s, double strike, int omega) {
    const auto& p = model.params();
    const double T = s.expiry;
    const double a = p.a1, b = p.a2, s1 = p.sigma1, s2 = p.sigma2, r = p.rho;

    const double mu_x = -(s1 * s1 / (a * a) + r * s1 * s2 / (a * b)) * g2_b(a, T) * a +
                        s1 * s1 / (2.0 * a * a) * g2_b(2.0 * a, T) * 2.0 * a +
                        r * s1 * s2 / (b * (a + b)) * g2_b(a + b, T) * (a + b);
    const double mu_y = -(s2 * s2 / (b * b) + r * s1 * s2 / (a * b)) * g2_b(b, T) * b +
                        s2 * s2 / (2.0 * b * b) * g2_b(2.0 * b, T) * 2.0 * b +
                        r * s1 * s2 / (a * (a + b)) * g2_b(a + b, T) * (a + b);
    const double sx = s1 * std::sqrt(g2_b(2.0 * a, T));
    const double sy = s2 * std::sqrt(g2_b(2.0 * b, T));
    if (sx <= 0.0 || sy <= 0.0) {
        // Deterministic rates: intrinsic value on the forward curve.
        const auto q = swap_quote(model.curve(), s);
        return q.annuity * std::max(omega * (q.forward - strike), 0.0);
    }
    double rxy = r * s1 * s2 * g2_b(a + b, T) / (sx * sy);
    rxy = std::clamp(rxy, -0.999999999, 0.999999999);
    const double sq = std::sqrt(1.0 - rxy * rxy);

    const auto times = fixed_schedule(s);
    const std::size_t n = times.size();
    std::vector<double> c(n), lnA(n), Ba(n), Bb(n);
    double prev = T;
    for (std::size_t i = 0; i < n; ++i) {
        c[i] = strike * (times[i] - prev);
        prev = times[i];
        lnA[i] = model.log_a(T, times[i]);
        Ba[i] = g2_b(a, times[i] - T);
        Bb[i] = g2_b(b, times[i] - T);
    }
    c[n - 1] += 1.0;

    std::vector<double> w(n);
    auto integrand = [&](double u) {
        const double x = mu_x + sx * u;
        for (std::size_t i = 0; i < n; ++i) w[i] = c[i] * std::exp(lnA[i] - Ba[i] * x);
        // Solve sum_i w_i exp(-Bb_i y) = 1 by Newton on the (convex) log-sum.
        double y = 0.0;
        for (int it = 0; it < 100; ++it) {
            double sum = 0.0, dsum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double e = w[i] * std::exp(-Bb[i] * y);
                sum += e;
                dsum -= Bb[i] * e;
            }
            const double step = std::log(sum) / (dsum / sum);
            y -= step;
            if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(y))) break;
        }
        const double h1 = (y - mu_y) / (sy * sq) - rxy * (x - mu_x) / (sx * sq);
        double acc = normal_cdf(-omega * h1);
        for (std::size_t i = 0; i < n; ++i) {
            const double h2 = h1 + Bb[i] * sy * sq;
            const double kappa = -Bb[i] * (mu_y - 0.5 * (1.0 - rxy * rxy) * sy * sy * Bb[i] +
                                           rxy * sy * (x - mu_x) / sx);
            acc -= w[i] * std::exp(kappa) * normal_cdf(-omega * h2);
        }
        return omega * acc * normal_pdf(u);
    };
    const double value = boost::math::quadrature::gauss<double, 40>::integrate(integrand, -9.0, 9.0);
    return model.curve().discount(T) * value;
}

SwaptionVolSurface g2_implied_surface(const G2Model& model, const SwaptionVolSurface& like) {
    SwaptionVolSurface out = like;
    for (std::size_t i = 0; i < like.expiries.size(); ++i) {
        for (std::size_t j = 0; j < like.tenors.size(); ++j) {
            const SwaptionSpec spec{like.expiries[i], like.tenors[j]};
            const auto q = swap_quote(model.curve(), spec);
            const double price = g2_swaption(model, spec, q.forward, 1);
            out.vols[i][j] = black_atm_implied_vol(q, price, spec.expiry);
        }
    }
    return out;
}

}  // namespace xva
