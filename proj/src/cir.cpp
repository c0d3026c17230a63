#include <algorithm>
#include <cmath>

#include "xva/models.hpp"

namespace xva {

void CirParams::validate() const {
    if (!(y0 >= 0.0 && kappa >= 0.0 && mu >= 0.0 && nu >= 0.0)) {
        throw InputError("CIR parameters must be non-negative");
    }
}

namespace {

constexpr double kTinyNu = 1e-8;

// Integral of the deterministic ODE solution dy = kappa (mu - y) dt.
double deterministic_integral(const CirParams& p, double tau, double y) {
    if (p.kappa * tau < 1e-12) return y * tau;
    return p.mu * tau + (y - p.mu) * (-std::expm1(-p.kappa * tau)) / p.kappa;
}

}  // namespace

double cir_bond(const CirParams& p, double tau, double y) {
    if (tau <= 0.0) return 1.0;
    if (p.nu < kTinyNu) return std::exp(-deterministic_integral(p, tau, y));
    const double k = p.kappa, nu2 = p.nu * p.nu;
    const double h = std::sqrt(k * k + 2.0 * nu2);
    const double em1 = std::expm1(h * tau);
    const double denom = 2.0 * h + (k + h) * em1;
    // ln A = (2 k mu / nu^2) ln(2h exp((k+h) tau / 2) / denom)
    const double ln_a = 2.0 * k * p.mu / nu2 * (std::log(2.0 * h) + 0.5 * (k + h) * tau - std::log(denom));
    const double b = 2.0 * em1 / denom;
    return std::exp(ln_a - b * y);
}

double cir_forward_intensity(const CirParams& p, double T) {
    if (p.nu < kTinyNu) {
        if (p.kappa * T < 1e-12) return p.y0;
        return p.mu + (p.y0 - p.mu) * std::exp(-p.kappa * T);
    }
    const double k = p.kappa, nu2 = p.nu * p.nu;
    const double h = std::sqrt(k * k + 2.0 * nu2);
    const double e = std::exp(h * T);
    const double denom = 2.0 * h + (k + h) * (e - 1.0);
    const double dln_a = 2.0 * k * p.mu / nu2 * (0.5 * (k + h) - (k + h) * h * e / denom);
    const double db = 4.0 * h * h * e / (denom * denom);
    return -dln_a + db * p.y0;
}

CirPPModel::CirPPModel(CirParams params, std::shared_ptr<const HazardTermStructure> market)
    : p_(params), market_(std::move(market)) {
    p_.validate();
    if (!market_) throw InputError("CIR++ model needs a market hazard curve");
}

double CirPPModel::shift_integral(double T) const {
    if (T <= 0.0) return 0.0;
    return market_->integrated(T) + std::log(cir_bond(p_, T, p_.y0));
}

double CirPPModel::shift(double t) const { return market_->hazard(t) - cir_forward_intensity(p_, t); }

double CirPPModel::survival(double t, double T, double y_t) const {
    if (T <= t) return 1.0;
    const double y = std::max(y_t, 0.0);
    return cir_bond(p_, T - t, y) * std::exp(-(shift_integral(T) - shift_integral(t)));
}

double CirPPModel::min_shift(double horizon, int samples) const {
    double lo = shift(0.0);
    for (int i = 1; i <= samples; ++i) lo = std::min(lo, shift(horizon * i / samples));
    return lo;
}

}  // namespace xva
