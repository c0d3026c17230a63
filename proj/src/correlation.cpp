#include <cmath>

#include "xva/models.hpp"

namespace xva {

CorrelationSpec CorrelationSpec::from_g2(const G2Params& p) {
    CorrelationSpec c;
    c.m(kW1, kW2) = c.m(kW2, kW1) = p.rho;
    return c;
}

bool CorrelationSpec::is_psd() const {
    // Cholesky of the matrix itself can fail on exactly singular but valid
    // matrices (e.g. |rho12| = 1); allow a tiny diagonal nudge.
    Eigen::Matrix4d a = m + 1e-13 * Eigen::Matrix4d::Identity();
    Eigen::LLT<Eigen::Matrix4d> llt(a);
    return llt.info() == Eigen::Success;
}

void CorrelationSpec::validate() const {
    for (int i = 0; i < 4; ++i) {
        if (std::abs(m(i, i) - 1.0) > 1e-12) throw InputError("correlation matrix needs a unit diagonal");
        for (int j = 0; j < 4; ++j) {
            if (std::abs(m(i, j) - m(j, i)) > 1e-12) throw InputError("correlation matrix is not symmetric");
            if (std::abs(m(i, j)) > 1.0) throw InputError("correlation entry outside [-1,1]");
        }
    }
    if (!is_psd()) throw InputError("correlation matrix is not positive semidefinite");
}

namespace {

double rate_sd(const G2Params& p) {
    const double v = p.sigma1 * p.sigma1 + p.sigma2 * p.sigma2 + 2.0 * p.rho * p.sigma1 * p.sigma2;
    if (!(v > 0.0)) throw InputError("short-rate instantaneous variance is zero");
    return std::sqrt(v);
}

}  // namespace

double effective_correlation(const CorrelationSpec& corr, const G2Params& p, int k) {
    const double num = p.sigma1 * corr.m(kW1, k) + p.sigma2 * corr.m(kW2, k);
    return num / rate_sd(p);
}

namespace {

CorrelationSpec build(double target_c, double target_i, const G2Params& p) {
    const double scale = rate_sd(p) / (p.sigma1 + p.sigma2);
    CorrelationSpec c = CorrelationSpec::from_g2(p);
    const double rc = target_c * scale, ri = target_i * scale;
    c.m(kW1, kWC) = c.m(kWC, kW1) = c.m(kW2, kWC) = c.m(kWC, kW2) = rc;
    c.m(kW1, kWI) = c.m(kWI, kW1) = c.m(kW2, kWI) = c.m(kWI, kW2) = ri;
    return c;
}

}  // namespace

double max_attainable_correlation(const G2Params& p, double dir_c, double dir_i) {
    double lo = 0.0, hi = 1.0;
    if (build(hi * dir_c, hi * dir_i, p).is_psd()) return hi;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (build(mid * dir_c, mid * dir_i, p).is_psd() ? lo : hi) = mid;
    }
    return lo;
}

CorrelationSpec solve_driver_correlations(double target_c, double target_i, const G2Params& p) {
    if (std::abs(target_c) > 1.0 || std::abs(target_i) > 1.0) {
        throw InputError("target correlation outside [-1,1]");
    }
    CorrelationSpec c = build(target_c, target_i, p);
    if (!c.is_psd()) {
        const double norm = std::max(std::abs(target_c), std::abs(target_i));
        const double lim = max_attainable_correlation(p, target_c / norm, target_i / norm);
        throw InputError("target correlation unattainable; maximum attainable magnitude is " +
                         std::to_string(lim));
    }
    return c;
}

}  // namespace xva
