#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

namespace xva {

inline double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// Standard normal quantile. Throws for p outside (0,1).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("normal_quantile: probability must lie in (0,1)");
    }
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

/// E[(Z - k)^+] for Z ~ N(0, nu^2) (Bachelier call at strike k).
inline double bachelier_call(double k, double nu) {
    if (nu <= 0.0) return k < 0.0 ? -k : 0.0;
    const double d = k / nu;
    return nu * normal_pdf(d) - k * normal_cdf(-d);
}

/// E[min(Z - k, 0)] for Z ~ N(0, nu^2). Always <= 0.
inline double bachelier_put_negative(double k, double nu) {
    // E[Z - k] = -k and (Z-k) = (Z-k)^+ + (Z-k)^-
    return -k - bachelier_call(k, nu);
}

}  // namespace xva
