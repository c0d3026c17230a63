#include "xva/credit.hpp"

#include <algorithm>

#include "xva/marketdata.hpp"

namespace xva {

namespace {
double pos(double x) { return std::max(x, 0.0); }
double neg(double x) { return std::min(x, 0.0); }
}  // namespace

void CreditConfig::validate() const {
    auto in_unit = [](double r) { return r >= 0.0 && r <= 1.0; };
    if (!in_unit(r_c) || !in_unit(r_i) || !in_unit(r_c_collateral) || !in_unit(r_i_collateral)) {
        throw InputError("recoveries must lie in [0,1]");
    }
    if (r_c > r_c_collateral || r_i > r_i_collateral) {
        throw InputError("collateral recovery must not be below the derivative recovery");
    }
}

ModifiedIntensities lambda_delta(double lambda_c, double lambda_i, double survival_c, double survival_i) {
    return {lambda_c + lambda_i * (1.0 - survival_c), lambda_i + lambda_c * (1.0 - survival_i)};
}

CloseoutVariant parse_closeout_variant(const std::string& s) {
    if (s == "explicit") return CloseoutVariant::Explicit;
    if (s == "rehyp") return CloseoutVariant::Rehyp;
    if (s == "norehyp") return CloseoutVariant::NoRehyp;
    if (s == "ccp") return CloseoutVariant::Ccp;
    throw InputError("unknown close-out variant '" + s + "'");
}

double closeout_compact(const DefaultScenario& s, const CreditConfig& cr, CloseoutVariant variant) {
    const double c = s.c_indicator() ? 1.0 : 0.0;
    const double i = s.i_indicator() ? 1.0 : 0.0;
    const double e = s.eps, m = s.m;
    switch (variant) {
        case CloseoutVariant::Explicit:
            return e - c * cr.lgd_c() * pos(pos(e - s.nc) - pos(m)) -
                   c * cr.lgd_c_collateral() * pos(neg(e - s.nc) - neg(m)) -
                   i * cr.lgd_i() * neg(neg(e - s.ni) - neg(m)) -
                   i * cr.lgd_i_collateral() * neg(pos(e - s.ni) - pos(m));
        case CloseoutVariant::Rehyp:
            return e - c * cr.lgd_c() * pos(e - s.nc - m) - i * cr.lgd_i() * neg(e - s.ni - m);
        case CloseoutVariant::NoRehyp:
            return e - c * cr.lgd_c() * pos(pos(e - s.nc) - pos(m)) - i * cr.lgd_i() * neg(neg(e - s.ni) - neg(m));
        case CloseoutVariant::Ccp:
            return e - c * cr.lgd_c() * pos(e - s.nc - m) - i * cr.lgd_i() * neg(e - m);
    }
    return e;
}

double closeout_cashflow_c_first(double e, double m, double nc, double ni, bool i_within, double r_c,
                                 double rc_col, double r_i, double ri_col) {
    const double gap = e - m;
    if (e >= 0.0 && m >= 0.0) {
        if (gap >= nc) return r_c * (e - m - nc) - ni;
        if (gap >= 0.0) return e - m - nc - ni;
        if (!i_within) return e - m - nc - ni;
        const double x = e - m - ni;
        return pos(x) + ri_col * neg(x) - nc;
    }
    if (e >= 0.0) {  // m < 0
        if (e >= nc) return r_c * (e - nc) - rc_col * m - ni;
        const double x = e - m - nc;
        return neg(x) + rc_col * pos(x) - ni;
    }
    if (m >= 0.0) {  // e < 0
        if (!i_within) return e - m - nc - ni;
        const double a = pos(e - ni) - m;
        return r_i * neg(e - ni) + ri_col * neg(a) + pos(a) - nc;
    }
    // e < 0, m < 0
    if (gap >= nc) return rc_col * (e - m - nc) - ni;
    if (gap >= 0.0) return e - m - nc - ni;
    if (!i_within) return e - m - nc - ni;
    const double x = e - m - ni;
    return pos(x) + r_i * neg(x) - nc;
}

double closeout_casewise(const DefaultScenario& s, const CreditConfig& cr) {
    const double rc_col = 1.0 - cr.lgd_c_collateral();
    const double ri_col = 1.0 - cr.lgd_i_collateral();
    switch (s.ordering) {
        case DefaultOrdering::CFirstISurvives:
        case DefaultOrdering::CFirstIWithin: {
            const bool within = s.ordering == DefaultOrdering::CFirstIWithin;
            return closeout_cashflow_c_first(s.eps, s.m, s.nc, s.ni, within, cr.r_c, rc_col, cr.r_i, ri_col) + s.m +
                   s.nc + s.ni;
        }
        case DefaultOrdering::IFirstCSurvives:
        case DefaultOrdering::IFirstCWithin: {
            // Same procedure with the names exchanged and every sign flipped.
            const bool within = s.ordering == DefaultOrdering::IFirstCWithin;
            const double flow =
                closeout_cashflow_c_first(-s.eps, -s.m, -s.ni, -s.nc, within, cr.r_i, ri_col, cr.r_c, rc_col);
            return -flow + s.m + s.nc + s.ni;
        }
    }
    return s.eps;
}

}  // namespace xva
