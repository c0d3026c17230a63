#pragma once

#include <string>

namespace xva {

/// Recoveries on the derivative (R) and on re-hypothecated collateral (R').
struct CreditConfig {
    double r_c = 0.4;
    double r_i = 0.4;
    double r_c_collateral = 0.4;
    double r_i_collateral = 0.4;
    bool rehypothecation = true;

    void validate() const;
    double lgd_c() const { return 1.0 - r_c; }
    double lgd_i() const { return 1.0 - r_i; }
    /// Collateral loss given default; zero when collateral is segregated.
    double lgd_c_collateral() const { return rehypothecation ? 1.0 - r_c_collateral : 0.0; }
    double lgd_i_collateral() const { return rehypothecation ? 1.0 - r_i_collateral : 0.0; }
};

struct ModifiedIntensities {
    double c;
    double i;
};

/// Intensities adjusted for the survivor defaulting within the margin period
/// of risk; survival_c and survival_i are D(t, t+delta; lambda^k).
ModifiedIntensities lambda_delta(double lambda_c, double lambda_i, double survival_c, double survival_i);

/// Who defaults first and whether the survivor follows within delta.
enum class DefaultOrdering { CFirstISurvives, CFirstIWithin, IFirstCSurvives, IFirstCWithin };

struct DefaultScenario {
    double eps;  // close-out amount at tau + delta
    double m;    // variation margin just before tau
    double nc;   // counterparty initial margin, >= 0
    double ni;   // investor initial margin, <= 0
    DefaultOrdering ordering = DefaultOrdering::CFirstISurvives;

    /// tau_C < tau_I + delta
    bool c_indicator() const { return ordering != DefaultOrdering::IFirstCSurvives; }
    /// tau_I < tau_C + delta
    bool i_indicator() const { return ordering != DefaultOrdering::CFirstISurvives; }
};

enum class CloseoutVariant { Explicit, Rehyp, NoRehyp, Ccp };

CloseoutVariant parse_closeout_variant(const std::string& s);

/// Close-out amount: replacement value minus CVA and DVA losses, margins
/// included. The Ccp variant ignores ni and charges the investor-default loss
/// on (eps - m)^- only.
double closeout_compact(const DefaultScenario& s, const CreditConfig& credit, CloseoutVariant variant);

/// The same quantity assembled branch by branch from the exchanged cash flows
/// plus the margin accounts held just before default. Reference
/// implementation for the compact forms.
double closeout_casewise(const DefaultScenario& s, const CreditConfig& credit);

/// Exchanged cash flow only (without adding back margin balances), for a
/// counterparty-first default.
double closeout_cashflow_c_first(double eps, double m, double nc, double ni, bool i_within, double r_c,
                                 double r_c_collateral, double r_i, double r_i_collateral);

}  // namespace xva
