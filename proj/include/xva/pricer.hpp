#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xva/credit.hpp"
#include "xva/exposure.hpp"
#include "xva/simulation.hpp"

namespace xva {

/// Which party computes the price. Every reported number is in that party's
/// own sign, and the trade direction is as seen by that party.
enum class Perspective { Investor, Counterparty };

Perspective parse_perspective(const std::string& s);
std::string to_string(Perspective p);

/// Liquidity bases over the overnight rate, proportional to the calculating
/// party's intensity: l+ = beta_plus * lambda, l- = beta_minus * lambda.
struct FundingConfig {
    double beta_plus = 0.0;
    double beta_minus = 0.0;
    Perspective perspective = Perspective::Investor;

    void validate() const;
};

struct PricingConfig {
    std::string label;
    TradeSpec trade;
    MarginConfig margin;
    CreditConfig credit;
    FundingConfig funding;
    /// Price the mirrored position: every integrand negated, funding kept
    /// nonlinear. Used for bid-ask spreads.
    bool short_position = false;

    void validate() const;
};

struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

/// Price decomposition per unit notional (currency units; multiply by 1e4
/// for basis points). total = mtm + cva + dva + mva + fva.
struct ValuationResult {
    std::string label;
    Estimate mtm, cva, dva, mva, fva, total;
    /// Funding-cost-free adjustment (cva + dva + mva) from the backward
    /// regression scheme, for cross-checking the forward estimate.
    Estimate v0_adjustment_backward;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
};

struct PricingOptions {
    int threads = 1;
    int batches = 20;             // batch means for standard errors
    bool backward_check = false;  // also run the regression-based V0 scheme
};

/// Prices every config on the same paths with one backward sweep. The
/// grid must contain every trade's schedule dates.
std::vector<ValuationResult> price(const HybridModel& model, const PathSet& paths,
                                   const std::vector<PricingConfig>& configs, const PricingOptions& opt = {});

/// Pathwise FVA process at time 0 for one config (for the null test).
std::vector<double> fva_pathwise(const HybridModel& model, const PathSet& paths, const PricingConfig& config,
                                 int threads = 1);

/// long + short total for the same trade; zero when beta_plus == beta_minus.
Estimate long_plus_short(const HybridModel& model, const PathSet& paths, PricingConfig config,
                         const PricingOptions& opt = {});

/// Expected positive/negative exposure and initial margin statistics.
struct ProfilePoint {
    double t;
    double epe;  // E[eps^+]
    double ene;  // E[eps^-]
    double im_mean;
    double im_p05, im_p50, im_p95;
};

std::vector<ProfilePoint> exposure_profile(const HybridModel& model, const PathSet& paths,
                                           const PricingConfig& config, int threads = 1);

/// Standard error of the mean by batch means over contiguous path batches.
Estimate batch_mean(const std::vector<double>& values, int batches);

}  // namespace xva
