#pragma once

#include <chrono>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace xva {

/// Raised when market or configuration input is malformed.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a CDS curve cannot be stripped with non-negative hazard rates.
class ArbitrageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Date = std::chrono::year_month_day;

Date parse_iso_date(const std::string& text);

/// ACT/360 year fraction from `from` to `to`.
double act360(const Date& from, const Date& to);

struct RatePillar {
    double time;       // ACT/360 year fraction from the anchor date
    double zero_rate;  // continuously compounded
};

/// Zero curve with log-linear discount interpolation between pillars and flat
/// zero-rate extrapolation before the first and beyond the last pillar.
class YieldCurve {
public:
    YieldCurve() = default;
    YieldCurve(Date anchor, std::vector<RatePillar> pillars);

    static YieldCurve flat(double rate, double horizon = 100.0);

    double discount(double t) const;
    double log_discount(double t) const;
    double zero_rate(double t) const;
    /// Instantaneous forward (piecewise constant), right-continuous.
    double forward(double t) const;

    const std::vector<RatePillar>& pillars() const { return pillars_; }
    const Date& anchor() const { return anchor_; }

private:
    Date anchor_{};
    std::vector<RatePillar> pillars_;
};

/// Builds a curve from dated pillars. Dates must be strictly increasing and
/// not before the anchor; rates must be finite.
YieldCurve build_yield_curve(const Date& anchor,
                             std::span<const std::pair<Date, double>> raw_pillars);

/// ATM swaption Black volatilities on an expiry x tenor grid.
struct SwaptionVolSurface {
    std::vector<double> expiries;  // years
    std::vector<double> tenors;    // years
    std::vector<std::vector<double>> vols;  // vols[expiry][tenor], decimal

    void validate() const;
    std::size_t size() const { return expiries.size() * tenors.size(); }
};

struct CdsCurve {
    std::string name;
    std::vector<double> maturities;  // years
    std::vector<double> spreads_bp;
    double recovery = 0.4;

    void validate() const;
};

/// Deterministic hazard term structure. Implementations must provide the
/// integrated hazard H(t) = int_0^t h(u) du; the pointwise hazard is used
/// for diagnostics only.
class HazardTermStructure {
public:
    virtual ~HazardTermStructure() = default;
    virtual double integrated(double t) const = 0;
    virtual double hazard(double t) const = 0;
    double survival(double t) const;
};

/// Piecewise-constant hazard, flat beyond the last knot.
class PiecewiseHazard final : public HazardTermStructure {
public:
    PiecewiseHazard(std::vector<double> knots, std::vector<double> hazards);

    double integrated(double t) const override;
    double hazard(double t) const override;

    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& hazards() const { return hazards_; }

private:
    std::vector<double> knots_;    // interval right ends, strictly increasing
    std::vector<double> hazards_;  // hazard on (knots_[i-1], knots_[i]]
};

struct CdsConventions {
    int premium_frequency = 4;  // payments per year
};

/// Present values of the two legs of a unit-notional CDS. Both legs are
/// integrated exactly on intervals where forward rate and hazard are constant.
struct CdsLegs {
    double premium_annuity;  // sum of accrual * P * Q, per unit spread
    double protection;       // (1-R) int P dQ
};

CdsLegs cds_legs(const PiecewiseHazard& hazard, const YieldCurve& curve,
                 double maturity, double recovery, const CdsConventions& conv = {});

/// Strips a piecewise-constant hazard reproducing every quoted spread.
PiecewiseHazard bootstrap_hazard(const CdsCurve& cds, const YieldCurve& curve,
                                 const CdsConventions& conv = {});

struct MarketData {
    YieldCurve curve;
    SwaptionVolSurface swaption_vols;
    std::vector<CdsCurve> cds_curves;

    const CdsCurve& cds(const std::string& name) const;
};

MarketData market_data_from_json(const nlohmann::json& doc);
MarketData load_market_data(const std::filesystem::path& file);

}  // namespace xva
