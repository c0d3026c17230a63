#include "xva/marketdata.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include <boost/math/tools/roots.hpp>

namespace xva {

Date parse_iso_date(const std::string& text) {
    int y = 0;
    unsigned m = 0, d = 0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail) != 3) {
        throw InputError("invalid ISO date '" + text + "'");
    }
    Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!date.ok()) throw InputError("invalid calendar date '" + text + "'");
    return date;
}

double act360(const Date& from, const Date& to) {
    const auto days = (std::chrono::sys_days{to} - std::chrono::sys_days{from}).count();
    return static_cast<double>(days) / 360.0;
}

// ---------------------------------------------------------------------------
// YieldCurve

YieldCurve::YieldCurve(Date anchor, std::vector<RatePillar> pillars)
    : anchor_(anchor), pillars_(std::move(pillars)) {
    if (pillars_.empty()) throw InputError("yield curve needs at least one pillar");
    for (std::size_t i = 0; i < pillars_.size(); ++i) {
        if (!std::isfinite(pillars_[i].time) || !std::isfinite(pillars_[i].zero_rate)) {
            throw InputError("yield curve pillar is not finite");
        }
        if (pillars_[i].time <= 0.0) throw InputError("yield curve pillar time must be positive");
        if (i > 0 && pillars_[i].time <= pillars_[i - 1].time) {
            throw InputError("yield curve pillar times must be strictly increasing");
        }
    }
}

YieldCurve YieldCurve::flat(double rate, double horizon) {
    return YieldCurve(Date{}, {{horizon, rate}});
}

double YieldCurve::log_discount(double t) const {
    if (t <= 0.0) return 0.0;
    const auto& p = pillars_;
    if (t <= p.front().time) return -p.front().zero_rate * t;
    if (t >= p.back().time) return -p.back().zero_rate * t;
    auto it = std::upper_bound(p.begin(), p.end(), t,
                               [](double x, const RatePillar& q) { return x < q.time; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double w = (t - lo.time) / (hi.time - lo.time);
    const double l0 = -lo.zero_rate * lo.time;
    const double l1 = -hi.zero_rate * hi.time;
    return l0 + w * (l1 - l0);
}

double YieldCurve::discount(double t) const { return std::exp(log_discount(t)); }

double YieldCurve::zero_rate(double t) const {
    if (t <= 0.0) return pillars_.front().zero_rate;
    return -log_discount(t) / t;
}

double YieldCurve::forward(double t) const {
    const auto& p = pillars_;
    if (t < p.front().time) return p.front().zero_rate;
    if (t >= p.back().time) return p.back().zero_rate;
    auto it = std::upper_bound(p.begin(), p.end(), t,
                               [](double x, const RatePillar& q) { return x < q.time; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    return (hi.zero_rate * hi.time - lo.zero_rate * lo.time) / (hi.time - lo.time);
}

YieldCurve build_yield_curve(const Date& anchor,
                             std::span<const std::pair<Date, double>> raw_pillars) {
    std::vector<RatePillar> pillars;
    pillars.reserve(raw_pillars.size());
    for (std::size_t i = 0; i < raw_pillars.size(); ++i) {
        const auto& [date, rate] = raw_pillars[i];
        if (!date.ok()) throw InputError("invalid pillar date");
        if (i > 0 && !(raw_pillars[i - 1].first < date)) {
            throw InputError("yield pillar dates must be strictly increasing");
        }
        const double t = act360(anchor, date);
        if (t < 0.0) throw InputError("yield pillar date precedes the anchor date");
        if (!std::isfinite(rate)) throw InputError("yield pillar rate is not finite");
        if (t == 0.0) continue;  // discount(0) = 1 regardless of the quoted rate
        pillars.push_back({t, rate});
    }
    return YieldCurve(anchor, std::move(pillars));
}

// ---------------------------------------------------------------------------
// Vol surface and CDS quotes

void SwaptionVolSurface::validate() const {
    if (expiries.empty() || tenors.empty()) throw InputError("empty swaption grid");
    if (vols.size() != expiries.size()) throw InputError("swaption grid is not rectangular");
    for (const auto& row : vols) {
        if (row.size() != tenors.size()) throw InputError("swaption grid is not rectangular");
        for (double v : row) {
            if (!(v > 0.0) || !std::isfinite(v)) throw InputError("swaption vols must be positive");
        }
    }
    for (double e : expiries) {
        if (!(e > 0.0)) throw InputError("swaption expiry must be positive");
    }
    for (double b : tenors) {
        if (!(b > 0.0)) throw InputError("swaption tenor must be positive");
    }
}

void CdsCurve::validate() const {
    if (maturities.empty() || maturities.size() != spreads_bp.size()) {
        throw InputError("CDS curve '" + name + "': maturities and spreads differ in size");
    }
    for (std::size_t i = 0; i < maturities.size(); ++i) {
        if (!(maturities[i] > 0.0)) throw InputError("CDS curve '" + name + "': maturity must be positive");
        if (i > 0 && maturities[i] <= maturities[i - 1]) {
            throw InputError("CDS curve '" + name + "': maturities must be strictly increasing");
        }
        if (!(spreads_bp[i] > 0.0)) throw InputError("CDS curve '" + name + "': spreads must be positive");
    }
    if (!(recovery >= 0.0 && recovery < 1.0)) {
        throw InputError("CDS curve '" + name + "': recovery must lie in [0,1)");
    }
}

// ---------------------------------------------------------------------------
// Hazard curves

double HazardTermStructure::survival(double t) const { return std::exp(-integrated(t)); }

PiecewiseHazard::PiecewiseHazard(std::vector<double> knots, std::vector<double> hazards)
    : knots_(std::move(knots)), hazards_(std::move(hazards)) {
    if (knots_.empty() || knots_.size() != hazards_.size()) {
        throw InputError("piecewise hazard: knots and hazards differ in size");
    }
}

double PiecewiseHazard::integrated(double t) const {
    double acc = 0.0, left = 0.0;
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        if (t <= knots_[i]) return acc + hazards_[i] * (t - left);
        acc += hazards_[i] * (knots_[i] - left);
        left = knots_[i];
    }
    return acc + hazards_.back() * (t - left);
}

double PiecewiseHazard::hazard(double t) const {
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        if (t < knots_[i]) return hazards_[i];
    }
    return hazards_.back();
}

CdsLegs cds_legs(const PiecewiseHazard& hazard, const YieldCurve& curve, double maturity,
                 double recovery, const CdsConventions& conv) {
    CdsLegs legs{0.0, 0.0};

    // Premium leg: regular schedule, short stub at the front if needed.
    const double step = 1.0 / conv.premium_frequency;
    const long n = std::max(1L, std::lround(std::ceil(maturity / step - 1e-9)));
    for (long k = n - 1; k >= 0; --k) {
        const double pay = maturity - static_cast<double>(n - 1 - k) * step;
        const double start = std::max(0.0, pay - step);
        legs.premium_annuity += (pay - start) * curve.discount(pay) * hazard.survival(pay);
    }

    // Protection leg on the union of curve and hazard breakpoints.
    std::set<double> cuts{0.0, maturity};
    for (const auto& p : curve.pillars()) {
        if (p.time < maturity) cuts.insert(p.time);
    }
    for (double k : hazard.knots()) {
        if (k < maturity) cuts.insert(k);
    }
    double prot = 0.0;
    for (auto it = cuts.begin(); std::next(it) != cuts.end(); ++it) {
        const double a = *it, b = *std::next(it);
        const double mid = 0.5 * (a + b);
        const double f = curve.forward(mid);
        const double h = hazard.hazard(mid);
        const double start = curve.discount(a) * hazard.survival(a);
        const double g = f + h;
        const double len = b - a;
        // int_a^b h exp(-g (u-a)) du
        const double integral = std::abs(g * len) < 1e-12 ? h * len : h * (-std::expm1(-g * len)) / g;
        prot += start * integral;
    }
    legs.protection = (1.0 - recovery) * prot;
    return legs;
}

PiecewiseHazard bootstrap_hazard(const CdsCurve& cds, const YieldCurve& curve,
                                 const CdsConventions& conv) {
    cds.validate();
    std::vector<double> knots, hazards;
    for (std::size_t j = 0; j < cds.maturities.size(); ++j) {
        const double spread = cds.spreads_bp[j] * 1e-4;
        const double maturity = cds.maturities[j];
        knots.push_back(maturity);
        hazards.push_back(0.0);
        auto residual = [&](double h) {
            hazards.back() = h;
            PiecewiseHazard trial(knots, hazards);
            const auto legs = cds_legs(trial, curve, maturity, cds.recovery, conv);
            return spread * legs.premium_annuity - legs.protection;
        };
        const double at_zero = residual(0.0);
        if (at_zero < 0.0) {
            throw ArbitrageError("CDS curve '" + cds.name + "': negative hazard required at maturity " +
                                 std::to_string(maturity));
        }
        double hi = std::max(1e-4, 2.0 * spread / (1.0 - cds.recovery));
        while (residual(hi) > 0.0) {
            hi *= 2.0;
            if (hi > 1e3) throw ArbitrageError("CDS curve '" + cds.name + "': hazard bracket failed");
        }
        double root = 0.0;
        if (at_zero > 0.0) {
            std::uintmax_t iters = 200;
            auto tol = [](double a, double b) { return std::abs(a - b) <= 1e-15 * std::max(1.0, std::abs(a)); };
            const auto [lo_b, hi_b] = boost::math::tools::toms748_solve(residual, 0.0, hi, tol, iters);
            root = 0.5 * (lo_b + hi_b);
        }
        hazards.back() = root;
    }
    return PiecewiseHazard(std::move(knots), std::move(hazards));
}

// ---------------------------------------------------------------------------
// JSON

const CdsCurve& MarketData::cds(const std::string& name) const {
    for (const auto& c : cds_curves) {
        if (c.name == name) return c;
    }
    throw InputError("unknown CDS curve '" + name + "'");
}

namespace {

template <typename T>
T required(const nlohmann::json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw InputError(where + ": missing field '" + key + "'");
    }
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InputError(where + ": field '" + key + "' has the wrong type");
    }
}

}  // namespace

MarketData market_data_from_json(const nlohmann::json& doc) {
    MarketData md;
    const Date anchor = parse_iso_date(required<std::string>(doc, "anchor_date", "market data"));

    std::vector<std::pair<Date, double>> raw;
    if (!doc.contains("yield_pillars") || !doc["yield_pillars"].is_array()) {
        throw InputError("market data: missing array 'yield_pillars'");
    }
    for (const auto& p : doc["yield_pillars"]) {
        raw.emplace_back(parse_iso_date(required<std::string>(p, "date", "yield_pillars")),
                         required<double>(p, "rate", "yield_pillars"));
    }
    md.curve = build_yield_curve(anchor, raw);

    if (!doc.contains("swaption_vols") || !doc["swaption_vols"].is_array()) {
        throw InputError("market data: missing array 'swaption_vols'");
    }
    std::set<double> expiries, tenors;
    std::vector<std::tuple<double, double, double>> quotes;
    for (const auto& q : doc["swaption_vols"]) {
        const double e = required<double>(q, "expiry", "swaption_vols");
        const double b = required<double>(q, "tenor", "swaption_vols");
        quotes.emplace_back(e, b, required<double>(q, "vol", "swaption_vols"));
        expiries.insert(e);
        tenors.insert(b);
    }
    auto& s = md.swaption_vols;
    s.expiries.assign(expiries.begin(), expiries.end());
    s.tenors.assign(tenors.begin(), tenors.end());
    s.vols.assign(s.expiries.size(), std::vector<double>(s.tenors.size(), -1.0));
    for (const auto& [e, b, v] : quotes) {
        const auto i = std::distance(expiries.begin(), expiries.find(e));
        const auto j = std::distance(tenors.begin(), tenors.find(b));
        s.vols[i][j] = v;
    }
    if (quotes.size() != s.size()) throw InputError("swaption_vols: duplicate grid entries");
    s.validate();

    if (!doc.contains("cds_curves") || !doc["cds_curves"].is_array()) {
        throw InputError("market data: missing array 'cds_curves'");
    }
    for (const auto& c : doc["cds_curves"]) {
        CdsCurve curve;
        curve.name = required<std::string>(c, "name", "cds_curves");
        curve.maturities = required<std::vector<double>>(c, "maturities", "cds_curves");
        curve.spreads_bp = required<std::vector<double>>(c, "spreads_bp", "cds_curves");
        curve.recovery = required<double>(c, "recovery", "cds_curves");
        curve.validate();
        md.cds_curves.push_back(std::move(curve));
    }
    return md;
}

MarketData load_market_data(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw InputError("cannot open market data file " + file.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError("market data " + file.string() + ": " + e.what());
    }
    return market_data_from_json(doc);
}

}  // namespace xva
