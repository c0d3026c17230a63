#pragma once

#include <string>
#include <vector>

#include "xva/models.hpp"
#include "xva/simulation.hpp"

namespace xva {

enum class Direction { Payer, Receiver };

Direction parse_direction(const std::string& s);
std::string to_string(Direction d);
inline Direction flip(Direction d) { return d == Direction::Payer ? Direction::Receiver : Direction::Payer; }

/// Vanilla fixed-vs-float swap on unit-free model time (year fractions).
struct TradeSpec {
    Direction direction = Direction::Receiver;
    double maturity = 10.0;
    double fixed_rate = 0.0;
    double notional = 1.0;
    double fixed_period = 1.0;
    double float_period = 0.5;

    void validate() const;
    /// +1 for a receiver (fixed minus float), -1 for a payer.
    double sign() const { return direction == Direction::Receiver ? 1.0 : -1.0; }
    std::vector<double> fixed_dates() const;
    /// Float payment dates; period k resets at float_dates()[k] - float_period.
    std::vector<double> float_dates() const;
    /// Every date that must lie on a simulation grid (resets and payments).
    std::vector<double> schedule_dates() const;
};

/// Fixed rate giving zero value at time 0 (root-found on the t=0 exposure).
double par_rate(const G2Model& model, TradeSpec trade);

/// Pathwise swap valuation under G2++. A cash flow paid exactly at t is
/// treated as already settled.
class SwapValuer {
public:
    SwapValuer(const G2Model& model, TradeSpec trade);

    struct Value {
        double pv;
        double d_x1;  // derivative of pv with respect to x1
        double d_x2;
    };

    const TradeSpec& trade() const { return trade_; }
    std::size_t n_float() const { return float_pay_.size(); }
    double reset_time(std::size_t k) const { return float_pay_[k] - trade_.float_period; }
    double pay_time(std::size_t k) const { return float_pay_[k]; }

    /// P(T_{k-1}, T_k) seen at the reset of float period k.
    double fixing(std::size_t k, double x1, double x2) const;
    /// Index of the float period with reset <= t < payment, or npos.
    std::size_t current_period(double t) const;

    /// Path-independent part of a valuation at a fixed time: bond
    /// coefficients of every remaining cash flow.
    struct Slice {
        struct Flow {
            double amount;      // known cash flow
            double per_fixing;  // cash flow per unit of 1 / current fixing
            double log_a, b1, b2;
        };
        std::vector<Flow> flows;
    };
    Slice slice(double t) const;

    /// epsilon_t(t,T) given the state and the fixing of the current period
    /// (ignored if t precedes every reset or follows the last payment).
    Value value(double t, double x1, double x2, double current_fixing) const;
    static Value value(const Slice& s, double x1, double x2, double current_fixing);

    /// Cash flows paid in (t0, t1], each as (time, amount), given fixings for
    /// every float period (indexed by period).
    std::vector<std::pair<double, double>> flows_between(double t0, double t1,
                                                         const std::vector<double>& fixings) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    G2Model model_;
    TradeSpec trade_;
    std::vector<double> fixed_pay_;
    std::vector<double> float_pay_;
};

/// Float fixings for every path: result[p * n_float + k].
std::vector<double> path_fixings(const SwapValuer& swap, const PathSet& paths, int threads = 1);

/// epsilon_t(t,T) on path p at grid index i.
double exposure(const SwapValuer& swap, const PathSet& paths, const std::vector<double>& fixings,
                std::size_t i, std::size_t p);

/// epsilon_{t+delta}(t,T) on path p: flows in (t, t+delta] and the residual
/// value at t+delta, discounted to t at the pathwise overnight rate. Both t
/// and t+delta must be grid points.
double exposure_delayed(const SwapValuer& swap, const PathSet& paths, const std::vector<double>& fixings,
                        double t, double delta, std::size_t p);

// ---------------------------------------------------------------------------
// Margins

enum class MarginMode { Uncollateralized, CsaVmOnly, CsaVmIm, Ccp };

MarginMode parse_margin_mode(const std::string& s);
std::string to_string(MarginMode m);

struct MarginConfig {
    MarginMode mode = MarginMode::CsaVmOnly;
    double alpha = 1.0;        // variation margin fraction
    double q = 0.99;           // initial margin confidence
    double delta_days = 10.0;  // margin period of risk

    void validate() const;
    double delta() const { return delta_days / 360.0; }
    bool has_im() const { return mode == MarginMode::CsaVmIm || mode == MarginMode::Ccp; }
    double effective_alpha() const { return mode == MarginMode::Uncollateralized ? 0.0 : alpha; }
};

inline double variation_margin(double alpha, double eps) { return alpha * eps; }

/// Standard deviation of epsilon_{t+delta}(t,T) given x_t, by first-order
/// propagation of the exact OU covariance over delta through the gradient.
double im_stddev(const G2Model& model, double grad_x1, double grad_x2, double delta);

struct InitialMargins {
    double nc;  // posted by the counterparty, >= 0
    double ni;  // posted by the investor, <= 0
};

InitialMargins initial_margin(const MarginConfig& cfg, double nu);

struct GapComponents {
    double mismatch;
    double contagion;
    double mtm;
};

/// Three-way split of the gap eps_{tau+delta} - M - N, with the initial
/// margin split N = n_contagion + n_mtm.
GapComponents gap_components(double eps_before, double eps_at, double eps_after, double margin,
                             double n_contagion, double n_mtm);

}  // namespace xva
