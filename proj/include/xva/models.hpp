#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "xva/marketdata.hpp"

namespace xva {

class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// G2++

struct G2Params {
    double a1 = 0.5, a2 = 0.05;
    double sigma1 = 0.01, sigma2 = 0.008;
    double rho = -0.7;

    void validate() const;
    /// Copy with both volatilities multiplied by `m` (shift is not refitted).
    G2Params with_vol_multiplier(double m) const;
};

/// (1 - exp(-a tau)) / a, continuous at a -> 0.
double g2_b(double a, double tau);

/// Two-factor Gaussian short rate e_t = phi(t) + x1 + x2 fitted to `curve`.
/// phi is never tabulated; bond prices are reconstructed in closed form.
class G2Model {
public:
    G2Model(G2Params params, YieldCurve curve);

    const G2Params& params() const { return p_; }
    const YieldCurve& curve() const { return curve_; }

    /// Variance of int_t^T (x1 + x2) du given x_t; depends on T - t only.
    double V(double tau) const;

    /// ln P(t,T) = log_a(t,T) - B1 x1 - B2 x2.
    double log_a(double t, double T) const;
    double zcb(double t, double T, double x1, double x2) const;

    /// int_t^{t+h} phi(u) du.
    double phi_integral(double t, double h) const;

    /// Covariance of (x1, x2) increments' noise over a step of length h:
    /// Cov(int e^{-a_i(h-s)} dW_i, int e^{-a_j(h-s)} dW_j) times sigma_i sigma_j.
    Eigen::Matrix2d state_covariance(double h) const;

private:
    G2Params p_;
    YieldCurve curve_;
};

// ---------------------------------------------------------------------------
// Swaptions

struct SwaptionSpec {
    double expiry;
    double tenor;
    double fixed_period = 1.0;  // annual fixed leg
};

/// Forward swap rate and annuity seen at 0.
struct SwapQuote {
    double forward;
    double annuity;
};

SwapQuote swap_quote(const YieldCurve& curve, const SwaptionSpec& s);

double black_payer(const SwapQuote& q, double strike, double vol, double expiry);
double black_atm_vega(const SwapQuote& q, double vol, double expiry);
/// Inverts the Black formula for an ATM payer; returns NaN if out of range.
double black_atm_implied_vol(const SwapQuote& q, double price, double expiry);

/// European payer (omega=+1) or receiver (omega=-1) swaption under G2++ by
/// one-dimensional integration over the first factor.
double g2_swaption(const G2Model& model, const SwaptionSpec& s, double strike, int omega = 1);

struct CalibrationOptions {
    int max_iterations = 200;
    std::vector<G2Params> starts;  // empty: built-in starting points
    int threads = 1;
    double rho_min = -0.99;  // bounds on the factor correlation
    double rho_max = 0.99;
};

struct CalibrationReport {
    G2Params params;
    double rmse_vol = 0.0;       // RMSE of implied vols, decimal
    double max_abs_error = 0.0;  // decimal vol
    int iterations = 0;
    bool converged = false;
    std::vector<double> model_vols;  // row-major over (expiry, tenor)
};

/// Least-squares fit of G2++ ATM swaption prices to Black prices.
CalibrationReport calibrate_g2(const SwaptionVolSurface& surface, const YieldCurve& curve,
                               const CalibrationOptions& options = {});

/// Surface of model-implied ATM vols on the grid of `like`.
SwaptionVolSurface g2_implied_surface(const G2Model& model, const SwaptionVolSurface& like);

// ---------------------------------------------------------------------------
// CIR / CIR++

struct CirParams {
    double y0 = 0.01, kappa = 0.8, mu = 0.02, nu = 0.2;

    void validate() const;
    bool feller() const { return 2.0 * kappa * mu >= nu * nu; }
};

/// E[exp(-int_0^tau y_u du) | y_0 = y] for the square-root process.
double cir_bond(const CirParams& p, double tau, double y);
/// -d/dT ln cir_bond(p, T, p.y0).
double cir_forward_intensity(const CirParams& p, double T);

/// Shifted CIR intensity lambda = y + psi, with psi fitted so that the model
/// survival at 0 equals the market survival exactly at every horizon.
class CirPPModel {
public:
    CirPPModel(CirParams params, std::shared_ptr<const HazardTermStructure> market);

    const CirParams& params() const { return p_; }

    /// Psi(T) = int_0^T psi(u) du.
    double shift_integral(double T) const;
    /// psi(t) = market hazard - CIR forward intensity.
    double shift(double t) const;
    /// E_t[exp(-int_t^T lambda)] given y_t.
    double survival(double t, double T, double y_t) const;
    double survival0(double T) const { return survival(0.0, T, p_.y0); }
    /// Minimum of psi sampled on [0, horizon]; negative values deserve a warning.
    double min_shift(double horizon, int samples = 400) const;

    const HazardTermStructure& market() const { return *market_; }

private:
    CirParams p_;
    std::shared_ptr<const HazardTermStructure> market_;
};

// ---------------------------------------------------------------------------
// Correlations; driver order (W1, W2, W^C, W^I)

enum Driver { kW1 = 0, kW2 = 1, kWC = 2, kWI = 3 };

struct CorrelationSpec {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();

    static CorrelationSpec from_g2(const G2Params& p);
    void validate() const;  // symmetric, unit diagonal, Cholesky succeeds
    bool is_psd() const;
};

/// Instantaneous correlation between the short rate and intensity k (kWC or kWI).
double effective_correlation(const CorrelationSpec& corr, const G2Params& p, int k);

/// Builds rho^{1k} = rho^{2k} reproducing the targets, rho^{CI} = 0.
CorrelationSpec solve_driver_correlations(double target_c, double target_i, const G2Params& p);

/// Largest t such that targets (t * dir_c, t * dir_i) keep the matrix PSD.
double max_attainable_correlation(const G2Params& p, double dir_c = 1.0, double dir_i = 1.0);

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json to_json(const G2Params& p);
G2Params g2_params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CirParams& p);
CirParams cir_params_from_json(const nlohmann::json& j);
/// CIR++ parameters plus sampled shift and survival for inspection.
nlohmann::json describe_cir(const CirPPModel& model, double horizon, double step);

void save_json(const std::filesystem::path& file, const nlohmann::json& j);
nlohmann::json load_json(const std::filesystem::path& file);

}  // namespace xva
