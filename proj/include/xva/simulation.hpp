#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "xva/models.hpp"

namespace xva {

struct TimeGrid {
    std::vector<double> times;

    /// 0, horizon, every mandatory time in (0, horizon), with each gap split
    /// evenly so that no step exceeds dt_max.
    static TimeGrid build(double horizon, double dt_max, std::vector<double> mandatory = {});

    std::size_t size() const { return times.size(); }
    double dt(std::size_t i) const { return times[i + 1] - times[i]; }
    /// Index of the grid point equal to t (within 1e-9); throws if absent.
    std::size_t index_of(double t) const;
    bool contains(double t) const;
    void validate(double dt_max) const;
};

/// Everything needed to simulate the joint rate/credit state.
struct HybridModel {
    G2Model rates;
    CirPPModel credit_c;
    CirPPModel credit_i;
    CorrelationSpec corr;
};

struct SimulationOptions {
    std::size_t n_paths = 10000;
    std::uint64_t seed = 1;
    int substeps = 1;  // internal steps per grid interval
    int threads = 1;
};

/// Simulated states on a grid. Arrays are time-major: value(i, p) lives at
/// i * n_paths + p. Integrals are cumulative from time 0.
struct PathSet {
    TimeGrid grid;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    int substeps = 1;

    std::vector<double> x1, x2, yc, yi;       // yc, yi stored truncated at 0
    std::vector<double> int_e, int_lc, int_li;

    std::size_t at(std::size_t i, std::size_t p) const { return i * n_paths + p; }
    const double* row(const std::vector<double>& v, std::size_t i) const { return v.data() + i * n_paths; }

    /// Order-dependent checksum of all stored arrays (for determinism checks).
    std::uint64_t checksum() const;
};

PathSet generate_paths(const HybridModel& model, const TimeGrid& grid, const SimulationOptions& opt);

/// Joint covariance of (I1, I2, dW^C, dW^I) over a step of length h, where
/// I_i = int_0^h exp(-a_i (h - s)) dW_i(s).
Eigen::Matrix4d step_covariance(const G2Params& p, const CorrelationSpec& corr, double h);

// ---------------------------------------------------------------------------
// Least-squares conditional expectations

/// Degree-2 polynomial regression on standardized features: the intercept,
/// every feature, every square and every pairwise product. Near-constant
/// features are dropped. The design is built once and reused across value
/// vectors.
class Regressor {
public:
    Regressor(const std::vector<const double*>& features, std::size_t n, double ridge = 1e-8);

    /// Fitted conditional expectations for `values` (length n).
    std::vector<double> fit(const double* values) const;
    void fit(const double* values, double* out) const;

    std::size_t basis_size() const { return static_cast<std::size_t>(design_.cols()); }
    bool degenerate() const { return degenerate_; }

private:
    Eigen::MatrixXd design_;  // n x k
    Eigen::LDLT<Eigen::MatrixXd> solver_;
    Eigen::MatrixXd gram_;
    bool degenerate_ = false;
};

/// Convenience wrapper: regress `values` on `features`.
std::vector<double> regress_conditional(const std::vector<double>& values,
                                        const std::vector<const double*>& features);

}  // namespace xva
