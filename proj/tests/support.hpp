#pragma once

#include <string>

#include "xva/scenario.hpp"

namespace xva::test {

inline std::string source_path(const std::string& rel) { return std::string(XVA_SOURCE_DIR) + "/" + rel; }

/// Market data, calibrated G2++ parameters and CIR parameters from the repo.
inline const Environment& environment() {
    static const Environment env = [] {
        ScenarioConfig cfg;
        cfg.market_data = source_path("data/market_data.json");
        cfg.g2_params = source_path("configs/g2_params.json");
        return load_environment(cfg);
    }();
    return env;
}

inline HybridModel model(double rho = 0.0, const std::string& credit = "H/M", double vol_multiplier = 1.0) {
    return build_model(environment(), credit, rho, vol_multiplier);
}

/// Mean and standard error of a sample.
struct Sample {
    double mean = 0.0, se = 0.0;
};

template <typename F>
Sample sample(std::size_t n, F&& f) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        const double v = f(p);
        s += v;
        s2 += v * v;
    }
    const double m = s / static_cast<double>(n);
    const double var = std::max(0.0, s2 / static_cast<double>(n) - m * m);
    return {m, std::sqrt(var / static_cast<double>(n - 1))};
}

}  // namespace xva::test
