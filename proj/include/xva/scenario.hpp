#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "xva/marketdata.hpp"
#include "xva/models.hpp"
#include "xva/pricer.hpp"

namespace xva {

/// Invalid scenario configuration; the message names the offending field.
class ConfigError : public InputError {
public:
    using InputError::InputError;
};

struct McConfig {
    std::size_t paths = 10000;
    double dt = 1.0 / 12.0;
    int substeps = 4;
};

enum class TableKind { Grid, Decomposition, BidAsk };

/// One output table: rows (and for grids, columns) sweep a scenario axis.
/// Axes: rho, beta_plus, beta_minus, beta, alpha, q, delta_days,
/// vol_multiplier, r_c, r_i.
struct TableSpec {
    std::string name;
    TableKind kind = TableKind::Grid;
    std::string row_axis;
    std::vector<double> row_values;
    std::string col_axis;
    std::vector<double> col_values;
    std::string value = "total";  // grid cell component
    nlohmann::json overrides = nlohmann::json::object();
};

struct ScenarioConfig {
    std::filesystem::path market_data;
    std::filesystem::path g2_params;  // empty: calibrate on the fly
    std::filesystem::path cir_params;  // empty: taken from the market data file
    /// "H/M": high-risk counterparty, mid-risk investor; "M/H" the reverse.
    std::string credit_scenario = "H/M";
    std::uint64_t seed = 0;
    McConfig mc;
    PricingConfig base;
    bool par_strike = true;
    double rho = 0.0;
    double vol_multiplier = 1.0;
    std::vector<TableSpec> tables;
    bool exposure_profile = false;
    /// Factor-correlation range allowed when calibrating G2++.
    double rho12_min = -0.7;
    double rho12_max = 0.99;
};

ScenarioConfig scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
ScenarioConfig load_scenario_config(const std::filesystem::path& file);

/// Names of the counterparty and investor credit curves for a scenario.
std::pair<std::string, std::string> credit_names(const std::string& scenario);

/// Market data, rate and credit parameters shared by every scenario point.
struct Environment {
    MarketData market;
    G2Params g2;
    std::map<std::string, CirParams> cir;
    std::map<std::string, std::shared_ptr<const PiecewiseHazard>> hazards;
};

/// Loads market data and parameters; calibrates G2++ if no file is given.
Environment load_environment(const ScenarioConfig& cfg, int threads = 1);

HybridModel build_model(const Environment& env, const std::string& credit_scenario, double rho,
                        double vol_multiplier);

struct CellResult {
    std::string table;
    double row = 0.0;
    double col = 0.0;
    ValuationResult result;  // bid-ask tables: total holds the spread
};

struct RunSummary {
    std::vector<CellResult> cells;
    std::vector<std::filesystem::path> files;
};

/// Prices every table cell and writes one CSV per table (4 decimals, bp),
/// a standard-error companion CSV, optional exposure profile and a JSON
/// summary into out_dir.
RunSummary run_scenario(const ScenarioConfig& cfg, const Environment& env, const std::filesystem::path& out_dir,
                        int threads = 1);

/// Calibrates G2++ to the swaption surface and writes the parameter files.
CalibrationReport calibrate_and_save(const ScenarioConfig& cfg, const std::filesystem::path& out_dir,
                                     int threads = 1);

}  // namespace xva
