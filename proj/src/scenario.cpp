#include "xva/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>

namespace xva {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError("field '" + where + "': expected an object");
    for (const auto& [key, _] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw ConfigError("field '" + (where.empty() ? key : where + "." + key) + "': unknown key");
        }
    }
}

std::string path_of(const std::string& where, const char* key) { return where.empty() ? key : where + "." + key; }

double number(const json& j, const std::string& where, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ConfigError("field '" + path_of(where, key) + "': expected a number");
    return j.at(key).get<double>();
}

std::string text(const json& j, const std::string& where, const char* key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_string()) throw ConfigError("field '" + path_of(where, key) + "': expected a string");
    return j.at(key).get<std::string>();
}

bool flag(const json& j, const std::string& where, const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_boolean()) throw ConfigError("field '" + path_of(where, key) + "': expected true or false");
    return j.at(key).get<bool>();
}

/// Rethrows validation failures with the field prefix attached.
template <typename F>
void guarded(const std::string& where, F&& f) {
    try {
        f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("field '" + where + "': " + e.what());
    }
}

/// Applies the pricing fields present in `j` on top of `cfg`.
void patch(ScenarioConfig& cfg, PricingConfig& pc, const json& j, const std::string& where) {
    if (j.contains("trade")) {
        const auto& t = j.at("trade");
        const std::string w = path_of(where, "trade");
        check_keys(t, w, {"direction", "maturity", "fixed_rate", "notional", "fixed_period", "float_period"});
        guarded(w + ".direction", [&] {
            if (t.contains("direction")) pc.trade.direction = parse_direction(text(t, w, "direction", ""));
        });
        pc.trade.maturity = number(t, w, "maturity", pc.trade.maturity);
        pc.trade.notional = number(t, w, "notional", pc.trade.notional);
        pc.trade.fixed_period = number(t, w, "fixed_period", pc.trade.fixed_period);
        pc.trade.float_period = number(t, w, "float_period", pc.trade.float_period);
        if (t.contains("fixed_rate")) {
            if (t.at("fixed_rate").is_string()) {
                if (t.at("fixed_rate") != "par") throw ConfigError("field '" + w + ".fixed_rate': expected a number or \"par\"");
                cfg.par_strike = true;
            } else {
                pc.trade.fixed_rate = number(t, w, "fixed_rate", 0.0);
                cfg.par_strike = false;
            }
        }
        guarded(w, [&] { pc.trade.validate(); });
    }
    if (j.contains("margin")) {
        const auto& m = j.at("margin");
        const std::string w = path_of(where, "margin");
        check_keys(m, w, {"mode", "alpha", "q", "delta_days"});
        guarded(w + ".mode", [&] {
            if (m.contains("mode")) pc.margin.mode = parse_margin_mode(text(m, w, "mode", ""));
        });
        pc.margin.alpha = number(m, w, "alpha", pc.margin.alpha);
        pc.margin.q = number(m, w, "q", pc.margin.q);
        pc.margin.delta_days = number(m, w, "delta_days", pc.margin.delta_days);
        guarded(w, [&] { pc.margin.validate(); });
    }
    if (j.contains("credit")) {
        const auto& c = j.at("credit");
        const std::string w = path_of(where, "credit");
        check_keys(c, w, {"r_c", "r_i", "r_c_collateral", "r_i_collateral", "rehypothecation"});
        pc.credit.r_c = number(c, w, "r_c", pc.credit.r_c);
        pc.credit.r_i = number(c, w, "r_i", pc.credit.r_i);
        // Collateral recoveries follow the derivative recoveries unless given.
        pc.credit.r_c_collateral = number(c, w, "r_c_collateral", std::max(pc.credit.r_c, pc.credit.r_c_collateral));
        pc.credit.r_i_collateral = number(c, w, "r_i_collateral", std::max(pc.credit.r_i, pc.credit.r_i_collateral));
        pc.credit.rehypothecation = flag(c, w, "rehypothecation", pc.credit.rehypothecation);
        guarded(w, [&] { pc.credit.validate(); });
    }
    if (j.contains("funding")) {
        const auto& f = j.at("funding");
        const std::string w = path_of(where, "funding");
        check_keys(f, w, {"beta_plus", "beta_minus", "perspective"});
        pc.funding.beta_plus = number(f, w, "beta_plus", pc.funding.beta_plus);
        pc.funding.beta_minus = number(f, w, "beta_minus", pc.funding.beta_minus);
        guarded(w + ".perspective", [&] {
            if (f.contains("perspective")) pc.funding.perspective = parse_perspective(text(f, w, "perspective", ""));
        });
        guarded(w, [&] { pc.funding.validate(); });
    }
}

const std::set<std::string> kAxes = {"rho", "beta_plus", "beta_minus", "beta", "alpha", "q",
                                     "delta_days", "vol_multiplier", "r_c", "r_i"};

/// Scenario point: pricing config plus the path-determining parameters.
struct Point {
    PricingConfig pc;
    double rho;
    double vol_multiplier;
};

void apply_axis(Point& pt, const std::string& axis, double v) {
    if (axis == "rho") pt.rho = v;
    else if (axis == "beta_plus") pt.pc.funding.beta_plus = v;
    else if (axis == "beta_minus") pt.pc.funding.beta_minus = v;
    else if (axis == "beta") pt.pc.funding.beta_plus = pt.pc.funding.beta_minus = v;
    else if (axis == "alpha") pt.pc.margin.alpha = v;
    else if (axis == "q") pt.pc.margin.q = v;
    else if (axis == "delta_days") pt.pc.margin.delta_days = v;
    else if (axis == "vol_multiplier") pt.vol_multiplier = v;
    else if (axis == "r_c") pt.pc.credit.r_c = pt.pc.credit.r_c_collateral = v;
    else if (axis == "r_i") pt.pc.credit.r_i = pt.pc.credit.r_i_collateral = v;
}

std::vector<double> number_list(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw ConfigError("field '" + where + "': expected a non-empty array of numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw ConfigError("field '" + where + "': expected a non-empty array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::string fmt4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    std::string s = buf;
    if (s == "-0.0000") s = "0.0000";
    return s;
}

double bp(double v) { return v * 1e4; }

double component(const ValuationResult& r, const std::string& name, bool se) {
    const Estimate* e = name == "mtm"   ? &r.mtm
                        : name == "cva" ? &r.cva
                        : name == "dva" ? &r.dva
                        : name == "mva" ? &r.mva
                        : name == "fva" ? &r.fva
                                        : &r.total;
    return se ? e->se : e->value;
}

json result_json(const ValuationResult& r) {
    json j;
    for (const char* c : {"mtm", "cva", "dva", "mva", "fva", "total"}) {
        j[c] = bp(component(r, c, false));
        j[std::string(c) + "_se"] = bp(component(r, c, true));
    }
    return j;
}

}  // namespace

std::pair<std::string, std::string> credit_names(const std::string& scenario) {
    if (scenario == "H/M") return {"High", "Mid"};
    if (scenario == "M/H") return {"Mid", "High"};
    if (scenario == "M/M") return {"Mid", "Mid"};
    if (scenario == "H/H") return {"High", "High"};
    throw ConfigError("field 'credit_scenario': expected one of H/M, M/H, M/M, H/H");
}

static bool non_negative_integer(const json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

ScenarioConfig scenario_from_json(const json& j, const fs::path& base_dir) {
    check_keys(j, "", {"market_data", "g2_params", "cir_params", "credit_scenario", "seed", "mc", "trade", "margin",
                       "credit", "funding", "rho", "vol_multiplier", "tables", "exposure_profile", "calibration"});
    ScenarioConfig cfg;
    auto resolve = [&](const std::string& p) { return p.empty() ? fs::path{} : (base_dir / p).lexically_normal(); };
    if (!j.contains("market_data")) throw ConfigError("field 'market_data': required");
    cfg.market_data = resolve(text(j, "", "market_data", ""));
    cfg.g2_params = resolve(text(j, "", "g2_params", ""));
    cfg.cir_params = resolve(text(j, "", "cir_params", ""));
    cfg.credit_scenario = text(j, "", "credit_scenario", cfg.credit_scenario);
    credit_names(cfg.credit_scenario);
    if (!j.contains("seed")) throw ConfigError("field 'seed': required");
    if (!non_negative_integer(j.at("seed"))) throw ConfigError("field 'seed': expected a non-negative integer");
    cfg.seed = j.at("seed").get<std::uint64_t>();

    if (j.contains("mc")) {
        const auto& m = j.at("mc");
        check_keys(m, "mc", {"paths", "dt", "substeps"});
        if (m.contains("paths")) {
            if (!non_negative_integer(m.at("paths"))) throw ConfigError("field 'mc.paths': expected a positive integer");
            cfg.mc.paths = m.at("paths").get<std::size_t>();
        }
        cfg.mc.dt = number(m, "mc", "dt", cfg.mc.dt);
        if (m.contains("substeps")) {
            if (!non_negative_integer(m.at("substeps"))) throw ConfigError("field 'mc.substeps': expected a positive integer");
            cfg.mc.substeps = m.at("substeps").get<int>();
        }
        if (cfg.mc.paths < 2) throw ConfigError("field 'mc.paths': need at least two paths");
        if (!(cfg.mc.dt > 0.0)) throw ConfigError("field 'mc.dt': must be positive");
        if (cfg.mc.substeps < 1) throw ConfigError("field 'mc.substeps': must be positive");
    }

    if (j.contains("calibration")) {
        const auto& c = j.at("calibration");
        check_keys(c, "calibration", {"rho_min", "rho_max"});
        cfg.rho12_min = number(c, "calibration", "rho_min", cfg.rho12_min);
        cfg.rho12_max = number(c, "calibration", "rho_max", cfg.rho12_max);
        if (!(cfg.rho12_min >= -0.99 && cfg.rho12_min < cfg.rho12_max && cfg.rho12_max <= 0.99)) {
            throw ConfigError("field 'calibration': need -0.99 <= rho_min < rho_max <= 0.99");
        }
    }

    patch(cfg, cfg.base, j, "");
    cfg.rho = number(j, "", "rho", 0.0);
    if (std::abs(cfg.rho) > 1.0) throw ConfigError("field 'rho': must lie in [-1,1]");
    cfg.vol_multiplier = number(j, "", "vol_multiplier", 1.0);
    if (!(cfg.vol_multiplier > 0.0)) throw ConfigError("field 'vol_multiplier': must be positive");
    cfg.exposure_profile = flag(j, "", "exposure_profile", false);

    if (j.contains("tables")) {
        if (!j.at("tables").is_array()) throw ConfigError("field 'tables': expected an array");
        std::set<std::string> names;
        for (std::size_t k = 0; k < j.at("tables").size(); ++k) {
            const auto& t = j.at("tables")[k];
            const std::string w = "tables[" + std::to_string(k) + "]";
            check_keys(t, w, {"name", "kind", "rows", "columns", "value", "overrides"});
            TableSpec spec;
            spec.name = text(t, w, "name", "");
            if (spec.name.empty() || spec.name.find_first_of("/\\ ") != std::string::npos) {
                throw ConfigError("field '" + w + ".name': expected a plain file name");
            }
            if (!names.insert(spec.name).second) throw ConfigError("field '" + w + ".name': duplicate table name");
            const std::string kind = text(t, w, "kind", "grid");
            if (kind == "grid") spec.kind = TableKind::Grid;
            else if (kind == "decomposition") spec.kind = TableKind::Decomposition;
            else if (kind == "bid_ask") spec.kind = TableKind::BidAsk;
            else throw ConfigError("field '" + w + ".kind': expected grid, decomposition or bid_ask");
            auto axis = [&](const char* key, std::string& name, std::vector<double>& values) {
                const std::string wa = w + "." + key;
                if (!t.contains(key)) throw ConfigError("field '" + wa + "': required");
                const auto& a = t.at(key);
                check_keys(a, wa, {"axis", "values"});
                name = text(a, wa, "axis", "");
                if (!kAxes.count(name)) throw ConfigError("field '" + wa + ".axis': unknown axis '" + name + "'");
                if (!a.contains("values")) throw ConfigError("field '" + wa + ".values': required");
                values = number_list(a.at("values"), wa + ".values");
            };
            axis("rows", spec.row_axis, spec.row_values);
            if (spec.kind != TableKind::Decomposition) {
                axis("columns", spec.col_axis, spec.col_values);
            } else if (t.contains("columns")) {
                throw ConfigError("field '" + w + ".columns': decomposition tables have fixed columns");
            }
            spec.value = text(t, w, "value", "total");
            if (!std::set<std::string>{"mtm", "cva", "dva", "mva", "fva", "total"}.count(spec.value)) {
                throw ConfigError("field '" + w + ".value': unknown component '" + spec.value + "'");
            }
            if (t.contains("overrides")) {
                spec.overrides = t.at("overrides");
                check_keys(spec.overrides, w + ".overrides",
                           {"trade", "margin", "credit", "funding", "rho", "vol_multiplier", "credit_scenario"});
                if (spec.overrides.contains("credit_scenario")) {
                    throw ConfigError("field '" + w + ".overrides.credit_scenario': set it at top level");
                }
                ScenarioConfig probe = cfg;
                PricingConfig pc = cfg.base;
                patch(probe, pc, spec.overrides, w + ".overrides");
            }
            // Validate every axis value once up front.
            for (double rv : spec.row_values) {
                for (double cv : spec.col_values.empty() ? std::vector<double>{0.0} : spec.col_values) {
                    Point pt{cfg.base, cfg.rho, cfg.vol_multiplier};
                    ScenarioConfig probe = cfg;
                    patch(probe, pt.pc, spec.overrides, w + ".overrides");
                    apply_axis(pt, spec.row_axis, rv);
                    if (!spec.col_axis.empty()) apply_axis(pt, spec.col_axis, cv);
                    guarded(w, [&] { pt.pc.validate(); });
                    if (std::abs(pt.rho) > 1.0) throw ConfigError("field '" + w + "': rho must lie in [-1,1]");
                    if (!(pt.vol_multiplier > 0.0)) throw ConfigError("field '" + w + "': vol_multiplier must be positive");
                }
            }
            cfg.tables.push_back(std::move(spec));
        }
    }
    guarded("trade", [&] { cfg.base.validate(); });
    return cfg;
}

ScenarioConfig load_scenario_config(const fs::path& file) {
    json j;
    try {
        j = load_json(file);
    } catch (const InputError& e) {
        throw ConfigError(e.what());
    }
    return scenario_from_json(j, file.parent_path());
}

Environment load_environment(const ScenarioConfig& cfg, int threads) {
    Environment env;
    const json raw = load_json(cfg.market_data);
    env.market = market_data_from_json(raw);

    if (!cfg.cir_params.empty()) {
        const json j = load_json(cfg.cir_params);
        for (const auto& [name, v] : j.items()) env.cir.emplace(name, cir_params_from_json(v));
    } else {
        for (const auto& c : raw.at("cds_curves")) {
            if (c.contains("cir")) env.cir.emplace(c.at("name").get<std::string>(), cir_params_from_json(c.at("cir")));
        }
    }
    for (const auto& c : env.market.cds_curves) {
        env.hazards.emplace(c.name, std::make_shared<PiecewiseHazard>(bootstrap_hazard(c, env.market.curve)));
    }

    if (!cfg.g2_params.empty() && fs::exists(cfg.g2_params)) {
        env.g2 = g2_params_from_json(load_json(cfg.g2_params));
    } else {
        if (!cfg.g2_params.empty()) {
            std::cerr << "warning: " << cfg.g2_params.string() << " not found; calibrating G2++\n";
        }
        CalibrationOptions opt;
        opt.threads = threads;
        opt.rho_min = cfg.rho12_min;
        opt.rho_max = cfg.rho12_max;
        env.g2 = calibrate_g2(env.market.swaption_vols, env.market.curve, opt).params;
    }
    return env;
}

HybridModel build_model(const Environment& env, const std::string& credit_scenario, double rho,
                        double vol_multiplier) {
    const auto [cn, in] = credit_names(credit_scenario);
    auto params = [&](const std::string& name) {
        auto it = env.cir.find(name);
        if (it == env.cir.end()) throw ConfigError("no CIR parameters for credit curve '" + name + "'");
        return it->second;
    };
    auto hazard = [&](const std::string& name) {
        auto it = env.hazards.find(name);
        if (it == env.hazards.end()) throw ConfigError("no CDS curve named '" + name + "'");
        return it->second;
    };
    const G2Params g2 = env.g2.with_vol_multiplier(vol_multiplier);
    return HybridModel{G2Model(g2, env.market.curve), CirPPModel(params(cn), hazard(cn)),
                       CirPPModel(params(in), hazard(in)), solve_driver_correlations(rho, rho, g2)};
}

RunSummary run_scenario(const ScenarioConfig& cfg, const Environment& env, const fs::path& out_dir, int threads) {
    struct Job {
        std::size_t table;
        double row, col;
        Point pt;
        std::size_t slot;  // index of the (first) config within its group
    };
    struct Group {
        std::vector<PricingConfig> configs;
        std::vector<std::size_t> jobs;
    };

    const HybridModel base_model = build_model(env, cfg.credit_scenario, cfg.rho, cfg.vol_multiplier);
    PricingConfig base = cfg.base;
    if (cfg.par_strike) base.trade.fixed_rate = par_rate(base_model.rates, base.trade);

    std::vector<Job> jobs;
    std::map<std::pair<double, double>, Group> groups;
    for (std::size_t k = 0; k < cfg.tables.size(); ++k) {
        const auto& spec = cfg.tables[k];
        const std::vector<double> cols = spec.kind == TableKind::Decomposition ? std::vector<double>{0.0} : spec.col_values;
        for (double rv : spec.row_values) {
            for (double cv : cols) {
                Point pt{base, cfg.rho, cfg.vol_multiplier};
                ScenarioConfig probe = cfg;
                patch(probe, pt.pc, spec.overrides, "");
                pt.rho = number(spec.overrides, "", "rho", pt.rho);
                pt.vol_multiplier = number(spec.overrides, "", "vol_multiplier", pt.vol_multiplier);
                if (spec.overrides.contains("trade") && probe.par_strike) {
                    pt.pc.trade.fixed_rate = par_rate(base_model.rates, pt.pc.trade);
                }
                apply_axis(pt, spec.row_axis, rv);
                if (spec.kind != TableKind::Decomposition) apply_axis(pt, spec.col_axis, cv);
                pt.pc.label = spec.name;
                auto& g = groups[{pt.rho, pt.vol_multiplier}];
                Job job{k, rv, cv, pt, g.configs.size()};
                g.configs.push_back(pt.pc);
                if (spec.kind == TableKind::BidAsk) {
                    PricingConfig s = pt.pc;
                    s.short_position = true;
                    g.configs.push_back(s);
                }
                g.jobs.push_back(jobs.size());
                jobs.push_back(job);
            }
        }
    }

    std::vector<ValuationResult> results(jobs.size());
    auto simulate = [&](const HybridModel& model, const std::vector<PricingConfig>& configs) {
        std::vector<double> mandatory;
        double horizon = 0.0;
        for (const auto& c : configs) {
            horizon = std::max(horizon, c.trade.maturity);
            const auto d = c.trade.schedule_dates();
            mandatory.insert(mandatory.end(), d.begin(), d.end());
        }
        const TimeGrid grid = TimeGrid::build(horizon, cfg.mc.dt, mandatory);
        SimulationOptions so;
        so.n_paths = cfg.mc.paths;
        so.seed = cfg.seed;
        so.substeps = cfg.mc.substeps;
        so.threads = threads;
        return generate_paths(model, grid, so);
    };

    PricingOptions po;
    po.threads = threads;
    for (auto& [key, g] : groups) {
        const HybridModel model = build_model(env, cfg.credit_scenario, key.first, key.second);
        const PathSet paths = simulate(model, g.configs);
        const auto res = price(model, paths, g.configs, po);
        for (std::size_t jid : g.jobs) {
            const auto& job = jobs[jid];
            ValuationResult r = res[job.slot];
            if (cfg.tables[job.table].kind == TableKind::BidAsk) {
                // Spread = -(long + short); only funding survives the sum.
                const ValuationResult& s = res[job.slot + 1];
                const double v = -(r.total.value + s.total.value);
                r.total = {v, std::hypot(r.fva.se, s.fva.se)};
            }
            results[jid] = r;
        }
    }

    fs::create_directories(out_dir);
    RunSummary summary;
    auto write = [&](const fs::path& file, const std::string& body) {
        std::ofstream out(file, std::ios::binary);
        if (!out) throw InputError("cannot write " + file.string());
        out << body;
        summary.files.push_back(file);
    };

    json cells = json::array();
    for (std::size_t k = 0; k < cfg.tables.size(); ++k) {
        const auto& spec = cfg.tables[k];
        std::string csv, se_csv;
        std::string header = spec.row_axis;
        if (spec.kind == TableKind::Decomposition) {
            header += ",MtM,CVA,DVA,MVA,FVA,Total";
        } else {
            for (double cv : spec.col_values) header += "," + spec.col_axis + "=" + fmt4(cv);
        }
        csv = se_csv = header + "\n";
        for (double rv : spec.row_values) {
            std::string line = fmt4(rv), se_line = fmt4(rv);
            for (std::size_t jid = 0; jid < jobs.size(); ++jid) {
                const auto& job = jobs[jid];
                if (job.table != k || job.row != rv) continue;
                const auto& r = results[jid];
                if (spec.kind == TableKind::Decomposition) {
                    for (const char* c : {"mtm", "cva", "dva", "mva", "fva", "total"}) {
                        line += "," + fmt4(bp(component(r, c, false)));
                        se_line += "," + fmt4(bp(component(r, c, true)));
                    }
                } else {
                    const std::string c = spec.kind == TableKind::BidAsk ? "total" : spec.value;
                    line += "," + fmt4(bp(component(r, c, false)));
                    se_line += "," + fmt4(bp(component(r, c, true)));
                }
                json cell = result_json(r);
                cell["table"] = spec.name;
                cell[spec.row_axis] = rv;
                if (spec.kind != TableKind::Decomposition) cell[spec.col_axis] = job.col;
                cells.push_back(cell);
                summary.cells.push_back({spec.name, rv, job.col, r});
            }
            csv += line + "\n";
            se_csv += se_line + "\n";
        }
        write(out_dir / (spec.name + ".csv"), csv);
        write(out_dir / (spec.name + "_se.csv"), se_csv);
    }

    if (cfg.exposure_profile) {
        const PathSet paths = simulate(base_model, {base});
        std::string csv = "t,EPE,ENE,IM_mean,IM_p05,IM_p50,IM_p95\n";
        for (const auto& p : exposure_profile(base_model, paths, base, threads)) {
            csv += fmt4(p.t) + "," + fmt4(bp(p.epe)) + "," + fmt4(bp(p.ene)) + "," + fmt4(bp(p.im_mean)) + "," +
                   fmt4(bp(p.im_p05)) + "," + fmt4(bp(p.im_p50)) + "," + fmt4(bp(p.im_p95)) + "\n";
        }
        write(out_dir / "exposure_profile.csv", csv);
    }

    json j;
    j["seed"] = cfg.seed;
    j["paths"] = cfg.mc.paths;
    j["dt"] = cfg.mc.dt;
    j["substeps"] = cfg.mc.substeps;
    j["credit_scenario"] = cfg.credit_scenario;
    j["rho"] = cfg.rho;
    j["vol_multiplier"] = cfg.vol_multiplier;
    j["fixed_rate"] = base.trade.fixed_rate;
    j["g2_params"] = to_json(env.g2);
    j["units"] = "bp per unit notional";
    j["cells"] = cells;
    write(out_dir / "summary.json", j.dump(2) + "\n");
    return summary;
}

CalibrationReport calibrate_and_save(const ScenarioConfig& cfg, const fs::path& out_dir, int threads) {
    const json raw = load_json(cfg.market_data);
    const MarketData md = market_data_from_json(raw);
    CalibrationOptions opt;
    opt.threads = threads;
    opt.rho_min = cfg.rho12_min;
    opt.rho_max = cfg.rho12_max;
    const CalibrationReport rep = calibrate_g2(md.swaption_vols, md.curve, opt);
    if (!std::isfinite(rep.rmse_vol)) throw CalibrationError("calibration produced a non-finite error");

    json g2 = to_json(rep.params);
    g2["rmse_vol"] = rep.rmse_vol;
    g2["max_abs_error"] = rep.max_abs_error;
    g2["iterations"] = rep.iterations;
    g2["converged"] = rep.converged;
    const fs::path g2_file = cfg.g2_params.empty() ? out_dir / "g2_params.json" : cfg.g2_params;
    if (g2_file.has_parent_path()) fs::create_directories(g2_file.parent_path());
    save_json(g2_file, g2);

    json cir = json::object();
    for (const auto& c : raw.at("cds_curves")) {
        if (!c.contains("cir")) continue;
        const std::string name = c.at("name").get<std::string>();
        const CirPPModel model(cir_params_from_json(c.at("cir")),
                               std::make_shared<PiecewiseHazard>(bootstrap_hazard(md.cds(name), md.curve)));
        if (model.min_shift(10.0) < 0.0) std::cerr << "warning: negative CIR++ shift for curve '" << name << "'\n";
        cir[name] = describe_cir(model, 10.0, 0.25);
    }
    const fs::path cir_file = cfg.cir_params.empty() ? out_dir / "cir_params.json" : cfg.cir_params;
    if (cir_file.has_parent_path()) fs::create_directories(cir_file.parent_path());
    save_json(cir_file, cir);
    return rep;
}

}  // namespace xva
