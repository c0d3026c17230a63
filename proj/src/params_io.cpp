#include <fstream>
#include <iomanip>

#include "xva/models.hpp"

namespace xva {

namespace {

double field(const nlohmann::json& j, const char* key, const char* what) {
    if (!j.is_object() || !j.contains(key) || !j.at(key).is_number()) {
        throw InputError(std::string(what) + ": missing numeric field '" + key + "'");
    }
    return j.at(key).get<double>();
}

}  // namespace

nlohmann::json to_json(const G2Params& p) {
    return {{"a1", p.a1}, {"a2", p.a2}, {"sigma1", p.sigma1}, {"sigma2", p.sigma2}, {"rho12", p.rho}};
}

G2Params g2_params_from_json(const nlohmann::json& j) {
    G2Params p;
    p.a1 = field(j, "a1", "g2 params");
    p.a2 = field(j, "a2", "g2 params");
    p.sigma1 = field(j, "sigma1", "g2 params");
    p.sigma2 = field(j, "sigma2", "g2 params");
    p.rho = field(j, "rho12", "g2 params");
    p.validate();
    return p;
}

nlohmann::json to_json(const CirParams& p) {
    return {{"y0", p.y0}, {"kappa", p.kappa}, {"mu", p.mu}, {"nu", p.nu}};
}

CirParams cir_params_from_json(const nlohmann::json& j) {
    CirParams p;
    p.y0 = field(j, "y0", "cir params");
    p.kappa = field(j, "kappa", "cir params");
    p.mu = field(j, "mu", "cir params");
    p.nu = field(j, "nu", "cir params");
    p.validate();
    return p;
}

nlohmann::json describe_cir(const CirPPModel& model, double horizon, double step) {
    nlohmann::json j = to_json(model.params());
    nlohmann::json samples = nlohmann::json::array();
    for (double t = 0.0; t <= horizon + 1e-12; t += step) {
        samples.push_back({{"t", t},
                           {"psi", model.shift(t)},
                           {"psi_integral", model.shift_integral(t)},
                           {"survival", model.survival0(t)}});
    }
    j["shift"] = samples;
    return j;
}

void save_json(const std::filesystem::path& file, const nlohmann::json& j) {
    std::ofstream out(file);
    if (!out) throw InputError("cannot write " + file.string());
    out << std::setw(2) << j << '\n';
}

nlohmann::json load_json(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw InputError("cannot open " + file.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(file.string() + ": " + e.what());
    }
}

}  // namespace xva
