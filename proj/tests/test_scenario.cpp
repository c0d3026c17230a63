#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "support.hpp"
#include "xva/scenario.hpp"

using namespace xva;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / ("xva_scenario_test_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

json small_config() {
    return json{{"market_data", xva::test::source_path("data/market_data.json")},
                {"g2_params", xva::test::source_path("configs/g2_params.json")},
                {"credit_scenario", "H/M"},
                {"seed", 42},
                {"mc", {{"paths", 1500}, {"dt", 0.25}, {"substeps", 1}}},
                {"trade", {{"direction", "receiver"}, {"maturity", 5}, {"fixed_rate", "par"}}},
                {"margin", {{"mode", "csa_vm_im"}, {"alpha", 0.5}, {"q", 0.99}, {"delta_days", 10}}},
                {"funding", {{"beta_plus", 1.0}, {"beta_minus", 0.5}}},
                {"exposure_profile", true},
                {"tables",
                 {{{"name", "grid"},
                   {"rows", {{"axis", "rho"}, {"values", {-0.3, 0.3}}}},
                   {"columns", {{"axis", "alpha"}, {"values", {0.0, 1.0}}}}},
                  {{"name", "decomp"}, {"kind", "decomposition"}, {"rows", {{"axis", "q"}, {"values", {0.5, 0.9}}}}},
                  {{"name", "spread"},
                   {"kind", "bid_ask"},
                   {"rows", {{"axis", "beta_plus"}, {"values", {0.0, 1.0}}}},
                   {"columns", {{"axis", "beta_minus"}, {"values", {0.0}}}}}}}};
}

fs::path write_config(const std::string& name, const json& j) {
    const fs::path f = scratch() / name;
    std::ofstream(f) << j.dump(2);
    return f;
}

int run_cli(const std::string& args) {
    const char* cli = std::getenv("XVA_CLI");
    REQUIRE(cli != nullptr);
    const std::string cmd = std::string(cli) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& f) {
    std::ifstream in(f, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config parsing rejects malformed input with the field name") {
    const fs::path base = scratch();
    CHECK_NOTHROW(scenario_from_json(small_config(), base));

    auto expect_field = [&](json j, const std::string& field) {
        try {
            scenario_from_json(j, base);
            FAIL("accepted a bad config for " << field);
        } catch (const ConfigError& e) {
            CHECK_MESSAGE(std::string(e.what()).find(field) != std::string::npos, e.what());
        }
    };
    auto j = small_config();
    j.erase("seed");
    expect_field(j, "seed");
    j = small_config();
    j["margin"]["mode"] = "full";
    expect_field(j, "margin.mode");
    j = small_config();
    j["margin"]["alpha"] = 1.5;
    expect_field(j, "margin");
    j = small_config();
    j["trade"]["colour"] = "red";
    expect_field(j, "trade.colour");
    j = small_config();
    j["tables"][0]["rows"]["axis"] = "kappa";
    expect_field(j, "tables[0].rows.axis");
    j = small_config();
    j["credit_scenario"] = "X/Y";
    expect_field(j, "credit_scenario");
    j = small_config();
    j["funding"]["beta_plus"] = 2.0;
    expect_field(j, "funding");
    j = small_config();
    j["tables"][1]["name"] = "grid";
    expect_field(j, "tables[1].name");
}

TEST_CASE("credit scenario naming") {
    CHECK(credit_names("H/M") == std::pair<std::string, std::string>{"High", "Mid"});
    CHECK(credit_names("M/H") == std::pair<std::string, std::string>{"Mid", "High"});
}

TEST_CASE("cli exit codes") {
    CHECK(run_cli("run --config " + (scratch() / "missing.json").string()) == 2);
    auto j = small_config();
    j["mc"]["paths"] = 0;
    CHECK(run_cli("run --config " + write_config("zero_paths.json", j).string()) == 2);
    std::ofstream(scratch() / "broken.json") << "{ not json";
    CHECK(run_cli("run --config " + (scratch() / "broken.json").string()) == 2);
    CHECK(run_cli("run") == 2);
    CHECK(run_cli("frobnicate") == 2);

    // A market whose swaptions cannot be priced makes calibration fail.
    json md;
    {
        std::ifstream in(xva::test::source_path("data/market_data.json"));
        md = json::parse(in);
    }
    for (auto& q : md["swaption_vols"]) q["vol"] = 25.0;
    std::ofstream(scratch() / "absurd_market.json") << md.dump();
    json cal{{"market_data", "absurd_market.json"}, {"g2_params", "absurd_g2.json"}, {"seed", 1}};
    CHECK(run_cli("calibrate --config " + write_config("absurd.json", cal).string()) == 3);
}

TEST_CASE("identical outputs across thread counts") {
    const fs::path cfg = write_config("small.json", small_config());
    const fs::path a = scratch() / "out1", b = scratch() / "out4";
    REQUIRE(run_cli("run --config " + cfg.string() + " --threads 1 --out-dir " + a.string()) == 0);
    REQUIRE(run_cli("run --config " + cfg.string() + " --threads 4 --out-dir " + b.string()) == 0);
    for (const char* f : {"grid.csv", "grid_se.csv", "decomp.csv", "spread.csv", "exposure_profile.csv", "summary.json"}) {
        REQUIRE(fs::exists(a / f));
        CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
    }
    const auto csv = slurp(a / "decomp.csv");
    CHECK(csv.rfind("q,MtM,CVA,DVA,MVA,FVA,Total\n", 0) == 0);
    CHECK(slurp(a / "grid.csv").rfind("rho,alpha=0.0000,alpha=1.0000\n", 0) == 0);

    // A different seed changes the numbers.
    const fs::path c = scratch() / "seed";
    REQUIRE(run_cli("run --config " + cfg.string() + " --seed 43 --out-dir " + c.string()) == 0);
    CHECK(slurp(a / "grid.csv") != slurp(c / "grid.csv"));
}

TEST_CASE("in-process run matches the table structure") {
    const ScenarioConfig cfg = scenario_from_json(small_config(), scratch());
    const Environment env = load_environment(cfg);
    const auto summary = run_scenario(cfg, env, scratch() / "inproc", 2);
    // 2x2 grid, 2 decomposition rows, 2 bid-ask cells.
    CHECK(summary.cells.size() == 8);
    for (const auto& c : summary.cells) {
        if (c.table == "decomp" && c.row == 0.5) CHECK(c.result.mva.value == 0.0);
        if (c.table == "spread" && c.row == 0.0) CHECK(c.result.total.value == doctest::Approx(0.0).scale(1e-12));
    }
}
