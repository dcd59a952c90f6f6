#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

using namespace hestonlaw;
using Catch::Approx;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "hestonlaw");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << text;
    return path.string();
}

const std::string kSteep = "samples/steep.json";

} // namespace

TEST_CASE("domain command", "[cli]") {
    const auto r = run_cli({"domain", "--params", kSteep});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    REQUIRE(j["command"] == "domain");
    REQUIRE(j["outputs"]["u_star_plus"].get<double>() == Approx(37.43).margin(0.01));
    REQUIRE(j["outputs"]["u_star_minus"].get<double>() == Approx(-3.21).margin(0.01));
    REQUIRE(j["outputs"]["case_label"] == "A_gt_rhoc");
    REQUIRE(j["outputs"]["t0"].is_null());
}

TEST_CASE("domain command over a horizon grid", "[cli]") {
    const auto r = run_cli({"domain", "--params", kSteep, "--t-grid", "0.5:5:4"});
    REQUIRE(r.code == 0);
    REQUIRE(json::parse(r.out)["outputs"]["reports"].size() == 4);
}

TEST_CASE("mgf command", "[cli]") {
    const auto r = run_cli({"mgf", "--params", kSteep, "--u", "0,1,40"});
    REQUIRE(r.code == 0);
    const auto rows = json::parse(r.out)["outputs"]["rows"];
    REQUIRE(rows[0]["value"].get<double>() == 1.0);
    REQUIRE(rows[1]["value"].get<double>() == Approx(1.0).epsilon(1e-12));
    REQUIRE(rows[2]["value"] == "inf");
}

TEST_CASE("global flags may follow the subcommand", "[cli]") {
    const auto r = run_cli({"--params", kSteep, "mgf", "--u", "0.5", "--tol", "1e-15"});
    REQUIRE(r.code == 0);
    REQUIRE(json::parse(r.out)["outputs"]["rows"][0]["value"].get<double>() == Approx(mgf(
        EvalContext(make_params(2, 0.0225, 0.8, -0.9, 1, 0.0225), Horizon{1}), 0.5)).epsilon(1e-14));
}

TEST_CASE("cf command", "[cli]") {
    const auto r = run_cli({"cf", "--params", kSteep, "--grid", "-10:10:5", "--imag", "--csv"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string header;
    std::getline(in, header);
    REQUIRE(header == "u,re,im,log_re,log_im");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    REQUIRE(rows == 5);
    const auto alb = run_cli({"cf", "--params", kSteep, "--u", "10", "--form", "albrecher"});
    const auto nw = run_cli({"cf", "--params", kSteep, "--u", "10"});
    const auto a = json::parse(alb.out)["outputs"]["rows"][0];
    const auto b = json::parse(nw.out)["outputs"]["rows"][0];
    REQUIRE(a["re"].get<double>() == Approx(b["re"].get<double>()).epsilon(1e-10));
    REQUIRE(a["im"].get<double>() == Approx(b["im"].get<double>()).epsilon(1e-10));
}

TEST_CASE("wings, moment and deal commands", "[cli]") {
    const auto w = json::parse(run_cli({"wings", "--params", kSteep}).out)["outputs"];
    REQUIRE(w["beta_L"].get<double>() > w["beta_R"].get<double>());
    const auto m = json::parse(run_cli({"moment", "--params", kSteep, "--n", "1"}).out)["outputs"];
    REQUIRE(m["value"].get<double>() == Approx(1.0).epsilon(1e-12));
    const auto inf = json::parse(run_cli({"moment", "--params", kSteep, "--n", "50"}).out)["outputs"];
    REQUIRE(inf["value"] == "inf");
    const auto d = run_cli({"deal", "--params", kSteep, "--type", "in-arrears", "--delta", "0.5"});
    REQUIRE(d.code == 0);
    REQUIRE(json::parse(d.out)["outputs"]["fair_strike"].get<double>() > 1.0);
    REQUIRE(run_cli({"deal", "--params", kSteep, "--type", "swap"}).code == 1);
}

TEST_CASE("factorize command with CSV export", "[cli]") {
    const auto r = run_cli({"factorize", "--params", kSteep, "--n", "20"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out)["outputs"];
    REQUIRE(j["roots"].size() == 20);
    REQUIRE(j["residues"].size() == 20);
    for (const char* key : {"nu", "d", "xi", "c", "g"}) REQUIRE(j.contains(key));
    const auto csv = run_cli({"factorize", "--params", kSteep, "--n", "20", "--csv"});
    REQUIRE(csv.out.rfind("n,a_n,b_n,c_n,g_n\n", 0) == 0);
    REQUIRE(std::count(csv.out.begin(), csv.out.end(), '\n') == 21);
}

TEST_CASE("density command writes CSV to --out", "[cli]") {
    const auto path = (std::filesystem::temp_directory_path() / "hestonlaw_density.csv").string();
    const auto r = run_cli({"density", "--params", "samples/desk.json", "--factors", "5", "--grid", "-1:1:101",
                            "--reference", "--out", path});
    REQUIRE(r.code == 0);
    REQUIRE(r.out.empty());
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    REQUIRE(header == "x,approx,reference");
}

TEST_CASE("oracle command is reproducible", "[cli]") {
    const std::vector<std::string> args = {"oracle", "--params", kSteep, "--paths", "20000", "--steps", "64",
                                           "--seed", "3", "--u", "0.5,1"};
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    REQUIRE(a.code == 0);
    REQUIRE(a.out == b.out);
    REQUIRE(json::parse(a.out)["outputs"]["rows"].size() == 2);
}

TEST_CASE("check command", "[cli]") {
    SECTION("quick level passes and is deterministic") {
        const auto a = run_cli({"check", "--params", kSteep});
        INFO(a.out << a.err);
        REQUIRE(a.code == 0);
        REQUIRE(a.out == run_cli({"check", "--params", kSteep}).out);
        for (const auto& row : json::parse(a.out)["checks"]) {
            REQUIRE(row["pass"].get<bool>());
            REQUIRE((row["measured"].is_number() || row["measured"] == "inf" || row["measured"] == "-inf"));
        }
    }
    SECTION("full level passes on the steep set") {
        const auto r = run_cli({"check", "--params", kSteep, "--level", "full", "--seed", "11"});
        INFO(r.out << r.err);
        REQUIRE(r.code == 0);
    }
    SECTION("quick level passes on an a < c rho set") {
        const auto path = temp_file("hestonlaw_pos_rho.json",
                                    R"({"a": 0.5, "b": 0.04, "c": 1.0, "rho": 0.9, "v0": 0.04, "t": 5})");
        const auto r = run_cli({"check", "--params", path});
        INFO(r.out << r.err);
        REQUIRE(r.code == 0);
    }
}

TEST_CASE("echoed params re-parse to the same model", "[cli]") {
    const auto j = json::parse(run_cli({"wings", "--params", kSteep}).out);
    const auto echoed = params_from_json(j["inputs"]["params"]);
    const auto original = load_params(kSteep);
    REQUIRE(echoed.params == original.params);
    REQUIRE(echoed.horizon == original.horizon);
}

TEST_CASE("user errors exit with 1", "[cli]") {
    REQUIRE(run_cli({}).code == 1);
    REQUIRE(run_cli({"nonsense"}).code == 1);
    REQUIRE(run_cli({"mgf", "--params", kSteep, "--u", "1", "--bogus"}).code == 1);
    REQUIRE(run_cli({"mgf", "--u", "1"}).code == 1);
    REQUIRE(run_cli({"mgf", "--params", "/nonexistent.json", "--u", "1"}).code == 1);
    REQUIRE(run_cli({"mgf", "--params", kSteep, "--grid", "1:0:5"}).code == 1);
    const auto bad = temp_file("hestonlaw_bad.json", R"({"a": 2, "b": 0.1, "c": 0.3, "rho": 0, "v0": 0.1, "t": 1, "x": 3})");
    const auto r = run_cli({"wings", "--params", bad});
    REQUIRE(r.code == 1);
    REQUIRE(r.err.find("x: unknown parameter key") != std::string::npos);
    const auto unsupported = temp_file("hestonlaw_rho1.json", R"({"a": 1, "b": 0.1, "c": 2, "rho": 1, "v0": 0.1, "t": 1})");
    REQUIRE(run_cli({"factorize", "--params", unsupported, "--n", "5"}).code == 1);
}
